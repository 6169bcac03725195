#pragma once

#include <complex>
#include <vector>

#include "semiscat/potential.hpp"

namespace semiscat {

/// Uniform-in-segments integration grid over [-L, L]. Segment boundaries
/// sit on the potential's breakpoints so no Runge-Kutta step straddles a
/// discontinuity. Potential samples for the three RK4 stage positions of
/// every step are cached once; endpoint samples are nudged into the
/// segment interior so one-sided limits are used at breakpoints.
class SegmentedGrid {
public:
    SegmentedGrid(const Potential& pot, double L, double dx_target,
                  const std::vector<double>& extra_cuts = {});

    std::size_t n_nodes() const { return nodes_.size(); }
    std::size_t n_steps() const { return nodes_.size() - 1; }
    double node(std::size_t i) const { return nodes_[i]; }
    const std::vector<double>& nodes() const { return nodes_; }
    double left() const { return nodes_.front(); }
    double right() const { return nodes_.back(); }
    double max_dx() const { return max_dx_; }

    double v_lo(std::size_t step) const { return v_lo_[step]; }
    double v_mid(std::size_t step) const { return v_mid_[step]; }
    double v_hi(std::size_t step) const { return v_hi_[step]; }

    /// Index of the last node with node(i) <= x (clamped).
    std::size_t locate(double x) const;

private:
    std::vector<double> nodes_;
    std::vector<double> v_lo_, v_mid_, v_hi_;
    double max_dx_ = 0.0;
};

/// Grid extent and step requested by configuration.
struct GridSpec {
    double L = 0.0;    // solve on [-L, L]
    double dx = 0.0;   // target step
};

/// Chooses a grid for Jost integration at complex energy z: the support of
/// the potential plus a margin, with the step set from the phase-accuracy
/// target so that the accumulated RK4 error stays below tol.
GridSpec choose_jost_grid(const Potential& pot, std::complex<double> z,
                          double h, double tol = 1e-9);

} // namespace semiscat
