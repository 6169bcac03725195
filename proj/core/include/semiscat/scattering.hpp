#pragma once

#include <complex>
#include <vector>

#include "semiscat/jost.hpp"
#include "semiscat/potential.hpp"

namespace semiscat {

/// 2x2 scattering data at one real energy. Layout follows the channel
/// convention with reflections on the (+,+)/(-,-) slots and transmissions
/// on the (+,-)/(-,+) slots, fixed so the free potential gives vanishing
/// reflections and unit transmission. The phase theta is defined through
/// the normalized determinant det_s() = t^2 - r_l r_r, which equals 1 for
/// the free potential (so theta -> 0 there); this differs from the raw
/// matrix determinant of the stated layout by a fixed unimodular factor.
struct ScatteringRecord {
    double lambda = 0.0;
    double h = 1.0;
    cdouble s_pp;   // reflection, left-incoming channel
    cdouble s_pm;   // transmission
    cdouble s_mp;   // transmission (equal to s_pm in one dimension)
    cdouble s_mm;   // reflection, right-incoming channel
    double theta = 0.0;      // unwrapped scattering phase (filled by scattering_phase)
    double ssf_deriv = 0.0;  // optional sample of s'(lambda)
    bool has_ssf = false;

    cdouble det_s() const { return s_pm * s_mp - s_pp * s_mm; }
    /// Frobenius norm of S* S - I.
    double unitarity_defect() const;
};

/// Scattering matrix at energy lambda > 0 for a (numerically) compactly
/// supported potential. Throws below_threshold for lambda <= 0.
ScatteringRecord smatrix(const Potential& pot, double lambda, double h,
                         double tol = 1e-9);

/// Same on a caller-provided grid; sharing one grid across an energy sweep
/// reuses the potential cache.
ScatteringRecord smatrix(const Potential& pot, double lambda, double h,
                         const SegmentedGrid& grid);

/// Sampled derivative curve of the spectral shift function.
struct SsfCurve {
    std::vector<double> lambdas;
    std::vector<double> values;
    double h = 1.0;
};

/// Unwraps the phase theta(lambda) = arg det_s / 2 along an ordered energy
/// sweep. Successive increments must stay below pi/2, otherwise
/// grid_too_coarse is thrown. The phase is anchored at the first record
/// with theta in (-pi/2, pi/2].
void scattering_phase(std::vector<ScatteringRecord>& records);

/// theta'(lambda)/pi via a five-point central stencil on the unwrapped
/// phase; dlambda defaults to 1e-4 * lambda.
double ssf_derivative(const Potential& pot, double lambda, double h,
                      double dlambda = 0.0, double tol = 1e-9);
double ssf_derivative(const Potential& pot, double lambda, double h,
                      double dlambda, const SegmentedGrid& grid);

/// Leading Weyl coefficient s0(lambda) = (1/pi) Int (sqrt(lambda-V)_+ -
/// sqrt(lambda)) dx; the spectral shift function behaves like
/// s0(lambda)/h at non-trapping energies.
double weyl_leading(const Potential& pot, double lambda, double tol = 1e-9);

} // namespace semiscat
