#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "semiscat/jost.hpp"
#include "semiscat/potential.hpp"

namespace semiscat {

enum class ResonanceKind { BoundState, Resonance };

/// A located zero of the Jost determinant: a resonance in the lower
/// half-plane or a bound state on the negative real axis.
struct Resonance {
    cdouble z;
    double width = 0.0;            // -2 Im z
    int multiplicity = 1;
    double newton_residual = 0.0;  // |w(z*)| / |w(z* + probe)|
    ResonanceKind kind = ResonanceKind::Resonance;
    bool refined = true;           // false when Newton failed to converge
};

/// Rectangular search region in the z-plane. im_max is clamped to a small
/// positive guard so threshold bound states are not double-counted.
struct SearchBox {
    double re_min, re_max;
    double im_min, im_max = 1e-6;
    int contour_points = 256;
};

/// Shared-grid evaluator of the Jost determinant; reuses one potential
/// cache for the many evaluations of a zero search.
class DeterminantEvaluator {
public:
    DeterminantEvaluator(const Potential& pot, double h, double z_scale,
                         double tol = 1e-10);
    cdouble operator()(cdouble z) const;
    double h() const { return h_; }

private:
    const Potential pot_;
    double h_;
    SegmentedGrid grid_;
};

/// Number of zeros of w inside the box by the argument principle:
/// (1/2 pi i) contour integral of w'/w, trapezoid rule, derivative by
/// central differences. Doubles the node count until the integral is
/// within 0.05 of an integer; throws contour_failure otherwise.
int count_zeros(const Potential& pot, const SearchBox& box, double h);
int count_zeros(const DeterminantEvaluator& det, const SearchBox& box);

/// All zeros in the box: recursive subdivision until each sub-box holds at
/// most one zero, then Newton with a central-difference derivative.
/// Results are sorted by (Re z, Im z).
std::vector<Resonance> find_resonances(const Potential& pot,
                                       const SearchBox& box, double h,
                                       int max_zeros = 64);

/// Locates the resonance closest to the real axis with Re z in
/// [e_lo, e_hi] by scanning |w(lambda + i0)| for its minimum and refining
/// with Newton. Suited to exponentially narrow island resonances for which
/// contours would pass too close to the zero.
Resonance find_resonance_near_axis(const Potential& pot, double h,
                                   double e_lo, double e_hi,
                                   int scan_points = 256);

/// Bound states: zeros of w on the negative real axis (upper side), found
/// by real bisection on sign changes of the (real-valued) determinant.
std::vector<Resonance> find_bound_states(const Potential& pot, double h,
                                         double b_min, double b_max,
                                         int scan_points = 512);

/// Rank-one residue projector at a simple resonance:
/// Pi(x,y) = f_-(x) f_+(y) / (-h^2 dw/dz), sampled on a uniform grid over
/// [-x_extent, x_extent].
struct ResidueProjector {
    cdouble z;
    std::vector<double> x;
    Eigen::MatrixXcd kernel;
    double rank_defect = 0.0;  // sigma_2 / sigma_1
};

ResidueProjector residue_projector(const Potential& pot, const Resonance& res,
                                   double h, double x_extent, std::size_t n);

/// Independent contour-integral route: (1/2 pi i) contour integral of
/// G(x,y;z) dz on a circle of the given radius around the resonance.
ResidueProjector residue_projector_contour(const Potential& pot,
                                           const Resonance& res, double h,
                                           double x_extent, std::size_t n,
                                           double radius, int n_contour = 64);

/// Ladder prediction z_k = E0 - i h mu (1/2 + k), k = 0..K-1.
std::vector<cdouble> barrier_top_predict(double E0, double mu, double h, int K);

/// Least-squares slope of ln|Im z| against -1/h for the lowest island
/// resonance tracked across h_list; the slope estimates twice the
/// tunneling action.
struct WidthScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
    std::vector<double> h_list;
    std::vector<cdouble> resonances;
    bool partial = false;  // some h failed to locate the resonance
};

WidthScalingFit width_scaling_fit(const Potential& pot, double e_lo,
                                  double e_hi, const std::vector<double>& h_list);

} // namespace semiscat
