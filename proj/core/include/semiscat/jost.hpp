#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "semiscat/grid.hpp"
#include "semiscat/potential.hpp"

namespace semiscat {

using cdouble = std::complex<double>;

enum class BoundarySide { UpperLimit, LowerLimit, Interior };

/// Complex energy point z with the semiclassical parameter and, for real z,
/// the side from which the continuation limit is taken.
struct EnergyPoint {
    cdouble z;
    double h = 1.0;
    BoundarySide side = BoundarySide::Interior;

    static EnergyPoint upper(double lambda, double h) {
        return {cdouble(lambda, 0.0), h, BoundarySide::UpperLimit};
    }
    static EnergyPoint lower(double lambda, double h) {
        return {cdouble(lambda, 0.0), h, BoundarySide::LowerLimit};
    }
    static EnergyPoint interior(cdouble z, double h) {
        return {z, h, BoundarySide::Interior};
    }
};

/// Principal branch of sqrt(z) (cut on the negative real axis), with the
/// side of the cut resolved by ep.side for real z < 0. This is the branch
/// that continues the physical resolvent from above through (0, inf) into
/// the lower half-plane. Throws branch_ambiguity when z sits on the cut
/// and no side is given.
cdouble sqrt_continued(const EnergyPoint& ep);

enum class JostOrientation { FromRight, FromLeft };

/// Solution of -h^2 psi'' + V psi = z psi normalized to a pure exponential
/// at one end: exp(+i sqrt(z) x / h) at +infinity for FromRight, or
/// exp(-i sqrt(z) x / h) at -infinity for FromLeft. Values and derivatives
/// are stored on every grid node.
struct JostSolution {
    std::vector<double> x;
    std::vector<cdouble> psi;
    std::vector<cdouble> dpsi;
    JostOrientation orientation;
    cdouble k;          // sqrt(z), momentum is k/h
    double h = 1.0;
    cdouble z;

    cdouble value_at(double xq) const;   // linear interpolation
    cdouble deriv_at(double xq) const;

    /// Max over interior nodes of the three-point ODE residual
    /// |-h^2 psi'' + (V - z) psi| / max|psi|.
    double ode_residual(const Potential& pot) const;
};

struct JostPair {
    JostSolution left;    // f_-  ~ exp(-i k x / h) at -infinity
    JostSolution right;   // f_+  ~ exp(+i k x / h) at +infinity
};

/// Wronskian data w(z) = f_- f_+' - f_-' f_+ with a constancy diagnostic.
struct JostConnection {
    cdouble wronskian;          // value at the grid midpoint
    double max_rel_deviation;   // of pointwise Wronskian across the grid
    cdouble z;
    double h;
};

JostSolution jost_right(const Potential& pot, const EnergyPoint& ep,
                        const SegmentedGrid& grid);
JostSolution jost_left(const Potential& pot, const EnergyPoint& ep,
                       const SegmentedGrid& grid);
JostPair solve_jost_pair(const Potential& pot, const EnergyPoint& ep,
                         const SegmentedGrid& grid);

JostConnection wronskian(const JostPair& pair);

/// Jost determinant w(z). Grid chosen automatically from the requested
/// accuracy. Zeros in the lower half-plane are resonances; zeros on the
/// negative real axis (upper side) are bound states.
cdouble jost_determinant(const Potential& pot, cdouble z, double h,
                         BoundarySide side = BoundarySide::UpperLimit,
                         double tol = 1e-9);

/// Outgoing Green kernel G(x,y) = f_-(min) f_+(max) / (-h^2 w).
/// Throws at_pole_error when w(z) vanishes to working precision.
class ResolventKernel {
public:
    ResolventKernel(const Potential& pot, const EnergyPoint& ep,
                    const SegmentedGrid& grid);

    cdouble green(double x, double y) const;
    const JostPair& pair() const { return pair_; }
    const JostConnection& connection() const { return conn_; }
    double h() const { return h_; }
    cdouble scale() const { return scale_; }   // -1/(h^2 w)

private:
    JostPair pair_;
    JostConnection conn_;
    double h_;
    cdouble scale_;   // -1 / (h^2 w)
};

ResolventKernel make_resolvent_kernel(const Potential& pot, const EnergyPoint& ep,
                                      double tol = 1e-9);

/// Smooth compactly supported cutoff chi: 1 on [-inner, inner], 0 outside
/// [-outer, outer], with an optional overall amplitude.
struct CutoffSpec {
    double inner = 1.0;
    double outer = 2.0;
    double amplitude = 1.0;

    double operator()(double x) const {
        return amplitude * PlateauFunction(inner, outer)(x);
    }
};

/// L2 operator norm of the integral operator with kernel
/// wl(x) G(x,y) wr(y), discretized on n uniform quadrature points of
/// [xmin, xmax]; computed by power iteration to rel_tol.
double weighted_resolvent_norm(const ResolventKernel& kernel,
                               const std::function<double(double)>& wl,
                               const std::function<double(double)>& wr,
                               double xmin, double xmax, std::size_t n,
                               double rel_tol = 1e-6);

/// Norm of chi (P - z)^-1 chi with the smooth cutoff above.
double cutoff_resolvent_opnorm(const Potential& pot, const EnergyPoint& ep,
                               const CutoffSpec& chi, std::size_t n_quad = 2048,
                               double rel_tol = 1e-6);

} // namespace semiscat
