#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace semiscat {

/// Smooth plateau g0: equal to 1 on [-inner, inner], 0 outside
/// [-outer, outer], C-infinity monotone blend in between built from
/// B(t) = exp(-1/t) (t > 0). Even by construction.
class PlateauFunction {
public:
    PlateauFunction(double inner = 1.0, double outer = 2.0);

    double operator()(double r) const;
    double inner_radius() const { return inner_; }
    double outer_radius() const { return outer_; }

private:
    double inner_, outer_;
};

enum class PotentialKind {
    Free,
    SquareBarrier,
    GaussianBarrier,
    WellInIsland,
    DoubleStructure,
    PowerTail,
    Truncated,
};

/// Report of the symbol-decay check |V(x)| <= C <x>^-rho,
/// |V'(x)| <= C <x>^-(rho+1) over a sample grid.
struct DecayReport {
    double max_ratio_v = 0.0;        // max |V(x)| <x>^rho
    double max_ratio_dv = 0.0;       // max |V'(x)| <x>^(rho+1)
    bool violated = false;           // either ratio exceeded the bound
    double bound = 0.0;
};

/// Immutable one-dimensional potential. All families evaluate to finite
/// real values for finite x and are safe to share across threads.
class Potential {
public:
    static Potential free();
    /// V = height on |x| < halfwidth, 0 outside. Negative height gives a well.
    static Potential square_barrier(double height, double halfwidth);
    /// V = E0 exp(-(x/width)^2); nondegenerate maximum E0 at x = 0.
    static Potential gaussian_barrier(double E0, double width = 1.0);
    /// V = A exp(-(x/a)^2) - B exp(-(x/b)^2): a broad barrier with a well
    /// carved at the center, the bottom staying above sea level for A > B.
    static Potential well_in_island(double A, double a, double B, double b);
    static Potential well_in_island();  // repo default parameters
    /// Barrier of height E0 at x = 0 plus a taller bump at x = -separation;
    /// at energy E0 the trapped set is the fixed point plus one homoclinic
    /// loop on the left.
    static Potential double_structure(double E0, double w0, double E1,
                                      double w1, double separation);
    static Potential double_structure();  // repo default parameters
    /// V = amplitude <x>^-rho.
    static Potential power_tail(double amplitude, double rho);

    PotentialKind kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }
    double decay_exponent() const { return rho_; }

    double operator()(double x) const { return evaluate(x); }
    double evaluate(double x) const;
    /// dV/dx, analytic for every family except Truncated blends, where the
    /// plateau factor is differentiated analytically as well.
    double derivative(double x) const;
    /// d2V/dx2, analytic where the family permits, otherwise central
    /// differences with step 1e-5.
    double second_derivative(double x) const;

    /// Points where the potential is not smooth (SquareBarrier edges,
    /// truncation plateau corners). Integration grids align on these.
    std::vector<double> breakpoints() const;

    /// Radius L with V(x) = 0 for |x| >= L, if the support is compact.
    std::optional<double> support_radius() const;
    bool compactly_supported() const { return support_radius().has_value(); }

    /// Radius beyond which |V| < eps; defined for every family.
    double effective_support_radius(double eps = 1e-15) const;

    std::string describe() const;

private:
    Potential(PotentialKind k, std::vector<double> p, double rho);
    PotentialKind kind_;
    std::vector<double> params_;
    double rho_ = 0.0;
    std::shared_ptr<const Potential> base_;  // Truncated only
    PlateauFunction plateau_{1.0, 2.0};
    double trunc_R_ = 0.0;

    friend Potential truncate(const Potential& base, double R);
};

/// W(x) = g0(x/R) V(x): agrees with base on |x| <= R, vanishes for
/// |x| >= 2R, smooth in between. Throws invalid_parameter for R <= 0.
Potential truncate(const Potential& base, double R);

/// Checks the decay hypothesis by sampling; derivative via central
/// differences with step 1e-5 when no analytic form is used.
DecayReport decay_certificate(const Potential& pot, double rho,
                              const std::vector<double>& x_samples,
                              double bound = 1e6);

} // namespace semiscat
