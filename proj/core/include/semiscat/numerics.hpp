#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace semiscat {

using cdouble = std::complex<double>;

/// Japanese bracket <x> = sqrt(1 + x^2).
inline double jbracket(double x) { return std::sqrt(1.0 + x * x); }

/// Adaptive Simpson quadrature. Recursion stops when the local error
/// estimate is below tol (absolute) or max_depth is reached.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10, int max_depth = 48);

/// Integral of sqrt((f)_+) type integrands with square-root behavior at the
/// endpoints. Uses bisection-heavy adaptive Simpson; tolerant of endpoint
/// zeros but not of interior sign changes.
double integrate_sqrt_endpoints(const std::function<double(double)>& f,
                                double a, double b, double tol = 1e-10);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms of fit residuals
};

/// Least-squares straight line through (x_i, y_i).
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Simple bisection root finder for continuous f with f(a)*f(b) < 0.
double bisect(const std::function<double(double)>& f, double a, double b,
              double tol = 1e-13, int max_iter = 200);

/// Largest singular value of a linear operator on C^n given by its action,
/// computed by power iteration on A*A. apply/applyAdjoint must be
/// compatible. Deterministic start vector. Relative tolerance on the
/// singular value estimate.
double operator_norm_power(
    const std::function<void(const std::vector<cdouble>&, std::vector<cdouble>&)>& apply,
    const std::function<void(const std::vector<cdouble>&, std::vector<cdouble>&)>& apply_adjoint,
    std::size_t n, double rel_tol = 1e-6, int max_iter = 600);

/// Runs body(i) for i in [0, n) on up to `jobs` threads with a static
/// partition; results must be stored by index so the outcome is
/// independent of the thread count.
void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& body);

/// Indices of strict local maxima of y, excluding endpoints.
std::vector<std::size_t> local_maxima(const std::vector<double>& y);

/// Parabolic refinement of a local maximum at index i of samples (x, y).
/// Returns the refined abscissa (and the refined peak value through *value).
double refine_peak(const std::vector<double>& x, const std::vector<double>& y,
                   std::size_t i, double* value = nullptr);

} // namespace semiscat
