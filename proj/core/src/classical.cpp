#include "semiscat/classical.hpp"

#include <algorithm>
#include <cmath>

#include "semiscat/errors.hpp"
#include "semiscat/numerics.hpp"

namespace semiscat {

namespace {

inline void leapfrog_steps(const Potential& pot, PhasePoint& p, double dt,
                           long n) {
    // kick-drift-kick for H = xi^2 + V(x): dx/dt = 2 xi, dxi/dt = -V'(x)
    for (long i = 0; i < n; ++i) {
        const double xi_half = p.xi - 0.5 * dt * pot.derivative(p.x);
        p.x += dt * 2.0 * xi_half;
        p.xi = xi_half - 0.5 * dt * pot.derivative(p.x);
    }
}

} // namespace

PhasePoint flow(const Potential& pot, PhasePoint p0, double t, double dt) {
    if (t == 0.0) return p0;
    const long n = std::max<long>(1, static_cast<long>(std::ceil(std::abs(t) / dt)));
    leapfrog_steps(pot, p0, t / static_cast<double>(n), n);
    return p0;
}

Trajectory flow_trajectory(const Potential& pot, PhasePoint p0, double t_max,
                           double dt) {
    Trajectory tr;
    const long n = std::max<long>(1, static_cast<long>(std::ceil(std::abs(t_max) / dt)));
    const double step = t_max / static_cast<double>(n);
    tr.t.reserve(n + 1);
    tr.x.reserve(n + 1);
    tr.xi.reserve(n + 1);
    tr.t.push_back(0.0);
    tr.x.push_back(p0.x);
    tr.xi.push_back(p0.xi);
    PhasePoint p = p0;
    for (long i = 1; i <= n; ++i) {
        leapfrog_steps(pot, p, step, 1);
        tr.t.push_back(step * static_cast<double>(i));
        tr.x.push_back(p.x);
        tr.xi.push_back(p.xi);
    }
    return tr;
}

bool is_trapped(const Potential& pot, PhasePoint p0, double t_max,
                double escape_radius, double dt) {
    for (double dir : {1.0, -1.0}) {
        PhasePoint p = p0;
        const long n = static_cast<long>(std::ceil(t_max / dt));
        const double step = dir * dt;
        for (long i = 0; i < n; ++i) {
            leapfrog_steps(pot, p, step, 1);
            if (std::abs(p.x) > escape_radius) return false;
        }
    }
    return true;
}

namespace {

// time of flight between positions at energy E along xi^2 + V = E. The
// integrand 1/(2 sqrt(E - V)) may have inverse-square-root turning points
// at either end; tau = sqrt(distance-to-end) makes each half smooth:
// Int dx / (2 sqrt(d)) = Int tau dtau / sqrt(d(tau)), d ~ |V'| tau^2.
double time_of_flight(const Potential& pot, double E, double a, double b) {
    if (a == b) return 0.0;
    const double mid = 0.5 * (a + b);
    auto half = [&](double anchor, double inner) {
        const double span = std::abs(inner - anchor);
        const double sgn = inner > anchor ? 1.0 : -1.0;
        auto g = [&](double tau) {
            double x = anchor + sgn * tau * tau;
            double d = E - pot.evaluate(x);
            if (d <= 0.0) {
                // cancellation guard right at a turning point
                const double tau_eps = 1e-6 * std::sqrt(span);
                d = E - pot.evaluate(anchor + sgn * tau_eps * tau_eps);
                if (d <= 0.0) return 0.0;
                return tau_eps / std::sqrt(d);
            }
            return tau / std::sqrt(d);
        };
        return integrate(g, 0.0, std::sqrt(span), 1e-12, 40);
    };
    return half(a, mid) + half(b, mid);
}

// first crossing of V = E scanning from x0 in direction dir, starting
// strictly below E
double find_crossing(const Potential& pot, double E, double x0, double dir,
                     double scan_limit) {
    const double step = 1e-3;
    double x = x0;
    while (std::abs(x - x0) < scan_limit) {
        const double xn = x + dir * step;
        if (pot.evaluate(xn) >= E)
            return bisect([&](double s) { return pot.evaluate(s) - E; },
                          std::min(x, xn), std::max(x, xn), 1e-15);
        x = xn;
    }
    throw geometry_error("turning-point scan failed");
}

// intercept ln|g| of ln|x_j| = ln|g| -/+ mu t_j on a logarithmic ladder of
// positions approaching the fixed point
struct ExpFit {
    double g_abs = 0.0;
    double mu_fit = 0.0;
    double residual = 0.0;
};

ExpFit fit_exponent(const std::vector<double>& t, const std::vector<double>& lnx,
                    double sign_mu) {
    const LinearFit lf = fit_line(t, lnx);
    ExpFit out;
    out.mu_fit = sign_mu * lf.slope;
    out.g_abs = std::exp(lf.intercept);
    out.residual = lf.residual;
    return out;
}

} // namespace

HomoclinicData homoclinic_data(const Potential& pot, double /*flow_dt*/) {
    HomoclinicData hd;
    hd.E0 = pot.evaluate(0.0);
    const double vpp = pot.second_derivative(0.0);
    if (vpp >= 0.0 || std::abs(pot.derivative(0.0)) > 1e-8)
        throw geometry_error("homoclinic_data: no nondegenerate maximum at x = 0");
    hd.mu = std::sqrt(-2.0 * vpp);

    // homoclinic turning point: first V = E0 crossing left of the top
    hd.x_loop = find_crossing(pot, hd.E0, -1e-4, -1.0, 1e3);
    // far turning point of the reflected trajectory: V drops below E0 again
    {
        const double step = 1e-3;
        double x = hd.x_loop - 1e-9;
        while (pot.evaluate(x) >= hd.E0) x -= step;
        hd.x_ell = bisect([&](double s) { return pot.evaluate(s) - hd.E0; }, x,
                          x + step, 1e-15);
    }

    // loop action by turning-point quadrature
    {
        auto f = [&](double x) { return std::max(hd.E0 - pot.evaluate(x), 0.0); };
        hd.A0 = 2.0 * integrate_sqrt_endpoints(
                          [&](double x) { return std::sqrt(f(x)); }, hd.x_loop,
                          0.0, 1e-12);
    }

    const double sqrtE = std::sqrt(hd.E0);
    const double far = pot.effective_support_radius(1e-14) + 2.0;

    // regularized actions of the free-normalized trajectories
    {
        auto f = [&](double x) {
            const double d = hd.E0 - pot.evaluate(x);
            return (d > 0.0 ? std::sqrt(d) : 0.0) - sqrtE;
        };
        hd.A_in = integrate(f, 0.0, far, 1e-12);
        hd.A_out = hd.A_in;
        hd.A_ell = 2.0 * integrate(f, -far, hd.x_ell, 1e-12) + 2.0 * sqrtE * hd.x_ell;
    }

    // time shift of the reflected trajectory from the crossing times of the
    // two free-normalized parameterizations: the turning time relative to
    // x(t) = 2 sqrt(E0) t is -far/(2 sqrt E0) plus the flight time in
    {
        const double t_turn =
            -far / (2.0 * sqrtE) + time_of_flight(pot, hd.E0, -far, hd.x_ell);
        hd.T_ell = -2.0 * t_turn;
    }

    // asymptotic constants from time-of-flight ladders near the fixed point
    const int m = 14;
    std::vector<double> tj, lnxj;
    double max_res = 0.0;

    // homoclinic side: time origin at the turning point, x in [-1e-2, -1e-5]
    tj.clear();
    lnxj.clear();
    double t_acc = time_of_flight(pot, hd.E0, hd.x_loop, -1e-2);
    double x_prev = -1e-2;
    for (int j = 0; j < m; ++j) {
        const double xj = -1e-2 * std::pow(10.0, -3.0 * j / (m - 1.0));
        if (j > 0) {
            t_acc += time_of_flight(pot, hd.E0, x_prev, xj);
            x_prev = xj;
        }
        tj.push_back(t_acc);
        lnxj.push_back(std::log(-xj));
    }
    {
        const ExpFit ef = fit_exponent(tj, lnxj, -1.0);
        hd.g0_minus = -ef.g_abs;   // loop lives at x < 0
        hd.g0_plus = hd.g0_minus;  // time-reversal symmetry through the turning point
        max_res = std::max(max_res, ef.residual);
    }

    // incoming trajectory on the right: free normalization x(t) = -2 sqrt(E0) t
    tj.clear();
    lnxj.clear();
    t_acc = -far / (2.0 * sqrtE) + time_of_flight(pot, hd.E0, 1e-2, far);
    // note: time from far down to 1e-2 equals time_of_flight(1e-2, far)
    x_prev = 1e-2;
    for (int j = 0; j < m; ++j) {
        const double xj = 1e-2 * std::pow(10.0, -3.0 * j / (m - 1.0));
        if (j > 0) {
            t_acc += time_of_flight(pot, hd.E0, xj, x_prev);
            x_prev = xj;
        }
        tj.push_back(t_acc);
        lnxj.push_back(std::log(xj));
    }
    {
        const ExpFit ef = fit_exponent(tj, lnxj, -1.0);
        hd.g_in = ef.g_abs;
        hd.g_out = hd.g_in;  // time-reversal pair shares the constant
        max_res = std::max(max_res, ef.residual);
    }
    hd.fit_residual = max_res;

    if (!(hd.g_in > 0.0) || !(hd.g0_minus < 0.0))
        throw geometry_error("homoclinic_data: sign conventions violated");
    return hd;
}

double agmon_distance(const Potential& pot, double E, double a, double b,
                      double tol) {
    if (a >= b) throw invalid_parameter("agmon_distance: need a < b");
    // forbid V < E strictly inside
    const int n_check = 256;
    for (int i = 1; i < n_check; ++i) {
        const double x = a + (b - a) * i / n_check;
        if (pot.evaluate(x) - E < -1e-10 * std::max(std::abs(E), 1.0))
            throw invalid_barrier("agmon_distance: V drops below E inside (a,b)");
    }
    auto f = [&](double x) { return std::max(pot.evaluate(x) - E, 0.0); };
    return integrate_sqrt_endpoints([&](double x) { return std::sqrt(f(x)); }, a,
                                    b, tol);
}

} // namespace semiscat
