#include "semiscat/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>

#include "semiscat/errors.hpp"

namespace semiscat {

namespace {

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double fa, double fm, double fb, double whole, double tol,
             int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double err = left + right - whole;
    // the relative floor keeps near-singular pieces from recursing past the
    // point where their absolute contribution is already negligible
    const double floor = 5e-16 * (std::abs(left) + std::abs(right));
    if (depth <= 0 || std::abs(err) <= 15.0 * std::max(tol, floor))
        return left + right + err / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return adapt(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth);
}

double integrate_sqrt_endpoints(const std::function<double(double)>& f,
                                double a, double b, double tol) {
    // Substitute x = a + (b-a) sin^2(u) so endpoint square roots become
    // smooth in u; then plain adaptive Simpson converges fast.
    const double len = b - a;
    if (len <= 0.0) return 0.0;
    auto g = [&](double u) {
        const double s = std::sin(u), c = std::cos(u);
        const double x = a + len * s * s;
        return f(x) * len * 2.0 * s * c;
    };
    constexpr double half_pi = 1.5707963267948966;
    return integrate(g, 0.0, half_pi, tol, 48);
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw invalid_parameter("fit_line: need at least two points");
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw degenerate_fit("fit_line: degenerate abscissae");
    LinearFit out;
    out.slope = (n * sxy - sx * sy) / denom;
    out.intercept = (sy - out.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - out.slope * x[i] - out.intercept;
        ss += r * r;
    }
    out.residual = std::sqrt(ss / n);
    return out;
}

double bisect(const std::function<double(double)>& f, double a, double b,
              double tol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw invalid_parameter("bisect: no sign change");
    for (int i = 0; i < max_iter && (b - a) > tol * (1.0 + std::abs(a)); ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if (fa * fm < 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

double operator_norm_power(
    const std::function<void(const std::vector<cdouble>&, std::vector<cdouble>&)>& apply,
    const std::function<void(const std::vector<cdouble>&, std::vector<cdouble>&)>& apply_adjoint,
    std::size_t n, double rel_tol, int max_iter) {
    if (n == 0) return 0.0;
    std::vector<cdouble> v(n), w(n), u(n);
    // Deterministic, structureless start vector.
    for (std::size_t i = 0; i < n; ++i)
        v[i] = cdouble(1.0 + 0.37 * std::sin(0.7 * double(i) + 0.3), 0.0);
    double nv = 0;
    for (auto& c : v) nv += std::norm(c);
    nv = std::sqrt(nv);
    for (auto& c : v) c /= nv;

    double sigma = 0.0, prev = -1.0;
    for (int it = 0; it < max_iter; ++it) {
        apply(v, w);
        apply_adjoint(w, u);
        double nu = 0;
        for (auto& c : u) nu += std::norm(c);
        nu = std::sqrt(nu);
        if (nu == 0.0) return 0.0;
        sigma = std::sqrt(nu);
        for (std::size_t i = 0; i < n; ++i) v[i] = u[i] / nu;
        if (prev > 0.0 && std::abs(sigma - prev) <= rel_tol * sigma) return sigma;
        prev = sigma;
    }
    throw numerical_failure("operator_norm_power: no convergence");
}

void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& body) {
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    if (jobs == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += jobs) body(i);
        });
    }
    for (auto& t : workers) t.join();
}

std::vector<std::size_t> local_maxima(const std::vector<double>& y) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] > y[i - 1] && y[i] > y[i + 1]) out.push_back(i);
    return out;
}

double refine_peak(const std::vector<double>& x, const std::vector<double>& y,
                   std::size_t i, double* value) {
    if (i == 0 || i + 1 >= x.size()) {
        if (value) *value = y[i];
        return x[i];
    }
    const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
    const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
    const double d1 = (y1 - y0) / (x1 - x0);
    const double d2 = (y2 - y1) / (x2 - x1);
    const double curv = (d2 - d1) / (0.5 * (x2 - x0));
    if (curv >= 0.0) {
        if (value) *value = y1;
        return x1;
    }
    const double xm = 0.5 * (x0 + x1);
    const double xp = 0.5 * (x1 + x2);
    // vertex of the interpolating parabola through the three points
    double xv = (d1 * xp - d2 * xm) / (d1 - d2);
    xv = std::clamp(xv, x0, x2);
    if (value) {
        // Lagrange evaluation at the vertex
        const double l0 = (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2));
        const double l1 = (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2));
        const double l2 = (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
        *value = y0 * l0 + y1 * l1 + y2 * l2;
    }
    return xv;
}

} // namespace semiscat
