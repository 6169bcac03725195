#include "semiscat/grid.hpp"

#include <algorithm>
#include <cmath>

#include "semiscat/errors.hpp"

namespace semiscat {

SegmentedGrid::SegmentedGrid(const Potential& pot, double L, double dx_target,
                             const std::vector<double>& extra_cuts) {
    if (L <= 0.0 || dx_target <= 0.0)
        throw invalid_parameter("SegmentedGrid: L and dx must be positive");

    std::vector<double> cuts{-L, L};
    for (double b : pot.breakpoints())
        if (b > -L && b < L) cuts.push_back(b);
    for (double b : extra_cuts)
        if (b > -L && b < L) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-14; }),
               cuts.end());

    nodes_.push_back(cuts.front());
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        const auto n = static_cast<std::size_t>(std::ceil((b - a) / dx_target));
        const double dx = (b - a) / static_cast<double>(std::max<std::size_t>(n, 1));
        max_dx_ = std::max(max_dx_, dx);
        for (std::size_t i = 1; i <= std::max<std::size_t>(n, 1); ++i)
            nodes_.push_back(i == n ? b : a + dx * static_cast<double>(i));
    }

    const std::size_t m = n_steps();
    v_lo_.resize(m);
    v_mid_.resize(m);
    v_hi_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double a = nodes_[j], b = nodes_[j + 1];
        const double nudge = 1e-9 * (b - a);
        v_lo_[j] = pot.evaluate(a + nudge);
        v_mid_[j] = pot.evaluate(0.5 * (a + b));
        v_hi_[j] = pot.evaluate(b - nudge);
    }
}

std::size_t SegmentedGrid::locate(double x) const {
    if (x <= nodes_.front()) return 0;
    if (x >= nodes_.back()) return nodes_.size() - 1;
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

GridSpec choose_jost_grid(const Potential& pot, std::complex<double> z,
                          double h, double tol) {
    // Use the effective support: keeping the grid as tight as the potential
    // allows matters at complex z, where the solutions span e^{2|Im sqrt z| L/h}
    // and every extra unit of L amplifies the Wronskian cancellation.
    const auto support = pot.support_radius();
    double radius = pot.effective_support_radius(1e-14);
    if (support) radius = std::min(radius, *support);
    const double L = radius + 1.0;

    // local wavenumber bound over the solve window
    double vmin = 0.0, vmax = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double x = -L + 2.0 * L * i / 200.0;
        const double v = pot.evaluate(x);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    const double kmax =
        std::sqrt(std::max(std::abs(z - vmin), std::abs(z - vmax))) / h;

    // accumulated RK4 phase error ~ (2 L kmax) (k dx)^4 / 120 <= tol
    const double span_phase = std::max(2.0 * L * kmax, 1.0);
    double kdx = std::pow(120.0 * tol / span_phase, 0.25);
    kdx = std::clamp(kdx, 1e-3, 0.1);

    GridSpec g;
    g.L = L;
    g.dx = kdx / std::max(kmax, 1e-8);
    g.dx = std::min(g.dx, L / 16.0);  // at least a handful of nodes
    return g;
}

} // namespace semiscat
