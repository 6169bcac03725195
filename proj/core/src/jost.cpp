#include "semiscat/jost.hpp"

#include <algorithm>
#include <cmath>

#include "semiscat/errors.hpp"
#include "semiscat/numerics.hpp"

namespace semiscat {

cdouble sqrt_continued(const EnergyPoint& ep) {
    const cdouble z = ep.z;
    if (z.imag() != 0.0 || z.real() >= 0.0) return std::sqrt(z);
    switch (ep.side) {
    case BoundarySide::UpperLimit:
        return cdouble(0.0, std::sqrt(-z.real()));
    case BoundarySide::LowerLimit:
        return cdouble(0.0, -std::sqrt(-z.real()));
    case BoundarySide::Interior:
        throw branch_ambiguity("sqrt_continued: z on the branch cut without a side");
    }
    return {};
}

namespace {

struct State {
    cdouble psi, dpsi;
};

// One RK4 step of psi'' = q(x) psi with q = (V - z)/h^2, using cached
// potential samples at the step endpoints and midpoint.
inline State rk4_step(const State& s, double dx, double v_a, double v_m,
                      double v_b, cdouble z, double inv_h2) {
    const cdouble qa = (v_a - z) * inv_h2;
    const cdouble qm = (v_m - z) * inv_h2;
    const cdouble qb = (v_b - z) * inv_h2;

    const cdouble k1p = s.dpsi;
    const cdouble k1d = qa * s.psi;

    const cdouble psi2 = s.psi + 0.5 * dx * k1p;
    const cdouble k2p = s.dpsi + 0.5 * dx * k1d;
    const cdouble k2d = qm * psi2;

    const cdouble psi3 = s.psi + 0.5 * dx * k2p;
    const cdouble k3p = s.dpsi + 0.5 * dx * k2d;
    const cdouble k3d = qm * psi3;

    const cdouble psi4 = s.psi + dx * k3p;
    const cdouble k4p = s.dpsi + dx * k3d;
    const cdouble k4d = qb * psi4;

    State out;
    out.psi = s.psi + dx / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    out.dpsi = s.dpsi + dx / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    return out;
}

void require_compact(const Potential& pot) {
    if (!pot.compactly_supported() &&
        pot.effective_support_radius(1e-60) > 1e5)
        throw unsupported_potential(
            "jost: potential must be compactly supported (or truncated); got " +
            pot.describe());
}

void require_resolution(const SegmentedGrid& grid, cdouble k, double h) {
    if (std::abs(k) / h * grid.max_dx() > 0.5)
        throw resolution_error("jost: step too coarse, k*dx > 0.5");
}

} // namespace

JostSolution jost_right(const Potential& pot, const EnergyPoint& ep,
                        const SegmentedGrid& grid) {
    require_compact(pot);
    const cdouble k = sqrt_continued(ep);
    require_resolution(grid, k, ep.h);

    const std::size_t n = grid.n_nodes();
    JostSolution sol;
    sol.orientation = JostOrientation::FromRight;
    sol.k = k;
    sol.h = ep.h;
    sol.z = ep.z;
    sol.x = grid.nodes();
    sol.psi.resize(n);
    sol.dpsi.resize(n);

    const cdouble ik_h = cdouble(0, 1) * k / ep.h;
    const double inv_h2 = 1.0 / (ep.h * ep.h);

    State s;
    s.psi = std::exp(ik_h * grid.right());
    s.dpsi = ik_h * s.psi;
    sol.psi[n - 1] = s.psi;
    sol.dpsi[n - 1] = s.dpsi;
    for (std::size_t j = n - 1; j-- > 0;) {
        const double dx = grid.node(j) - grid.node(j + 1);  // negative
        s = rk4_step(s, dx, grid.v_hi(j), grid.v_mid(j), grid.v_lo(j), ep.z,
                     inv_h2);
        sol.psi[j] = s.psi;
        sol.dpsi[j] = s.dpsi;
    }
    return sol;
}

JostSolution jost_left(const Potential& pot, const EnergyPoint& ep,
                       const SegmentedGrid& grid) {
    require_compact(pot);
    const cdouble k = sqrt_continued(ep);
    require_resolution(grid, k, ep.h);

    const std::size_t n = grid.n_nodes();
    JostSolution sol;
    sol.orientation = JostOrientation::FromLeft;
    sol.k = k;
    sol.h = ep.h;
    sol.z = ep.z;
    sol.x = grid.nodes();
    sol.psi.resize(n);
    sol.dpsi.resize(n);

    const cdouble ik_h = cdouble(0, 1) * k / ep.h;
    const double inv_h2 = 1.0 / (ep.h * ep.h);

    State s;
    s.psi = std::exp(-ik_h * grid.left());
    s.dpsi = -ik_h * s.psi;
    sol.psi[0] = s.psi;
    sol.dpsi[0] = s.dpsi;
    for (std::size_t j = 0; j < n - 1; ++j) {
        const double dx = grid.node(j + 1) - grid.node(j);
        s = rk4_step(s, dx, grid.v_lo(j), grid.v_mid(j), grid.v_hi(j), ep.z,
                     inv_h2);
        sol.psi[j + 1] = s.psi;
        sol.dpsi[j + 1] = s.dpsi;
    }
    return sol;
}

JostPair solve_jost_pair(const Potential& pot, const EnergyPoint& ep,
                         const SegmentedGrid& grid) {
    return {jost_left(pot, ep, grid), jost_right(pot, ep, grid)};
}

cdouble JostSolution::value_at(double xq) const {
    // outside the grid the potential vanishes, so the solution is an exact
    // two-exponential combination fixed by the boundary data
    const cdouble ik_h = cdouble(0, 1) * k / h;
    auto free_continue = [&](std::size_t i) {
        const cdouble e_up = std::exp(ik_h * x[i]);
        const cdouble c_up = (dpsi[i] + ik_h * psi[i]) / (2.0 * ik_h) / e_up;
        const cdouble c_dn = -(dpsi[i] - ik_h * psi[i]) / (2.0 * ik_h) * e_up;
        return c_up * std::exp(ik_h * xq) + c_dn * std::exp(-ik_h * xq);
    };
    if (xq <= x.front()) return free_continue(0);
    if (xq >= x.back()) return free_continue(x.size() - 1);

    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    // cubic Hermite from (psi, psi') at the bracketing nodes
    const double dx = x[i + 1] - x[i];
    const double t = (xq - x[i]) / dx;
    const double t2 = t * t, t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * psi[i] +
           (t3 - 2.0 * t2 + t) * dx * dpsi[i] +
           (-2.0 * t3 + 3.0 * t2) * psi[i + 1] + (t3 - t2) * dx * dpsi[i + 1];
}

cdouble JostSolution::deriv_at(double xq) const {
    const auto it = std::upper_bound(x.begin(), x.end(), std::clamp(xq, x.front(), x.back()));
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    i = i == 0 ? 0 : i - 1;
    if (i + 1 >= x.size()) i = x.size() - 2;
    const double t = (xq - x[i]) / (x[i + 1] - x[i]);
    return dpsi[i] * (1.0 - t) + dpsi[i + 1] * t;
}

double JostSolution::ode_residual(const Potential& pot) const {
    double max_res = 0.0, max_psi = 0.0;
    for (const auto& p : psi) max_psi = std::max(max_psi, std::abs(p));
    const auto breaks = pot.breakpoints();
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const double dl = x[i] - x[i - 1], dr = x[i + 1] - x[i];
        if (std::abs(dl - dr) > 1e-12 * dl) continue;  // skip segment seams
        bool near_break = false;
        for (double b : breaks)
            if (b >= x[i - 1] - 1e-12 && b <= x[i + 1] + 1e-12) near_break = true;
        if (near_break) continue;  // stencil must not straddle a discontinuity
        const cdouble second = (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) / (dl * dr);
        const cdouble res = -h * h * second + (pot.evaluate(x[i]) - z) * psi[i];
        max_res = std::max(max_res, std::abs(res));
    }
    return max_res / std::max(max_psi, 1e-300);
}

namespace {

// compensated accumulation of a sum of products (double-double with fma);
// the Wronskian at complex z cancels up to e^{2|Im sqrt z| L/h} leading
// digits, far beyond plain double rounding
struct CompensatedSum {
    double hi = 0.0, lo = 0.0;
    void add_prod(double a, double b) {
        const double p = a * b;
        const double perr = std::fma(a, b, -p);
        const double t = hi + p;
        const double bb = t - hi;
        lo += (hi - (t - bb)) + (p - bb) + perr;
        hi = t;
    }
    double value() const { return hi + lo; }
};

cdouble wronskian_compensated(cdouble fm, cdouble dfm, cdouble fp, cdouble dfp) {
    // w = fm * dfp - dfm * fp
    CompensatedSum re, im;
    re.add_prod(fm.real(), dfp.real());
    re.add_prod(-fm.imag(), dfp.imag());
    re.add_prod(-dfm.real(), fp.real());
    re.add_prod(dfm.imag(), fp.imag());
    im.add_prod(fm.real(), dfp.imag());
    im.add_prod(fm.imag(), dfp.real());
    im.add_prod(-dfm.real(), fp.imag());
    im.add_prod(-dfm.imag(), fp.real());
    return {re.value(), im.value()};
}

} // namespace

JostConnection wronskian(const JostPair& pair) {
    const auto& fm = pair.left;
    const auto& fp = pair.right;
    const std::size_t n = fm.psi.size();
    const auto w_at = [&](std::size_t i) {
        return wronskian_compensated(fm.psi[i], fm.dpsi[i], fp.psi[i],
                                     fp.dpsi[i]);
    };
    JostConnection c;
    // Evaluate at the right endpoint, where f_+ carries its exact boundary
    // data. For complex z the solutions are stiff: rounding noise picked up
    // while marching f_- rightward lies along the f_+ direction and drops
    // out of the Wronskian exactly there; at interior nodes it does not.
    c.wronskian = w_at(n - 1);
    c.z = fm.z;
    c.h = fm.h;
    double dev = 0.0;
    const double ref = std::abs(c.wronskian);
    // sample the constancy on a thinned set of nodes
    const std::size_t stride = std::max<std::size_t>(1, n / 64);
    for (std::size_t i = 0; i < n; i += stride)
        dev = std::max(dev, std::abs(w_at(i) - c.wronskian));
    c.max_rel_deviation = ref > 0 ? dev / ref : dev;
    return c;
}

cdouble jost_determinant(const Potential& pot, cdouble z, double h,
                         BoundarySide side, double tol) {
    EnergyPoint ep{z, h, side};
    const GridSpec gs = choose_jost_grid(pot, z, h, tol);
    SegmentedGrid grid(pot, gs.L, gs.dx);
    return wronskian(solve_jost_pair(pot, ep, grid)).wronskian;
}

ResolventKernel::ResolventKernel(const Potential& pot, const EnergyPoint& ep,
                                 const SegmentedGrid& grid)
    : pair_(solve_jost_pair(pot, ep, grid)), h_(ep.h) {
    conn_ = wronskian(pair_);
    const double wfree = 2.0 * std::abs(sqrt_continued(ep)) / ep.h;
    if (std::abs(conn_.wronskian) < 1e-13 * wfree)
        throw at_pole_error("green kernel at a Jost determinant zero", ep.z);
    scale_ = -1.0 / (ep.h * ep.h * conn_.wronskian);
}

cdouble ResolventKernel::green(double x, double y) const {
    const double lo = std::min(x, y), hi = std::max(x, y);
    return pair_.left.value_at(lo) * pair_.right.value_at(hi) * scale_;
}

ResolventKernel make_resolvent_kernel(const Potential& pot, const EnergyPoint& ep,
                                      double tol) {
    const GridSpec gs = choose_jost_grid(pot, ep.z, ep.h, tol);
    SegmentedGrid grid(pot, gs.L, gs.dx);
    return ResolventKernel(pot, ep, grid);
}

namespace {

/// chi G chi discretized with separable structure: apply in O(n) through
/// prefix sums over f_- and suffix sums over f_+.
struct SeparableOp {
    std::vector<cdouble> fm, fp;  // solutions sampled on the quadrature grid
    std::vector<double> wl, wr;   // weights including sqrt(quadrature)
    cdouble scale;

    void apply(const std::vector<cdouble>& v, std::vector<cdouble>& out) const {
        const std::size_t n = v.size();
        out.resize(n);
        std::vector<cdouble> pre(n), suf(n);
        cdouble acc(0, 0);
        for (std::size_t i = 0; i < n; ++i) {
            acc += fm[i] * (wr[i] * v[i]);
            pre[i] = acc;
        }
        acc = cdouble(0, 0);
        for (std::size_t i = n; i-- > 0;) {
            suf[i] = acc;
            acc += fp[i] * (wr[i] * v[i]);
        }
        for (std::size_t i = 0; i < n; ++i)
            out[i] = wl[i] * scale * (fp[i] * pre[i] + fm[i] * suf[i]);
    }

    void apply_adjoint(const std::vector<cdouble>& v, std::vector<cdouble>& out) const {
        // K* v = conj(K_swapped conj(v)) with left/right weights exchanged
        const std::size_t n = v.size();
        out.resize(n);
        std::vector<cdouble> pre(n), suf(n);
        cdouble acc(0, 0);
        for (std::size_t i = 0; i < n; ++i) {
            acc += fm[i] * (wl[i] * std::conj(v[i]));
            pre[i] = acc;
        }
        acc = cdouble(0, 0);
        for (std::size_t i = n; i-- > 0;) {
            suf[i] = acc;
            acc += fp[i] * (wl[i] * std::conj(v[i]));
        }
        for (std::size_t i = 0; i < n; ++i)
            out[i] = std::conj(wr[i] * scale * (fp[i] * pre[i] + fm[i] * suf[i]));
    }
};

} // namespace

double weighted_resolvent_norm(const ResolventKernel& kernel,
                               const std::function<double(double)>& wl,
                               const std::function<double(double)>& wr,
                               double xmin, double xmax, std::size_t n,
                               double rel_tol) {
    if (n < 8) throw invalid_parameter("weighted_resolvent_norm: grid too small");
    SeparableOp op;
    op.fm.resize(n);
    op.fp.resize(n);
    op.wl.resize(n);
    op.wr.resize(n);
    const double dx = (xmax - xmin) / static_cast<double>(n - 1);
    // scale carries -1/(h^2 w); quadrature sqrt weights fold into wl/wr
    op.scale = kernel.scale();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = xmin + dx * static_cast<double>(i);
        const double q = (i == 0 || i == n - 1) ? 0.5 * dx : dx;
        op.fm[i] = kernel.pair().left.value_at(x);
        op.fp[i] = kernel.pair().right.value_at(x);
        op.wl[i] = wl(x) * std::sqrt(q);
        op.wr[i] = wr(x) * std::sqrt(q);
    }
    return operator_norm_power(
        [&](const std::vector<cdouble>& v, std::vector<cdouble>& out) { op.apply(v, out); },
        [&](const std::vector<cdouble>& v, std::vector<cdouble>& out) { op.apply_adjoint(v, out); },
        n, rel_tol);
}

double cutoff_resolvent_opnorm(const Potential& pot, const EnergyPoint& ep,
                               const CutoffSpec& chi, std::size_t n_quad,
                               double rel_tol) {
    const ResolventKernel kernel = make_resolvent_kernel(pot, ep);
    auto w = [&](double x) { return chi(x); };
    return weighted_resolvent_norm(kernel, w, w, -chi.outer, chi.outer, n_quad,
                                   rel_tol);
}

} // namespace semiscat
