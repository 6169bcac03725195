#include "semiscat/scattering.hpp"

#include <algorithm>
#include <cmath>

#include "semiscat/errors.hpp"
#include "semiscat/numerics.hpp"

namespace semiscat {

double ScatteringRecord::unitarity_defect() const {
    // columns of S in the (+,-) channel basis
    const cdouble a = s_pp, b = s_pm, c = s_mp, d = s_mm;
    // S*S entries
    const cdouble e11 = std::conj(a) * a + std::conj(c) * c - 1.0;
    const cdouble e12 = std::conj(a) * b + std::conj(c) * d;
    const cdouble e21 = std::conj(b) * a + std::conj(d) * c;
    const cdouble e22 = std::conj(b) * b + std::conj(d) * d - 1.0;
    return std::sqrt(std::norm(e11) + std::norm(e12) + std::norm(e21) +
                     std::norm(e22));
}

ScatteringRecord smatrix(const Potential& pot, double lambda, double h,
                         double tol) {
    const EnergyPoint ep = EnergyPoint::upper(lambda, h);
    const GridSpec gs = choose_jost_grid(pot, ep.z, h, tol);
    const SegmentedGrid grid(pot, gs.L, gs.dx);
    return smatrix(pot, lambda, h, grid);
}

ScatteringRecord smatrix(const Potential& pot, double lambda, double h,
                         const SegmentedGrid& grid) {
    if (lambda <= 0.0)
        throw below_threshold("smatrix: lambda must be positive");

    const EnergyPoint ep = EnergyPoint::upper(lambda, h);
    const JostPair pair = solve_jost_pair(pot, ep, grid);
    const cdouble k = pair.right.k;
    const cdouble ik_h = cdouble(0, 1) * k / h;

    // Decompose f_- at the right end into the exponential basis:
    // f_- = c_up e^{+ikx/h} + c_dn e^{-ikx/h}. Then the right-incidence
    // data is t = 1/c_dn, r_R = c_up / c_dn.
    const double xr = grid.right();
    const cdouble fm = pair.left.psi.back();
    const cdouble dfm = pair.left.dpsi.back();
    const cdouble ep_r = std::exp(ik_h * xr);
    const cdouble c_up = (dfm + ik_h * fm) / (2.0 * ik_h) / ep_r;
    const cdouble c_dn = -(dfm - ik_h * fm) / (2.0 * ik_h) * ep_r;

    // Same at the left end for f_+: f_+ = d_up e^{+ikx/h} + d_dn e^{-ikx/h};
    // left incidence: t = 1/d_up, r_L = d_dn / d_up.
    const double xl = grid.left();
    const cdouble fp = pair.right.psi.front();
    const cdouble dfp = pair.right.dpsi.front();
    const cdouble ep_l = std::exp(ik_h * xl);
    const cdouble d_up = (dfp + ik_h * fp) / (2.0 * ik_h) / ep_l;
    const cdouble d_dn = -(dfp - ik_h * fp) / (2.0 * ik_h) * ep_l;

    ScatteringRecord rec;
    rec.lambda = lambda;
    rec.h = h;
    rec.s_pm = 1.0 / c_dn;          // transmission from the Jost connection
    rec.s_mp = 1.0 / d_up;
    rec.s_pp = d_dn / d_up;         // reflection, incidence from the left
    rec.s_mm = c_up / c_dn;         // reflection, incidence from the right
    return rec;
}

void scattering_phase(std::vector<ScatteringRecord>& records) {
    if (records.empty()) return;
    double prev_arg = std::arg(records.front().det_s());
    double theta = 0.5 * prev_arg;  // anchor in (-pi/2, pi/2]
    records.front().theta = theta;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const double a = std::arg(records[i].det_s());
        double d = a - prev_arg;
        while (d > M_PI) d -= 2.0 * M_PI;
        while (d < -M_PI) d += 2.0 * M_PI;
        if (std::abs(d) >= 0.5 * M_PI)
            throw grid_too_coarse(
                "scattering_phase: increment >= pi/2 between successive energies");
        theta += 0.5 * d;
        records[i].theta = theta;
        prev_arg = a;
    }
}

namespace {

double ssf_from_stencil(std::vector<ScatteringRecord>& recs, double dlambda) {
    scattering_phase(recs);
    // five-point first derivative
    const double d = (recs[0].theta - 8.0 * recs[1].theta + 8.0 * recs[3].theta -
                      recs[4].theta) /
                     (12.0 * dlambda);
    return d / M_PI;
}

} // namespace

double ssf_derivative(const Potential& pot, double lambda, double h,
                      double dlambda, double tol) {
    if (dlambda <= 0.0) dlambda = 1e-4 * lambda;
    std::vector<ScatteringRecord> recs;
    recs.reserve(5);
    for (int j = -2; j <= 2; ++j)
        recs.push_back(smatrix(pot, lambda + j * dlambda, h, tol));
    return ssf_from_stencil(recs, dlambda);
}

double ssf_derivative(const Potential& pot, double lambda, double h,
                      double dlambda, const SegmentedGrid& grid) {
    if (dlambda <= 0.0) dlambda = 1e-4 * lambda;
    std::vector<ScatteringRecord> recs;
    recs.reserve(5);
    for (int j = -2; j <= 2; ++j)
        recs.push_back(smatrix(pot, lambda + j * dlambda, h, grid));
    return ssf_from_stencil(recs, dlambda);
}

double weyl_leading(const Potential& pot, double lambda, double tol) {
    if (lambda <= 0.0) return 0.0;
    const double sqrt_lambda = std::sqrt(lambda);
    auto f = [&](double x) {
        const double d = lambda - pot.evaluate(x);
        return (d > 0.0 ? std::sqrt(d) : 0.0) - sqrt_lambda;
    };
    double L = pot.effective_support_radius(1e-8) + 1.0;
    L = std::clamp(L, 10.0, 1e4);
    double total = integrate(f, -L, L, tol);
    if (!pot.compactly_supported()) {
        // map each tail to u = 1/x so slow power decay is integrated exactly
        auto tail = [&](double sign) {
            return integrate([&](double u) {
                if (u <= 0.0) return 0.0;
                const double x = sign / u;
                return f(x) / (u * u);
            }, 0.0, 1.0 / L, tol);
        };
        total += tail(1.0) + tail(-1.0);
    }
    return total / M_PI;
}

} // namespace semiscat
