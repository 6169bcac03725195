#include "semiscat/resonance.hpp"

#include <algorithm>
#include <cmath>

#include "semiscat/errors.hpp"
#include "semiscat/numerics.hpp"

namespace semiscat {

namespace {

SegmentedGrid make_search_grid(const Potential& pot, double h, double z_scale,
                               double tol) {
    const GridSpec gs = choose_jost_grid(pot, cdouble(z_scale, 0.0), h, tol);
    return SegmentedGrid(pot, gs.L, gs.dx);
}

cdouble central_dw(const DeterminantEvaluator& det, cdouble z,
                   double step = 0.0) {
    if (step <= 0.0) step = 1e-6 * std::max(std::abs(z), 0.1);
    return (det(z + step) - det(z - step)) / (2.0 * step);
}

struct NewtonResult {
    cdouble z;
    bool converged = false;
    double residual = 0.0;
};

NewtonResult newton_refine(const DeterminantEvaluator& det, cdouble z0,
                           int max_iter = 50) {
    NewtonResult out;
    cdouble z = z0, z_best = z0;
    double w_best = std::abs(det(z0));
    double min_step = 1e300;
    double last_step = 1e-4 * std::max(std::abs(z0), 0.1);
    int plateau = 0;
    for (int it = 0; it < max_iter; ++it) {
        const cdouble w = det(z);
        if (std::abs(w) <= w_best) {
            w_best = std::abs(w);
            z_best = z;
        }
        // derivative stencil tied to the current distance from the zero:
        // wide while far away so determinant noise averages out, shrinking
        // toward the documented 1e-6 |z| step near convergence
        const double dstep =
            std::clamp(0.1 * last_step, 1e-6 * std::max(std::abs(z), 0.1),
                       1e-3 * std::max(std::abs(z), 0.1));
        const cdouble dw = central_dw(det, z, dstep);
        if (std::abs(dw) == 0.0) break;
        const cdouble step = w / dw;
        z -= step;
        last_step = std::abs(step);
        const double scale = std::max(std::abs(z), 1e-3);
        if (std::abs(step) <= 1e-12 * scale) {
            out.converged = true;
            if (std::abs(det(z)) <= w_best) z_best = z;
            break;
        }
        // plateau at the evaluation noise basin: steps no longer shrink
        // while already tiny against the search scale
        min_step = std::min(min_step, std::abs(step));
        plateau = (std::abs(step) >= 0.7 * min_step && min_step <= 1e-5 * scale)
                      ? plateau + 1
                      : 0;
        if (plateau >= 4) {
            out.converged = true;
            break;
        }
    }
    out.z = z_best;
    const double probe = 0.1 * det.h() * std::max(1.0, std::abs(z_best));
    const double wref = std::abs(det(z_best + probe));
    out.residual = wref > 0 ? w_best / wref : w_best;
    // a stall at the evaluation noise floor still counts when the residual
    // is far below the surrounding determinant scale
    if (!out.converged && out.residual < 1e-7) out.converged = true;
    return out;
}

int contour_count(const DeterminantEvaluator& det, const SearchBox& box,
                  int points, double* residual_out) {
    const cdouble c1(box.re_min, box.im_min), c2(box.re_max, box.im_min);
    const cdouble c3(box.re_max, box.im_max), c4(box.re_min, box.im_max);
    const cdouble corners[5] = {c1, c2, c3, c4, c1};
    const double per = 2.0 * (box.re_max - box.re_min) +
                       2.0 * (box.im_max - box.im_min);
    // wider derivative stencil than Newton's: deep in the lower half-plane
    // the determinant carries noise amplified by e^{2|Im sqrt z| L / h}, and
    // a tiny step would turn that noise into derivative garbage
    const double dstep = std::max(
        0.02 * std::min(box.re_max - box.re_min, box.im_max - box.im_min), 1e-9);

    cdouble integral(0, 0);
    for (int e = 0; e < 4; ++e) {
        const cdouble a = corners[e], b = corners[e + 1];
        const double frac = std::abs(b - a) / per;
        const int m = std::max(4, static_cast<int>(std::lround(frac * points)));
        const cdouble dz = (b - a) / static_cast<double>(m);
        for (int j = 0; j < m; ++j) {
            const cdouble z = a + (static_cast<double>(j) + 0.5) * dz;  // midpoint
            integral += central_dw(det, z, dstep) / det(z) * dz;
        }
    }
    const double count = (integral / cdouble(0, 2.0 * M_PI)).real();
    const double rounded = std::lround(count);
    const cdouble ideal(rounded, 0.0);
    const double residual = std::abs(integral / cdouble(0, 2.0 * M_PI) - ideal);
    if (residual_out) *residual_out = residual;
    return static_cast<int>(rounded);
}

void subdivide_collect(const DeterminantEvaluator& det, const SearchBox& box,
                       int depth, std::vector<Resonance>& out) {
    double residual = 0.0;
    int n = contour_count(det, box, box.contour_points, &residual);
    if (residual >= 0.05) {
        n = contour_count(det, box, 2 * box.contour_points, &residual);
        if (residual >= 0.05)
            throw contour_failure("count_zeros: contour residual did not settle");
    }
    if (n == 0) return;
    const double w_re = box.re_max - box.re_min;
    const double w_im = box.im_max - box.im_min;
    if (n == 1 || depth > 20 || (w_re < 1e-9 && w_im < 1e-9)) {
        const cdouble center(0.5 * (box.re_min + box.re_max),
                             0.5 * (box.im_min + box.im_max));
        NewtonResult nr = newton_refine(det, center);
        Resonance r;
        r.z = nr.z;
        r.width = -2.0 * nr.z.imag();
        r.newton_residual = nr.residual;
        r.refined = nr.converged;
        r.multiplicity = n;
        r.kind = ResonanceKind::Resonance;
        out.push_back(r);
        return;
    }
    SearchBox a = box, b = box;
    if (w_re >= w_im) {
        const double mid = 0.5 * (box.re_min + box.re_max);
        a.re_max = mid;
        b.re_min = mid;
    } else {
        const double mid = 0.5 * (box.im_min + box.im_max);
        a.im_max = mid;
        b.im_min = mid;
    }
    subdivide_collect(det, a, depth + 1, out);
    subdivide_collect(det, b, depth + 1, out);
}

} // namespace

DeterminantEvaluator::DeterminantEvaluator(const Potential& pot, double h,
                                           double z_scale, double tol)
    : pot_(pot), h_(h), grid_(make_search_grid(pot, h, z_scale, tol)) {}

cdouble DeterminantEvaluator::operator()(cdouble z) const {
    EnergyPoint ep{z, h_,
                   z.imag() >= 0.0 ? BoundarySide::UpperLimit
                                   : BoundarySide::LowerLimit};
    return wronskian(solve_jost_pair(pot_, ep, grid_)).wronskian;
}

int count_zeros(const DeterminantEvaluator& det, const SearchBox& box) {
    double residual = 0.0;
    int n = contour_count(det, box, box.contour_points, &residual);
    if (residual >= 0.05) {
        n = contour_count(det, box, 2 * box.contour_points, &residual);
        if (residual >= 0.05)
            throw contour_failure("count_zeros: contour residual >= 0.05");
    }
    return n;
}

int count_zeros(const Potential& pot, const SearchBox& box, double h) {
    const double scale = std::max({std::abs(box.re_min), std::abs(box.re_max),
                                   std::abs(box.im_min), 1e-2});
    DeterminantEvaluator det(pot, h, scale);
    return count_zeros(det, box);
}

std::vector<Resonance> find_resonances(const Potential& pot,
                                       const SearchBox& box, double h,
                                       int max_zeros) {
    const double scale = std::max({std::abs(box.re_min), std::abs(box.re_max),
                                   std::abs(box.im_min), 1e-2});
    DeterminantEvaluator det(pot, h, scale);
    const int total = count_zeros(det, box);
    if (total > max_zeros)
        throw contour_failure("find_resonances: too many zeros in the box");
    std::vector<Resonance> out;
    if (total == 0) return out;
    subdivide_collect(det, box, 0, out);

    std::sort(out.begin(), out.end(), [](const Resonance& a, const Resonance& b) {
        if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
        return a.z.imag() < b.z.imag();
    });
    // merge clusters closer than 1e-7 |z|
    std::vector<Resonance> merged;
    for (const auto& r : out) {
        if (!merged.empty() &&
            std::abs(r.z - merged.back().z) <
                1e-7 * std::max(std::abs(r.z), 1e-3)) {
            merged.back().multiplicity += r.multiplicity;
        } else {
            merged.push_back(r);
        }
    }
    return merged;
}

Resonance find_resonance_near_axis(const Potential& pot, double h, double e_lo,
                                   double e_hi, int scan_points) {
    if (!(0.0 < e_lo && e_lo < e_hi))
        throw invalid_parameter("find_resonance_near_axis: bad window");
    DeterminantEvaluator det(pot, h, e_hi, 1e-11);
    // narrow island resonances cut sharp notches into |w(lambda + i0)|;
    // sample finely enough that a notch cannot slip between grid points
    const int n = std::max(scan_points,
                           static_cast<int>(std::ceil((e_hi - e_lo) / 1e-4)));
    std::vector<double> vals(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double lam = e_lo + (e_hi - e_lo) * i / n;
        vals[i] = std::abs(det(cdouble(lam, 0.0)));
    }
    // candidate starts: deepest local minima first
    std::vector<std::pair<double, double>> cands;  // (value, lambda)
    for (int i = 1; i < n; ++i)
        if (vals[i] < vals[i - 1] && vals[i] < vals[i + 1])
            cands.emplace_back(vals[i], e_lo + (e_hi - e_lo) * i / n);
    std::sort(cands.begin(), cands.end());
    if (cands.empty()) {
        const auto it = std::min_element(vals.begin(), vals.end());
        cands.emplace_back(*it, e_lo + (e_hi - e_lo) *
                                         (it - vals.begin()) / double(n));
    }
    for (const auto& [val, lam] : cands) {
        NewtonResult nr = newton_refine(det, cdouble(lam, 0.0));
        if (!nr.converged) continue;
        if (nr.z.real() < e_lo || nr.z.real() > e_hi || nr.z.imag() > 1e-6)
            continue;
        Resonance r;
        r.z = nr.z;
        r.width = -2.0 * nr.z.imag();
        r.newton_residual = nr.residual;
        r.refined = true;
        r.kind = ResonanceKind::Resonance;
        return r;
    }
    throw numerical_failure(
        "find_resonance_near_axis: no zero refined inside the window");
}

std::vector<Resonance> find_bound_states(const Potential& pot, double h,
                                         double b_min, double b_max,
                                         int scan_points) {
    if (!(0.0 < b_min && b_min < b_max))
        throw invalid_parameter("find_bound_states: need 0 < b_min < b_max");
    DeterminantEvaluator det(pot, h, b_max, 1e-11);
    // w(-B + i0) is real-valued for real potentials: pure decaying
    // exponentials on both ends
    auto wre = [&](double B) { return det(cdouble(-B, 0.0)).real(); };
    std::vector<Resonance> out;
    double prev_b = b_min, prev_w = wre(b_min);
    for (int i = 1; i <= scan_points; ++i) {
        const double B = b_min + (b_max - b_min) * i / scan_points;
        const double w = wre(B);
        if (prev_w == 0.0 || prev_w * w < 0.0) {
            const double Bz = bisect(wre, prev_b, B, 1e-14);
            Resonance r;
            r.z = cdouble(-Bz, 0.0);
            r.width = 0.0;
            r.kind = ResonanceKind::BoundState;
            const double probe = 0.1 * h * std::max(1.0, Bz);
            const double ref = std::abs(det(cdouble(-Bz + probe, 0.0)));
            r.newton_residual = ref > 0 ? std::abs(wre(Bz)) / ref : 0.0;
            out.push_back(r);
        }
        prev_b = B;
        prev_w = w;
    }
    std::sort(out.begin(), out.end(), [](const Resonance& a, const Resonance& b) {
        return a.z.real() < b.z.real();
    });
    return out;
}

namespace {

Eigen::MatrixXcd sample_outer_kernel(const JostPair& pair, cdouble scale,
                                     const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    Eigen::MatrixXcd kern(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const cdouble fmi = pair.left.value_at(xs[i]);
        for (std::size_t j = 0; j < n; ++j)
            kern(i, j) = fmi * pair.right.value_at(xs[j]) * scale;
    }
    return kern;
}

double rank_defect_of(const Eigen::MatrixXcd& kern) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(kern);
    const auto& s = svd.singularValues();
    if (s.size() < 2 || s(0) == 0.0) return 0.0;
    return s(1) / s(0);
}

} // namespace

ResidueProjector residue_projector(const Potential& pot, const Resonance& res,
                                   double h, double x_extent, std::size_t n) {
    if (res.multiplicity != 1)
        throw unsupported_multiplicity("residue_projector: multiplicity > 1");
    DeterminantEvaluator det(pot, h, std::abs(res.z), 1e-11);
    const cdouble dw = central_dw(det, res.z);
    const GridSpec gs = choose_jost_grid(pot, res.z, h, 1e-11);
    const SegmentedGrid grid(pot, gs.L, gs.dx);
    const EnergyPoint ep{res.z, h, BoundarySide::LowerLimit};
    const JostPair pair = solve_jost_pair(pot, ep, grid);

    ResidueProjector out;
    out.z = res.z;
    out.x.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.x[i] = -x_extent + 2.0 * x_extent * i / (n - 1);
    out.kernel = sample_outer_kernel(pair, -1.0 / (h * h * dw), out.x);
    out.rank_defect = rank_defect_of(out.kernel);
    return out;
}

ResidueProjector residue_projector_contour(const Potential& pot,
                                           const Resonance& res, double h,
                                           double x_extent, std::size_t n,
                                           double radius, int n_contour) {
    ResidueProjector out;
    out.z = res.z;
    out.x.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.x[i] = -x_extent + 2.0 * x_extent * i / (n - 1);
    out.kernel = Eigen::MatrixXcd::Zero(n, n);

    const GridSpec gs = choose_jost_grid(pot, res.z, h, 1e-11);
    const SegmentedGrid grid(pot, gs.L, gs.dx);
    for (int m = 0; m < n_contour; ++m) {
        const double phi = 2.0 * M_PI * (m + 0.5) / n_contour;
        const cdouble zc = res.z + radius * std::exp(cdouble(0, phi));
        const cdouble dz = radius * cdouble(0, 1) * std::exp(cdouble(0, phi)) *
                           (2.0 * M_PI / n_contour);
        const EnergyPoint ep{zc, h,
                             zc.imag() >= 0 ? BoundarySide::UpperLimit
                                            : BoundarySide::LowerLimit};
        const ResolventKernel kern(pot, ep, grid);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out.kernel(i, j) += kern.green(out.x[i], out.x[j]) * dz /
                                    cdouble(0, 2.0 * M_PI);
    }
    out.rank_defect = rank_defect_of(out.kernel);
    return out;
}

std::vector<cdouble> barrier_top_predict(double E0, double mu, double h, int K) {
    std::vector<cdouble> out;
    out.reserve(std::max(K, 0));
    for (int k = 0; k < K; ++k)
        out.emplace_back(E0, -h * mu * (0.5 + static_cast<double>(k)));
    return out;
}

WidthScalingFit width_scaling_fit(const Potential& pot, double e_lo,
                                  double e_hi,
                                  const std::vector<double>& h_list) {
    if (h_list.size() < 3)
        throw invalid_parameter("width_scaling_fit: need at least 3 h values");
    WidthScalingFit fit;
    std::vector<double> xs, ys;
    for (double h : h_list) {
        try {
            const Resonance r = find_resonance_near_axis(pot, h, e_lo, e_hi);
            if (!r.refined || r.z.imag() >= 0.0) {
                fit.partial = true;
                continue;
            }
            fit.h_list.push_back(h);
            fit.resonances.push_back(r.z);
            xs.push_back(-1.0 / h);
            ys.push_back(std::log(std::abs(r.z.imag())));
        } catch (const error&) {
            fit.partial = true;
        }
    }
    if (xs.size() < 2)
        throw numerical_failure("width_scaling_fit: too few located resonances");
    const LinearFit lf = fit_line(xs, ys);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.residual = lf.residual;
    return fit;
}

} // namespace semiscat
