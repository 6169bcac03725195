#include <doctest.h>

#include <cmath>
#include <functional>

#include "semiscat/errors.hpp"
#include "semiscat/resonance.hpp"

using namespace semiscat;

TEST_CASE("free potential has no zeros anywhere") {
    SearchBox box{0.5, 2.0, -0.5, 1e-6, 128};
    CHECK(count_zeros(Potential::free(), box, 0.5) == 0);
}

TEST_CASE("barrier-top ladder: counting, additivity, stability") {
    // gaussian barrier E0 = 1, mu = 2, truncated far out
    const Potential pot = truncate(Potential::gaussian_barrier(1.0, 1.0), 6.0);
    const double h = 0.1;
    DeterminantEvaluator det(pot, h, 1.3);

    // box around z0 = 1 - 0.1i of radius h mu / 2 = 0.1
    SearchBox box{0.9, 1.1, -0.2, 1e-6, 256};
    CHECK(count_zeros(det, box) == 1);

    // additivity under splitting
    SearchBox left = box, right = box;
    left.re_max = 1.0;
    right.re_min = 1.0;
    CHECK(count_zeros(det, left) + count_zeros(det, right) == 1);

    // contour refinement stability
    SearchBox fine = box;
    fine.contour_points = 512;
    CHECK(count_zeros(det, fine) == 1);
}

TEST_CASE("barrier-top resonances approach the ladder") {
    const Potential pot = truncate(Potential::gaussian_barrier(1.0, 1.0), 6.0);
    const double h = 0.1, mu = 2.0;
    SearchBox box{0.8, 1.2, -0.4, 1e-6, 256};
    const auto found = find_resonances(pot, box, h);
    REQUIRE(found.size() == 2);
    for (const auto& r : found) {
        CHECK(r.refined);
        CHECK(r.multiplicity == 1);
        // determinant noise grows like e^{2 |Im sqrt z| L / h} down the
        // ladder: the first rung reaches 1e-8, the second sits higher
        CHECK(r.newton_residual < (r.width < 0.3 ? 1e-8 : 1e-4));
        CHECK(r.z.imag() < 1e-10);  // no upper-half-plane zeros
    }
    // match by distance against the ladder prediction
    const auto pred = barrier_top_predict(1.0, mu, h, 2);
    for (int k = 0; k < 2; ++k) {
        double best = 1e9;
        for (const auto& r : found) best = std::min(best, std::abs(r.z - pred[k]));
        CHECK(best < 0.5 * h * h * 10.0);
    }
    // widths grow down the ladder
    const double w0 = std::min(found[0].width, found[1].width);
    const double w1 = std::max(found[0].width, found[1].width);
    CHECK(w1 > 2.0 * w0);
}

TEST_CASE("prediction plumbing") {
    const auto two = barrier_top_predict(1.0, 2.0, 0.1, 2);
    REQUIRE(two.size() == 2);
    CHECK(std::abs(two[0] - cdouble(1.0, -0.1)) < 1e-15);
    CHECK(std::abs(two[1] - cdouble(1.0, -0.3)) < 1e-15);
    CHECK(barrier_top_predict(1.0, 2.0, 0.1, 0).empty());
}

TEST_CASE("square-well bound states match the transcendental oracle") {
    const double v0 = 1.0, a = 1.0, h = 0.5;
    const Potential pot = Potential::square_barrier(-v0, a);

    // oracle roots of the pole-free even/odd conditions
    auto even_f = [&](double B) {
        const double q = std::sqrt(v0 - B) / h, kap = std::sqrt(B) / h;
        return q * std::sin(q * a) - kap * std::cos(q * a);
    };
    auto odd_f = [&](double B) {
        const double q = std::sqrt(v0 - B) / h, kap = std::sqrt(B) / h;
        return q * std::cos(q * a) + kap * std::sin(q * a);
    };
    std::vector<double> oracle;
    std::vector<std::function<double(double)>> conds{even_f, odd_f};
    for (const auto& f : conds) {
        double prev_b = 1e-4;
        double prev = f(prev_b);
        for (double B = 1e-4; B < v0 - 1e-6; B += 1e-4) {
            const double cur = f(B);
            if (prev * cur < 0.0) {
                double lo = prev_b, hi = B;
                for (int it = 0; it < 80; ++it) {
                    const double m = 0.5 * (lo + hi);
                    (f(lo) * f(m) <= 0.0 ? hi : lo) = m;
                }
                oracle.push_back(-0.5 * (lo + hi));
            }
            prev_b = B;
            prev = cur;
        }
    }
    std::sort(oracle.begin(), oracle.end());

    const auto found = find_bound_states(pot, h, 1e-3, v0 - 1e-3);
    REQUIRE(found.size() == oracle.size());
    for (std::size_t i = 0; i < found.size(); ++i) {
        CHECK(found[i].kind == ResonanceKind::BoundState);
        CHECK(found[i].z.real() == doctest::Approx(oracle[i]).epsilon(1e-8));
    }
}

TEST_CASE("residue projector at the first barrier-top resonance") {
    const Potential pot = truncate(Potential::gaussian_barrier(1.0, 1.0), 6.0);
    const double h = 0.1;
    SearchBox box{0.9, 1.1, -0.2, 1e-6, 256};
    const auto found = find_resonances(pot, box, h);
    REQUIRE(found.size() == 1);

    const std::size_t n = 41;
    const double extent = 1.5;
    const ResidueProjector pi_f = residue_projector(pot, found[0], h, extent, n);

    // kernel symmetry: f- and f+ are proportional at the zero
    double sym = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            sym = std::max(sym, std::abs(pi_f.kernel(i, j) - pi_f.kernel(j, i)));
            scale = std::max(scale, std::abs(pi_f.kernel(i, j)));
        }
    CHECK(sym < 1e-5 * scale);

    // contour-integral route agrees within 1e-4 relative Frobenius norm
    const ResidueProjector pi_c = residue_projector_contour(
        pot, found[0], h, extent, n, 0.5 * h, 64);
    CHECK(pi_c.rank_defect < 1e-6);
    const double rel = (pi_f.kernel - pi_c.kernel).norm() / pi_c.kernel.norm();
    CHECK(rel < 1e-4);

    // trace route: quadrature trace of the kernel vs contour trace
    cdouble tr_f(0, 0), tr_c(0, 0);
    const double dx = 2.0 * extent / (n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        tr_f += pi_f.kernel(i, i) * dx;
        tr_c += pi_c.kernel(i, i) * dx;
    }
    CHECK(std::abs(tr_f - tr_c) < 1e-4 * std::abs(tr_c));

    CHECK_THROWS_AS(residue_projector(pot, Resonance{found[0].z, 0.1, 2}, h, 1.0, 9),
                    unsupported_multiplicity);
}

TEST_CASE("near-axis search finds the island resonance") {
    const Potential pot = truncate(Potential::well_in_island(), 8.0);
    const double h = 0.08;
    const Resonance r = find_resonance_near_axis(pot, h, 0.075, 0.13);
    CHECK(r.refined);
    CHECK(r.z.imag() < 0.0);
    CHECK(r.z.imag() > -1e-2);
    CHECK(r.z.real() > 0.075);
    CHECK(r.z.real() < 0.13);
    CHECK(r.newton_residual < 1e-8);
}
