#include <doctest.h>

#include <cmath>

#include "semiscat/comparison.hpp"
#include "semiscat/errors.hpp"

using namespace semiscat;

TEST_CASE("truncating inside an already compact support changes nothing") {
    // base supported in |x| < 1: both truncations reproduce it exactly
    const Potential base = Potential::square_barrier(0.8, 1.0);
    const CutoffSpec chi{0.5, 0.9, 1.0};
    // R = 2: plateau is 1 on [-2, 2] containing the support
    const ResolventDifference d =
        resolvent_difference(base, 2.0, 8.0, 0.3, 1.0, chi, false);
    CHECK(d.diff_norm < 1e-13 * d.q_weighted_norm);
}

TEST_CASE("identity route agrees with direct subtraction at large h") {
    const Potential base = Potential::power_tail(0.75, 2.0);
    const CutoffSpec chi{1.0, 2.0, 1.0};
    const double h = 0.5, lambda = 1.0;
    const ResolventDifference d =
        resolvent_difference(base, 4.0, 12.0, h, lambda, chi, false);
    const double direct =
        resolvent_difference_direct(base, 4.0, 12.0, h, lambda, chi, 600);
    CHECK(d.diff_norm == doctest::Approx(direct).epsilon(2e-3));
    CHECK(d.diff_norm > 0.0);
}

TEST_CASE("difference norm is bilinear in the cutoff amplitude") {
    const Potential base = Potential::power_tail(0.75, 2.0);
    CutoffSpec chi{1.0, 2.0, 1.0};
    const ResolventDifference d1 =
        resolvent_difference(base, 4.0, 12.0, 0.4, 1.0, chi, false);
    chi.amplitude = 2.0;
    const ResolventDifference d2 =
        resolvent_difference(base, 4.0, 12.0, 0.4, 1.0, chi, false);
    CHECK(d2.diff_norm == doctest::Approx(4.0 * d1.diff_norm).epsilon(1e-9));
}

TEST_CASE("direct kernel subtraction is symmetric under swapping the operators") {
    const Potential base = Potential::power_tail(0.75, 2.0);
    const CutoffSpec chi{1.0, 2.0, 1.0};
    const double h = 0.5, lambda = 1.0;
    // swap means comparing (R_outer, R) against (R, R_outer): the kernel
    // difference changes sign, the norm does not
    const Potential p1 = truncate(base, 12.0), p2 = truncate(base, 4.0);
    const EnergyPoint ep = EnergyPoint::upper(lambda, h);
    const ResolventKernel k1 = make_resolvent_kernel(p1, ep);
    const ResolventKernel k2 = make_resolvent_kernel(p2, ep);
    double n12 = 0.0, n21 = 0.0;
    for (double x : {-1.5, -0.3, 0.7})
        for (double y : {-0.9, 0.2, 1.1}) {
            n12 = std::max(n12, std::abs(k1.green(x, y) - k2.green(x, y)));
            n21 = std::max(n21, std::abs(k2.green(x, y) - k1.green(x, y)));
        }
    CHECK(n12 == doctest::Approx(n21).epsilon(1e-15));
}

TEST_CASE("superpoly fit on synthetic laws") {
    // exact power law h^3
    std::vector<std::pair<double, double>> cubic;
    for (double h : {0.4, 0.2, 0.1, 0.05})
        cubic.emplace_back(h, std::pow(h, 3.0));
    const DecayFit f3 = superpoly_fit(cubic);
    CHECK(f3.exponent == doctest::Approx(3.0).epsilon(0.01));
    for (double w : f3.windowed) CHECK(w == doctest::Approx(3.0).epsilon(0.01));

    // e^{-1/h}: windowed exponents increase as h decreases
    std::vector<std::pair<double, double>> expo;
    for (double h : {0.4, 0.2, 0.1, 0.05})
        expo.emplace_back(h, std::exp(-1.0 / h));
    const DecayFit fe = superpoly_fit(expo);
    for (std::size_t i = 0; i + 1 < fe.windowed.size(); ++i)
        CHECK(fe.windowed[i + 1] > fe.windowed[i]);

    // constants give exponent zero
    std::vector<std::pair<double, double>> flat;
    for (double h : {0.4, 0.2, 0.1, 0.05}) flat.emplace_back(h, 2.5);
    CHECK(superpoly_fit(flat).exponent == doctest::Approx(0.0).epsilon(1e-12));

    // nonpositive differences are rejected
    std::vector<std::pair<double, double>> bad{{0.4, 1.0}, {0.2, 0.0}, {0.1, 1.0}, {0.05, 1.0}};
    CHECK_THROWS_AS(superpoly_fit(bad), degenerate_fit);
}

TEST_CASE("weighted inequalities on the free potential scale like 1/h") {
    // free resolvent kernel modulus 1/(2 h sqrt(lambda)): every weighted
    // norm is proportional to 1/h and the a17 ratio is h-independent
    const double lambda = 1.0;
    const Potential v0 = Potential::free();
    WeightedInequalityReport r1 = weighted_inequalities(v0, lambda, 0.2, 1.0, 4.0, 60.0);
    WeightedInequalityReport r2 = weighted_inequalities(v0, lambda, 0.1, 1.0, 4.0, 60.0);
    CHECK(r2.interior_norm / r1.interior_norm == doctest::Approx(2.0).epsilon(0.05));
    CHECK(r2.a17_ratio == doctest::Approx(r1.a17_ratio).epsilon(0.05));
    CHECK(r1.a13_ratio > 0.0);
    CHECK(r1.interpolation_lhs <= r1.interior_norm * (1 + 1e-9));
    CHECK_THROWS_AS(weighted_inequalities(v0, lambda, 0.2, 0.4, 4.0), invalid_parameter);
}

TEST_CASE("propagator difference vanishes when both truncations cover the support") {
    const Potential base = Potential::square_barrier(0.5, 1.0);
    const CutoffSpec chi{1.0, 2.0, 1.0};
    const EnergyWindow phi(1.0, 0.3, 0.15);
    const PropagatorDifference pd = propagator_difference(
        base, 3.0, 6.0, 0.2, 30.0, 700, chi, phi, {0.0, 2.0, 5.0});
    CHECK(pd.sup_norm < 1e-10);
}

TEST_CASE("propagator difference rejects a box smaller than the causal budget") {
    const Potential base = Potential::power_tail(0.5, 2.0);
    const CutoffSpec chi{1.0, 2.0, 1.0};
    const EnergyWindow phi(1.0, 0.3, 0.15);
    CHECK_THROWS_AS(propagator_difference(base, 3.0, 6.0, 0.2, 10.0, 700, chi, phi,
                                          {0.0, 20.0}),
                    configuration_error);
}
