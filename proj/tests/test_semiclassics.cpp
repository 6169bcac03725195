#include <doctest.h>

#include <cmath>

#include "semiscat/errors.hpp"
#include "semiscat/numerics.hpp"
#include "semiscat/semiclassics.hpp"

using namespace semiscat;
using namespace std::complex_literals;

TEST_CASE("log-gamma classical values") {
    CHECK(std::abs(lngamma(cdouble(1.0, 0.0))) < 1e-14);
    CHECK(lngamma(cdouble(0.5, 0.0)).real() ==
          doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-14));
    CHECK(std::abs(cgamma(cdouble(5.0, 0.0)) - 24.0) < 1e-12 * 24.0);
    CHECK_THROWS_AS(lngamma(cdouble(-3.0, 0.0)), pole_error);
}

TEST_CASE("modulus identity |Gamma(1/2 - i s)|^2 cosh(pi s) = pi") {
    for (double s = -10.0; s <= 10.0; s += 0.37) {
        const cdouble g = cgamma(cdouble(0.5, -s));
        const double lhs = std::norm(g) * std::cosh(M_PI * s) / M_PI;
        CHECK(lhs == doctest::Approx(1.0).epsilon(1e-10));
    }
    // the frozen spot check at s = 2
    const cdouble g2 = cgamma(cdouble(0.5, -2.0));
    CHECK(std::norm(g2) == doctest::Approx(M_PI / std::cosh(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("reflection consistency off the strip") {
    // Gamma(z) Gamma(1-z) sin(pi z) = pi at a generic complex point
    const cdouble z(0.3, 1.7);
    const cdouble lhs = cgamma(z) * cgamma(1.0 - z) * std::sin(M_PI * z);
    CHECK(std::abs(lhs - M_PI) < 1e-11);
}

namespace {

HomoclinicData synthetic_data() {
    HomoclinicData hd;
    hd.E0 = 1.0;
    hd.mu = 2.0;
    hd.A0 = 5.3;
    hd.g0_minus = -1.4;
    hd.g0_plus = -1.4;
    hd.g_in = 2.2;
    hd.g_out = 2.2;
    return hd;
}

} // namespace

TEST_CASE("amplitudes at sigma = 0") {
    const HomoclinicData hd = synthetic_data();
    const HomoclinicAmplitudes amp = homoclinic_amplitudes(hd, 0.0, 0.05);
    // |Gamma(1/2)| / sqrt(2 pi) = 1/sqrt(2)
    CHECK(std::abs(amp.Q0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(amp.B_amp) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    // |A| = |Gamma(1/2)^2| / (2 pi) = 1/2
    CHECK(std::abs(amp.A_amp) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("action shift rotates Q0 by exactly dA0/h") {
    HomoclinicData hd = synthetic_data();
    const double h = 0.02, sigma = 1.3, dA = 0.77;
    const HomoclinicAmplitudes a1 = homoclinic_amplitudes(hd, sigma, h);
    hd.A0 += dA;
    const HomoclinicAmplitudes a2 = homoclinic_amplitudes(hd, sigma, h);
    const cdouble rot = a2.Q0 / a1.Q0;
    CHECK(std::abs(rot - std::exp(1.0i * dA / h)) < 1e-12);
    // B does not carry the action phase
    CHECK(std::abs(a2.B_amp - a1.B_amp) < 1e-14);
}

TEST_CASE("conjugation metamorphic relation") {
    // all sigma dependence enters through s = sigma/mu via Gamma(1/2 - i s),
    // e^{c s} and a^{i s}: flipping sigma conjugates everything except the
    // fixed phases, so |Q0(sigma)| |Q0(-sigma)| = |Gamma|^2-pattern holds
    const HomoclinicData hd = synthetic_data();
    const double h = 0.03;
    for (double sigma : {0.4, 1.1, 2.7}) {
        const auto ap = homoclinic_amplitudes(hd, sigma, h);
        const auto am = homoclinic_amplitudes(hd, -sigma, h);
        const double s = sigma / hd.mu;
        // |Q0|^2 = 1 / (1 + e^{2 pi s}); check the product identity
        const double expect_p = 1.0 / (1.0 + std::exp(2.0 * M_PI * s));
        const double expect_m = 1.0 / (1.0 + std::exp(-2.0 * M_PI * s));
        CHECK(std::norm(ap.Q0) == doctest::Approx(expect_p).epsilon(1e-11));
        CHECK(std::norm(am.Q0) == doctest::Approx(expect_m).epsilon(1e-11));
    }
}

TEST_CASE("homoclinic line shape: oscillation period and scale") {
    const HomoclinicData hd = synthetic_data();
    // formula-level evaluation is cheap: use a tiny h so the |ln h| spacing
    // approximation dominates the O(1) geometry corrections
    const double h = 1e-10;
    const double spacing_pred = 2.0 * M_PI * hd.mu * h / std::abs(std::log(h));

    std::vector<double> lam, val;
    const double win = 5.0 * h;
    for (double l = hd.E0 - win; l <= hd.E0 + win; l += spacing_pred / 60.0) {
        lam.push_back(l);
        val.push_back(ssf_homoclinic(hd, l, h));
    }
    const auto peaks = local_maxima(val);
    REQUIRE(peaks.size() >= 3);
    std::vector<double> pos;
    for (auto i : peaks) pos.push_back(refine_peak(lam, val, i));
    for (std::size_t i = 0; i + 1 < pos.size(); ++i) {
        const double spacing = pos[i + 1] - pos[i];
        CHECK(spacing == doctest::Approx(spacing_pred).epsilon(0.15));
    }

    // scale of local maxima tracks |ln h| / (2 pi mu h) on the smooth side
    // above E0 (below it the quantization peaks are legitimately sharp)
    auto smooth_max = [&](double hh) {
        std::vector<double> l2, v2;
        const double sp = 2.0 * M_PI * hd.mu * hh / std::abs(std::log(hh));
        for (double l = hd.E0; l <= hd.E0 + 5.0 * hh; l += sp / 60.0) {
            l2.push_back(l);
            v2.push_back(ssf_homoclinic(hd, l, hh));
        }
        double m = 0.0;
        for (auto i : local_maxima(v2)) m = std::max(m, v2[i]);
        return m;
    };
    const double scale = std::abs(std::log(h)) / (2.0 * M_PI * hd.mu * h);
    const double vmax = smooth_max(h);
    CHECK(vmax / scale > 0.2);
    CHECK(vmax / scale < 10.0);
    // proportionality of the peak scale under a change of h
    const double h2 = 1e-8;
    const double scale2 = std::abs(std::log(h2)) / (2.0 * M_PI * hd.mu * h2);
    CHECK(smooth_max(h2) / scale2 == doctest::Approx(vmax / scale).epsilon(0.2));

    // doubling mu halves the sigma-frequency: spacing in lambda doubles
    HomoclinicData hd2 = synthetic_data();
    hd2.mu *= 2.0;
    std::vector<double> lam2, val2;
    for (double l = hd.E0 - win; l <= hd.E0 + win; l += spacing_pred / 60.0) {
        lam2.push_back(l);
        val2.push_back(ssf_homoclinic(hd2, l, h));
    }
    const auto peaks2 = local_maxima(val2);
    REQUIRE(peaks2.size() >= 2);
    const double spacing2 =
        (lam2[peaks2.back()] - lam2[peaks2.front()]) / (peaks2.size() - 1);
    CHECK(spacing2 == doctest::Approx(2.0 * spacing_pred).epsilon(0.25));

    // imaginary residual of the quotient stays small relative to the value
    double imres = 0.0;
    ssf_homoclinic(hd, hd.E0 + h, h, &imres);
    CHECK(std::abs(imres) < scale);
}

TEST_CASE("Breit-Wigner profile") {
    const cdouble z(1.0, -0.01);
    CHECK(breit_wigner_peak(z, 1.0) ==
          doctest::Approx(1.0 / (M_PI * 0.01)).epsilon(1e-12));
    // half maximum at one width off center
    CHECK(breit_wigner_peak(z, 1.01) ==
          doctest::Approx(0.5 / (M_PI * 0.01)).epsilon(1e-12));
    CHECK(breit_wigner_peak(z, 0.99) ==
          doctest::Approx(breit_wigner_peak(z, 1.01)).epsilon(1e-12));
    // total mass over +-50 full widths (width = 2 |Im z|)
    double mass = 0.0;
    const double w = 2.0 * 0.01, dl = w / 400.0;
    for (double l = 1.0 - 50.0 * w; l <= 1.0 + 50.0 * w; l += dl)
        mass += breit_wigner_peak(z, l) * dl;
    CHECK(mass >= 0.99);
    CHECK(mass <= 1.01);
    CHECK_THROWS_AS(breit_wigner_peak(cdouble(1.0, 0.0), 1.0), degenerate_peak);
}

TEST_CASE("projector constants") {
    const cdouble c0 = projector_constant_ck(0, 1.0, 1.0);
    const cdouble expect = std::exp(-1.0i * M_PI / 4.0) / std::sqrt(2.0 * M_PI);
    CHECK(std::abs(c0 - expect) < 1e-14);

    const double mu = 1.7, h = 0.05;
    const cdouble c1 = projector_constant_ck(1, mu, h);
    CHECK(std::abs(c1 / projector_constant_ck(0, mu, h)) ==
          doctest::Approx(mu / h).epsilon(1e-12));
    // successive constants rotate by -pi/2
    const cdouble ratio = c1 / projector_constant_ck(0, mu, h);
    CHECK(std::arg(ratio) == doctest::Approx(-M_PI / 2.0).epsilon(1e-12));
}
