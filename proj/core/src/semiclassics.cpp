#include "semiscat/semiclassics.hpp"

#include <cmath>

#include "semiscat/errors.hpp"

namespace semiscat {

namespace {

// Lanczos g = 7, n = 9 coefficient set
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

constexpr double kLnSqrt2Pi = 0.91893853320467274178;  // ln sqrt(2 pi)

cdouble lngamma_core(cdouble z) {
    // valid for Re z >= 1/2; z shifted down by one for the series
    z -= 1.0;
    cdouble acc = kLanczos[0];
    for (int i = 1; i < 9; ++i) acc += kLanczos[i] / (z + static_cast<double>(i));
    const cdouble t = z + kLanczosG + 0.5;
    return kLnSqrt2Pi + (z + 0.5) * std::log(t) - t + std::log(acc);
}

} // namespace

cdouble lngamma(cdouble z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 &&
        z.real() == std::floor(z.real()))
        throw pole_error("lngamma: pole at non-positive integer");
    if (z.real() >= 0.5) return lngamma_core(z);
    // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
    const cdouble lnpi(1.1447298858494001741, 0.0);
    // log(sin(pi z)) computed stably for large |Im z|
    const cdouble iz = cdouble(0, 1) * M_PI * z;
    cdouble log_sin;
    if (z.imag() > 10.0) {
        log_sin = -iz + std::log((std::exp(2.0 * iz) - 1.0) / cdouble(0, 2));
    } else if (z.imag() < -10.0) {
        log_sin = iz + std::log((1.0 - std::exp(-2.0 * iz)) / cdouble(0, 2));
    } else {
        log_sin = std::log(std::sin(M_PI * z));
    }
    return lnpi - log_sin - lngamma_core(1.0 - z);
}

HomoclinicAmplitudes homoclinic_amplitudes(const HomoclinicData& hd,
                                           double sigma, double h) {
    if (!(hd.mu > 0.0))
        throw invalid_parameter("homoclinic_amplitudes: mu must be positive");
    if (hd.g0_minus == 0.0 || hd.g0_plus == 0.0 || hd.g_in == 0.0 || hd.g_out == 0.0)
        throw invalid_parameter("homoclinic_amplitudes: vanishing g constant");

    const double s = sigma / hd.mu;
    const cdouble gamma_half = cgamma(cdouble(0.5, -s));
    const cdouble phase_action = std::exp(cdouble(0, hd.A0 / h));
    const auto ipow = [&](double a) {  // a^{i s} for a > 0
        return std::exp(cdouble(0, s * std::log(a)));
    };
    const double g0p = std::abs(hd.g0_plus), g0m = std::abs(hd.g0_minus);
    const double gin = std::abs(hd.g_in), gout = std::abs(hd.g_out);
    constexpr double inv_sqrt_2pi = 0.39894228040143267794;

    HomoclinicAmplitudes amp;
    amp.Q0 = phase_action * gamma_half * inv_sqrt_2pi *
             std::exp(-0.5 * M_PI * s) * ipow(hd.mu * g0p * g0m);
    amp.A_amp = phase_action * gamma_half * gamma_half * cdouble(0, 1) /
                (2.0 * M_PI) * std::exp(M_PI * s) *
                ipow(hd.mu * hd.mu * gin * gout * g0m * g0p);
    amp.B_amp = gamma_half * cdouble(0, 1) * inv_sqrt_2pi *
                std::exp(-0.5 * M_PI * s) * ipow(hd.mu * gout * gin);
    return amp;
}

double ssf_homoclinic(const HomoclinicData& hd, double lambda, double h,
                      double* im_residual) {
    const double sigma = (lambda - hd.E0) / h;
    const HomoclinicAmplitudes amp = homoclinic_amplitudes(hd, sigma, h);
    const double s = sigma / hd.mu;
    // h^{-i sigma/mu} = exp(-i s ln h); ln h < 0 for h < 1
    const cdouble X = std::exp(cdouble(0, -s * std::log(h)));
    const cdouble one_minus = 1.0 - X * amp.Q0;
    if (std::abs(one_minus) < 1e-12)
        throw numerical_failure("ssf_homoclinic: at a quantization zero");
    const cdouble inv = 1.0 / one_minus;
    const cdouble X2 = X * X, X3 = X2 * X;
    const cdouble numer =
        2.0 * X2 * amp.A_amp * inv + X3 * amp.A_amp * amp.Q0 * inv * inv -
        X * amp.B_amp;
    const cdouble denom = X2 * amp.A_amp * inv - X * amp.B_amp;
    const cdouble quotient = numer / denom;
    const double prefactor = std::abs(std::log(h)) / (2.0 * M_PI * hd.mu * h);
    if (im_residual) *im_residual = prefactor * quotient.imag();
    return prefactor * quotient.real();
}

double breit_wigner_peak(cdouble z, double lambda) {
    if (z.imag() == 0.0)
        throw degenerate_peak("breit_wigner_peak: resonance on the real axis");
    const double d2 = std::norm(lambda - z);
    return std::abs(z.imag()) / (M_PI * d2);
}

cdouble projector_constant_ck(int k, double mu, double h) {
    if (k < 0) throw invalid_parameter("projector_constant_ck: k >= 0 required");
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= static_cast<double>(i);
    const double mag = std::pow(h, -k - 0.5) * std::pow(mu, k + 0.5) /
                       (std::sqrt(2.0 * M_PI) * kfact);
    const double phase = -0.5 * M_PI * (static_cast<double>(k) + 0.5);
    return mag * std::exp(cdouble(0, phase));
}

} // namespace semiscat
