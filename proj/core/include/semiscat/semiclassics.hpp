#pragma once

#include <complex>

#include "semiscat/classical.hpp"

namespace semiscat {

using cdouble = std::complex<double>;

/// Principal branch of ln Gamma(z), Lanczos approximation (g = 7, 9
/// coefficients), reflection formula for Re z < 1/2. Relative accuracy
/// ~1e-13 on the strip |Re z| <= 5. Throws pole_error at non-positive
/// integers.
cdouble lngamma(cdouble z);

inline cdouble cgamma(cdouble z) { return std::exp(lngamma(z)); }

/// Rescaled spectral parameter sigma = (lambda - E0) / h.
struct RescaledEnergy {
    double sigma;
    double lambda;
    double E0;
    double h;

    static RescaledEnergy from_lambda(double lambda, double E0, double h) {
        return {(lambda - E0) / h, lambda, E0, h};
    }
};

/// The three closed-form amplitudes entering the homoclinic line shape,
/// evaluated from classical data at rescaled energy sigma. Powers
/// a^{i sigma/mu} are exp(i (sigma/mu) ln a) for a > 0.
struct HomoclinicAmplitudes {
    cdouble Q0;
    cdouble A_amp;
    cdouble B_amp;
};

HomoclinicAmplitudes homoclinic_amplitudes(const HomoclinicData& hd,
                                           double sigma, double h);

/// Leading term of the spectral-shift derivative at a homoclinic energy:
/// (|ln h| / (2 pi mu h)) Re[(2 X A (1-XQ)^-1 + X^2 A Q (1-XQ)^-2 /X^{-1}
/// ... ) / (X^2 A (1-XQ)^-1 - X B)] with X = h^{-i sigma/mu}. The
/// imaginary residual of the quotient is returned via *im_residual; it is
/// expected O(1/|ln h|).
double ssf_homoclinic(const HomoclinicData& hd, double lambda, double h,
                      double* im_residual = nullptr);

/// Lorentzian contribution |Im z| / (pi |lambda - z|^2) of a resonance z.
/// Throws degenerate_peak for real z.
double breit_wigner_peak(cdouble z, double lambda);

/// Residue-projector constant of the k-th barrier-top resonance:
/// h^{-k-1/2} e^{-i pi (k+1/2)/2} mu^{k+1/2} / (sqrt(2 pi) k!).
cdouble projector_constant_ck(int k, double mu, double h);

} // namespace semiscat
