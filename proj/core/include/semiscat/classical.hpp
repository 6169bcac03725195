#pragma once

#include <vector>

#include "semiscat/potential.hpp"

namespace semiscat {

/// Point of the phase space of p(x, xi) = xi^2 + V(x). The Hamiltonian
/// vector field is (2 xi, -V'(x)), so positions move at speed 2 xi.
struct PhasePoint {
    double x = 0.0;
    double xi = 0.0;
};

inline double classical_energy(const Potential& pot, const PhasePoint& p) {
    return p.xi * p.xi + pot.evaluate(p.x);
}

/// Leapfrog (kick-drift-kick) flow of the Hamiltonian field for time t.
PhasePoint flow(const Potential& pot, PhasePoint p0, double t,
                double dt = 1e-3);

/// Sampled trajectory (t_i, x_i, xi_i), dt-uniform.
struct Trajectory {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> xi;
};

Trajectory flow_trajectory(const Potential& pot, PhasePoint p0, double t_max,
                           double dt = 1e-3);

/// Finite-time surrogate of trapped-set membership: |x(t)| stays within
/// escape_radius for all |t| <= t_max.
bool is_trapped(const Potential& pot, PhasePoint p0, double t_max = 100.0,
                double escape_radius = 50.0, double dt = 1e-3);

/// Classical constants of a barrier top with a homoclinic loop on the
/// left: hyperbolic exponent mu, loop action A0, asymptotic constants of
/// the homoclinic orbit (g0_minus, g0_plus, both negative) and of the
/// incoming/outgoing trajectories on the right (g_in = g_out > 0), plus
/// the regularized actions of the right trajectories and of the fully
/// reflected trajectory on the far left.
struct HomoclinicData {
    double E0 = 0.0;           // barrier-top energy V(0)
    double mu = 0.0;           // sqrt(-2 V''(0))
    double A0 = 0.0;           // loop action, 2 Int sqrt(E0 - V)
    double g0_minus = 0.0;
    double g0_plus = 0.0;
    double g_in = 0.0;
    double g_out = 0.0;
    double A_in = 0.0;         // = A_out
    double A_out = 0.0;
    double A_ell = 0.0;        // reflected trajectory on the left
    double T_ell = 0.0;        // time shift between its two parameterizations
    double x_loop = 0.0;       // turning point of the homoclinic loop
    double x_ell = 0.0;        // turning point of the reflected trajectory
    double fit_residual = 0.0; // rms residual of the exponent fits
};

/// Extracts HomoclinicData for a potential with a nondegenerate local
/// maximum at x = 0 and a homoclinic loop on the left (the layout of the
/// double_structure family). Throws geometry_error when the turning-point
/// scan finds no loop.
HomoclinicData homoclinic_data(const Potential& pot, double flow_dt = 2e-4);

/// Agmon distance Int_a^b sqrt((V - E)_+) dx. V must not drop below E in
/// the interior (invalid_barrier otherwise); endpoint square-root zeros
/// are handled by substitution.
double agmon_distance(const Potential& pot, double E, double a, double b,
                      double tol = 1e-10);

} // namespace semiscat
