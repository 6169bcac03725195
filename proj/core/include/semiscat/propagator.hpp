#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semiscat/jost.hpp"
#include "semiscat/potential.hpp"

namespace semiscat {

/// Symmetric tridiagonal discretization of -h^2 d2/dx2 + V on a Dirichlet
/// box [-L_box, L_box] with n interior points.
struct GridHamiltonian {
    double L_box = 0.0;
    int n_points = 0;
    double dx = 0.0;
    double h = 1.0;
    Eigen::VectorXd diagonal;   // V(x_j) + 2 h^2 / dx^2
    double offdiag = 0.0;       // -h^2 / dx^2
    std::vector<double> x;      // interior nodes

    /// Margin of the sampling rule dx <= h / (10 sqrt(E_max)); values
    /// below 1 mean the rule is violated.
    double resolution_margin = 0.0;
};

/// Assembles the grid Hamiltonian. When enforce_resolution is set, a
/// violation of the sampling rule for the studied window throws
/// resolution_error; a step beyond half a wavelength always throws.
GridHamiltonian build_grid_hamiltonian(const Potential& pot, double h,
                                       double L_box, int n_points,
                                       double e_max,
                                       bool enforce_resolution = true);

/// Full spectral decomposition; eigenvectors are l2-orthonormal columns.
struct SpectralData {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    double h = 1.0;
    double dx = 0.0;
    std::vector<double> x;

    /// Max over pairs of ||H v - lambda v|| relative to ||H||.
    double max_residual(const GridHamiltonian& ham) const;
    double orthonormality_defect(int sample = 64) const;
};

SpectralData diagonalize(const GridHamiltonian& ham);

/// Eigenpairs with eigenvalues in [e_lo, e_hi] only (bisection + inverse
/// iteration). Sufficient for any filtered evolution whose window lies
/// inside the range, at a fraction of the full-diagonalization cost.
SpectralData diagonalize_window(const GridHamiltonian& ham, double e_lo,
                                double e_hi);

/// Smooth spectral window: 1 on |lambda - center| <= halfwidth - smoothing,
/// 0 outside |lambda - center| >= halfwidth. Must be supported in (0, inf).
struct EnergyWindow {
    double center;
    double halfwidth;
    double smoothing;

    EnergyWindow(double c, double hw, double sm);
    double operator()(double lambda) const;
};

/// u(t) = sum_j e^{-i t lambda_j / h} <v_j, u0> v_j; exactly unitary in
/// the discretization.
Eigen::VectorXcd evolve(const SpectralData& sd, const Eigen::VectorXcd& u0,
                        double t);

/// Matrix of chi e^{-itH/h} phi(H) chi restricted to the chi-support
/// subgrid (grid representation; continuum kernels must be scaled by dx
/// before comparison).
struct FilteredEvolution {
    std::vector<int> support;      // indices of the subgrid
    Eigen::MatrixXcd matrix;
    double dx = 0.0;

    double operator_norm(double rel_tol = 1e-8) const;
};

FilteredEvolution filtered_cutoff_evolution(const SpectralData& sd,
                                            const CutoffSpec& chi,
                                            const EnergyWindow& phi, double t);

/// Expansion data for one resonance term: e^{-i t z/h} chi Pi chi.
struct ResonanceTerm {
    cdouble z;
    Eigen::MatrixXcd chi_kernel_chi;  // continuum kernel sampled on the subgrid,
                                      // chi-weighted, NOT yet scaled by dx
};

/// Operator norm of [filtered evolution - sum_{k<K} e^{-itz_k/h} chi Pi_k chi]
/// for each t in t_list.
std::vector<double> resonance_expansion_error(
    const SpectralData& sd, const CutoffSpec& chi, const EnergyWindow& phi,
    const std::vector<ResonanceTerm>& terms, const std::vector<double>& t_list,
    int K);

/// Spectral-norm of a general complex matrix by power iteration on A*A.
double matrix_operator_norm(const Eigen::MatrixXcd& a, double rel_tol = 1e-8,
                            int max_iter = 500);

/// Binary cache of a spectral decomposition, keyed by the caller.
void save_spectral(const SpectralData& sd, const std::string& path);
bool load_spectral(SpectralData& sd, const std::string& path);
std::string spectral_cache_key(const Potential& pot, double h, double L_box,
                               int n_points);

} // namespace semiscat
