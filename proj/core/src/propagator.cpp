#include "semiscat/propagator.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include "semiscat/errors.hpp"

namespace semiscat {

GridHamiltonian build_grid_hamiltonian(const Potential& pot, double h,
                                       double L_box, int n_points,
                                       double e_max, bool enforce_resolution) {
    if (L_box <= 0.0 || n_points < 8)
        throw invalid_parameter("build_grid_hamiltonian: bad box parameters");
    GridHamiltonian ham;
    ham.L_box = L_box;
    ham.n_points = n_points;
    ham.h = h;
    ham.dx = 2.0 * L_box / (n_points + 1);
    const double k_max = std::sqrt(std::max(e_max, 1e-12)) / h;
    ham.resolution_margin = (h / (10.0 * std::sqrt(std::max(e_max, 1e-12)))) / ham.dx;
    if (k_max * ham.dx > 2.0)
        throw resolution_error("build_grid_hamiltonian: fewer than ~3 points per radian");
    if (enforce_resolution && ham.resolution_margin < 1.0)
        throw resolution_error(
            "build_grid_hamiltonian: dx exceeds h/(10 sqrt(E_max)) for the studied window");

    ham.offdiag = -h * h / (ham.dx * ham.dx);
    ham.diagonal.resize(n_points);
    ham.x.resize(n_points);
    for (int j = 0; j < n_points; ++j) {
        ham.x[j] = -L_box + (j + 1) * ham.dx;
        ham.diagonal(j) = pot.evaluate(ham.x[j]) + 2.0 * h * h / (ham.dx * ham.dx);
    }
    return ham;
}

SpectralData diagonalize(const GridHamiltonian& ham) {
    Eigen::VectorXd sub = Eigen::VectorXd::Constant(ham.n_points - 1, ham.offdiag);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(ham.diagonal, sub);
    if (solver.info() != Eigen::Success)
        throw numerical_failure("diagonalize: eigensolver failed");
    SpectralData sd;
    sd.eigenvalues = solver.eigenvalues();
    sd.eigenvectors = solver.eigenvectors();
    sd.h = ham.h;
    sd.dx = ham.dx;
    sd.x = ham.x;
    return sd;
}

SpectralData diagonalize_window(const GridHamiltonian& ham, double e_lo,
                                double e_hi) {
    const int n = ham.n_points;
    std::vector<double> d(ham.diagonal.data(), ham.diagonal.data() + n);
    std::vector<double> e(n - 1, ham.offdiag);
    std::vector<double> w(n);
    Eigen::MatrixXd z(n, n);
    std::vector<lapack_int> isuppz(2 * std::max(1, n));
    lapack_int m = 0;
    const lapack_int info = LAPACKE_dstevr(
        LAPACK_COL_MAJOR, 'V', 'V', n, d.data(), e.data(), e_lo, e_hi, 0, 0,
        0.0, &m, w.data(), z.data(), n, isuppz.data());
    if (info != 0)
        throw numerical_failure("diagonalize_window: dstevr failed");
    SpectralData sd;
    sd.eigenvalues = Eigen::Map<Eigen::VectorXd>(w.data(), m);
    sd.eigenvectors = z.leftCols(m);
    sd.h = ham.h;
    sd.dx = ham.dx;
    sd.x = ham.x;
    return sd;
}

double SpectralData::max_residual(const GridHamiltonian& ham) const {
    const int rows = static_cast<int>(eigenvectors.rows());
    const int cols = static_cast<int>(eigenvalues.size());
    const double hnorm = ham.diagonal.cwiseAbs().maxCoeff() + 2.0 * std::abs(ham.offdiag);
    double worst = 0.0;
    const int stride = std::max(1, cols / 64);
    for (int k = 0; k < cols; k += stride) {
        const auto v = eigenvectors.col(k);
        Eigen::VectorXd hv(rows);
        for (int i = 0; i < rows; ++i) {
            double acc = ham.diagonal(i) * v(i);
            if (i > 0) acc += ham.offdiag * v(i - 1);
            if (i + 1 < rows) acc += ham.offdiag * v(i + 1);
            hv(i) = acc;
        }
        worst = std::max(worst, (hv - eigenvalues(k) * v).norm() / hnorm);
    }
    return worst;
}

double SpectralData::orthonormality_defect(int sample) const {
    const int n = static_cast<int>(eigenvalues.size());
    const int stride = std::max(1, n / sample);
    // columns only; valid for full and windowed decompositions alike
    double worst = 0.0;
    for (int a = 0; a < n; a += stride)
        for (int b = a; b < n; b += stride) {
            const double dot = eigenvectors.col(a).dot(eigenvectors.col(b));
            worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
        }
    return worst;
}

EnergyWindow::EnergyWindow(double c, double hw, double sm)
    : center(c), halfwidth(hw), smoothing(sm) {
    if (!(hw > 0.0 && sm > 0.0 && sm < hw))
        throw invalid_parameter("EnergyWindow: need 0 < smoothing < halfwidth");
    if (c - hw <= 0.0)
        throw invalid_parameter("EnergyWindow: must be supported in (0, inf)");
}

double EnergyWindow::operator()(double lambda) const {
    return PlateauFunction(halfwidth - smoothing, halfwidth)(lambda - center);
}

Eigen::VectorXcd evolve(const SpectralData& sd, const Eigen::VectorXcd& u0,
                        double t) {
    // coeff_k = <v_k, u0>; u(t) = V diag(e^{-i t lambda/h}) coeff
    const Eigen::VectorXcd coeff = sd.eigenvectors.transpose() * u0;
    Eigen::VectorXcd scaled(coeff.size());
    for (int k = 0; k < coeff.size(); ++k)
        scaled(k) = coeff(k) * std::exp(cdouble(0, -t * sd.eigenvalues(k) / sd.h));
    return sd.eigenvectors * scaled;
}

FilteredEvolution filtered_cutoff_evolution(const SpectralData& sd,
                                            const CutoffSpec& chi,
                                            const EnergyWindow& phi, double t) {
    const int n_grid = static_cast<int>(sd.x.size());
    const int n_modes = static_cast<int>(sd.eigenvalues.size());
    FilteredEvolution fe;
    fe.dx = sd.dx;
    std::vector<double> chi_w;
    for (int i = 0; i < n_grid; ++i) {
        const double c = chi(sd.x[i]);
        if (c > 0.0) {
            fe.support.push_back(i);
            chi_w.push_back(c);
        }
    }
    std::vector<int> modes;
    for (int k = 0; k < n_modes; ++k)
        if (phi(sd.eigenvalues(k)) > 1e-14) modes.push_back(k);

    const int m = static_cast<int>(fe.support.size());
    const int K = static_cast<int>(modes.size());
    Eigen::MatrixXd b(m, K);
    for (int a = 0; a < m; ++a)
        for (int k = 0; k < K; ++k)
            b(a, k) = chi_w[a] * sd.eigenvectors(fe.support[a], modes[k]);
    Eigen::VectorXcd d(K);
    for (int k = 0; k < K; ++k) {
        const double lam = sd.eigenvalues(modes[k]);
        d(k) = phi(lam) * std::exp(cdouble(0, -t * lam / sd.h));
    }
    fe.matrix = b * d.asDiagonal() * b.transpose();
    return fe;
}

double matrix_operator_norm(const Eigen::MatrixXcd& a, double rel_tol,
                            int max_iter) {
    const int n = static_cast<int>(a.cols());
    if (n == 0) return 0.0;
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i)
        v(i) = cdouble(1.0 + 0.37 * std::sin(0.7 * i + 0.3), 0.0);
    v.normalize();
    double sigma = 0.0, prev = -1.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXcd w = a * v;
        Eigen::VectorXcd u = a.adjoint() * w;
        const double nu = u.norm();
        if (nu == 0.0) return 0.0;
        sigma = std::sqrt(nu);
        v = u / nu;
        if (prev > 0.0 && std::abs(sigma - prev) <= rel_tol * sigma) return sigma;
        prev = sigma;
    }
    return sigma;
}

double FilteredEvolution::operator_norm(double rel_tol) const {
    return matrix_operator_norm(matrix, rel_tol);
}

std::vector<double> resonance_expansion_error(
    const SpectralData& sd, const CutoffSpec& chi, const EnergyWindow& phi,
    const std::vector<ResonanceTerm>& terms, const std::vector<double>& t_list,
    int K) {
    if (K > static_cast<int>(terms.size()))
        throw dependency_error("resonance_expansion_error: missing resonance data");
    std::vector<double> out;
    out.reserve(t_list.size());
    for (double t : t_list) {
        FilteredEvolution fe = filtered_cutoff_evolution(sd, chi, phi, t);
        Eigen::MatrixXcd diff = fe.matrix;
        for (int k = 0; k < K; ++k) {
            const cdouble amp = std::exp(cdouble(0, -t) * terms[k].z / sd.h);
            diff -= amp * terms[k].chi_kernel_chi * sd.dx;
        }
        out.push_back(matrix_operator_norm(diff));
    }
    return out;
}

void save_spectral(const SpectralData& sd, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) return;
    const std::int64_t n = sd.eigenvalues.size();
    std::fwrite(&n, sizeof(n), 1, f);
    std::fwrite(&sd.h, sizeof(double), 1, f);
    std::fwrite(&sd.dx, sizeof(double), 1, f);
    std::fwrite(sd.x.data(), sizeof(double), n, f);
    std::fwrite(sd.eigenvalues.data(), sizeof(double), n, f);
    std::fwrite(sd.eigenvectors.data(), sizeof(double), n * n, f);
    std::fclose(f);
}

bool load_spectral(SpectralData& sd, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) return false;
    std::int64_t n = 0;
    bool ok = std::fread(&n, sizeof(n), 1, f) == 1 && n > 0 && n < (1 << 20);
    if (ok) {
        sd.x.resize(n);
        sd.eigenvalues.resize(n);
        sd.eigenvectors.resize(n, n);
        ok = std::fread(&sd.h, sizeof(double), 1, f) == 1 &&
             std::fread(&sd.dx, sizeof(double), 1, f) == 1 &&
             std::fread(sd.x.data(), sizeof(double), n, f) ==
                 static_cast<std::size_t>(n) &&
             std::fread(sd.eigenvalues.data(), sizeof(double), n, f) ==
                 static_cast<std::size_t>(n) &&
             std::fread(sd.eigenvectors.data(), sizeof(double), n * n, f) ==
                 static_cast<std::size_t>(n * n);
    }
    std::fclose(f);
    return ok;
}

std::string spectral_cache_key(const Potential& pot, double h, double L_box,
                               int n_points) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "|h=%.17g|L=%.17g|n=%d", h, L_box, n_points);
    const std::string desc = pot.describe() + buf;
    std::uint64_t hash = 1469598103934665603ull;  // FNV-1a
    for (unsigned char c : desc) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

} // namespace semiscat
