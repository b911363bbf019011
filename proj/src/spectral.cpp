#include "qst/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace qst {

SpectralDecomposition::SpectralDecomposition(Eigen::VectorXd eigenvalues,
                                             Eigen::MatrixXd eigenvectors)
    : eigenvalues_(std::move(eigenvalues)), eigenvectors_(std::move(eigenvectors)) {
    if (eigenvectors_.rows() != eigenvalues_.size() || eigenvectors_.cols() != eigenvalues_.size())
        throw std::invalid_argument("spectral decomposition: shape mismatch");
}

namespace {

bool reflection_symmetric(const SingleParticleHamiltonian& h) {
    const Eigen::Index n = h.diagonal.size();
    for (Eigen::Index i = 0; i < n / 2; ++i)
        if (h.diagonal[i] != h.diagonal[n - 1 - i]) return false;
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        if (h.off_diagonal[i] != h.off_diagonal[n - 2 - i]) return false;
    return true;
}

// Diagonalizes the even and odd blocks of a reflection-symmetric matrix
// separately, so every mode satisfies u(N+1-i) = +-u(i) exactly.
SpectralDecomposition decompose_by_parity(const SingleParticleHamiltonian& h) {
    const Eigen::Index n = h.diagonal.size(), m = n / 2;
    const bool odd = n % 2 == 1;
    const double r2 = std::sqrt(2.0);

    Eigen::VectorXd de = h.diagonal.head(m + (odd ? 1 : 0)), ee = Eigen::VectorXd::Zero(de.size());
    Eigen::VectorXd dodd = h.diagonal.head(m), eodd = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i + 1 < m; ++i) ee[i] = eodd[i] = h.off_diagonal[i];
    if (odd) {
        ee[m - 1] = r2 * h.off_diagonal[m - 1];
    } else {
        de[m - 1] += h.off_diagonal[m - 1];
        dodd[m - 1] -= h.off_diagonal[m - 1];
    }
    const auto even_modes = tridiagonal_eigen<double>(de, ee);
    const auto odd_modes = tridiagonal_eigen<double>(dodd, eodd);

    struct Mode {
        double lambda;
        Eigen::VectorXd u;
    };
    std::vector<Mode> modes;
    modes.reserve(n);
    for (Eigen::Index k = 0; k < even_modes.eigenvalues.size(); ++k) {
        Eigen::VectorXd u(n);
        const auto& x = even_modes.eigenvectors.col(k);
        for (Eigen::Index i = 0; i < m; ++i) u[i] = u[n - 1 - i] = x[i] / r2;
        if (odd) u[m] = x[m];
        modes.push_back({even_modes.eigenvalues[k], std::move(u)});
    }
    for (Eigen::Index k = 0; k < odd_modes.eigenvalues.size(); ++k) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
        const auto& x = odd_modes.eigenvectors.col(k);
        for (Eigen::Index i = 0; i < m; ++i) {
            u[i] = x[i] / r2;
            u[n - 1 - i] = -x[i] / r2;
        }
        modes.push_back({odd_modes.eigenvalues[k], std::move(u)});
    }
    std::stable_sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) { return a.lambda < b.lambda; });

    Eigen::VectorXd lambda(n);
    Eigen::MatrixXd vectors(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        lambda[k] = modes[k].lambda;
        vectors.col(k) = modes[k].u;
    }
    return SpectralDecomposition(std::move(lambda), std::move(vectors));
}

}  // namespace

SpectralDecomposition decompose(const SingleParticleHamiltonian& h) {
    if (h.diagonal.size() >= 2 && reflection_symmetric(h)) return decompose_by_parity(h);
    auto eig = tridiagonal_eigen<double>(h.diagonal, h.off_diagonal);
    return SpectralDecomposition(std::move(eig.eigenvalues), std::move(eig.eigenvectors));
}

SpectralDecomposition decompose(const ChainSpec& spec) {
    return decompose(hamiltonian_matrix(spec));
}

void check_site(const SpectralDecomposition& sd, int site) {
    if (site < 1 || site > sd.sites())
        throw std::out_of_range("site " + std::to_string(site) + " outside [1, " +
                                std::to_string(sd.sites()) + "]");
}

Eigen::VectorXcd phase_factors(const SpectralDecomposition& sd, double t) {
    const auto& lambda = sd.eigenvalues();
    Eigen::VectorXcd p(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) p[k] = std::polar(1.0, -lambda[k] * t);
    return p;
}

Complex amplitude_1p(const SpectralDecomposition& sd, const Eigen::VectorXcd& phases, int target,
                     int source) {
    check_site(sd, target);
    check_site(sd, source);
    const auto& u = sd.eigenvectors();
    Complex sum = 0.0;
    for (int k = 0; k < sd.sites(); ++k) sum += (u(target - 1, k) * u(source - 1, k)) * phases[k];
    return sum;
}

Complex amplitude_1p(const SpectralDecomposition& sd, int target, int source, double t) {
    return amplitude_1p(sd, phase_factors(sd, t), target, source);
}

Eigen::VectorXcd amplitude_row(const SpectralDecomposition& sd, const Eigen::VectorXcd& phases,
                               int source) {
    check_site(sd, source);
    const auto& u = sd.eigenvectors();
    Eigen::VectorXcd weighted = phases.cwiseProduct(u.row(source - 1).transpose().cast<Complex>());
    return u.cast<Complex>() * weighted;
}

Eigen::VectorXcd amplitude_row(const SpectralDecomposition& sd, int source, double t) {
    return amplitude_row(sd, phase_factors(sd, t), source);
}

Eigen::MatrixXcd propagator(const SpectralDecomposition& sd, double t) {
    const Eigen::MatrixXcd u = sd.eigenvectors().cast<Complex>();
    return u * phase_factors(sd, t).asDiagonal() * u.transpose();
}

}  // namespace qst
