#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qst/chain.hpp"

namespace qst {

using Complex = std::complex<double>;

template <typename Scalar>
struct TridiagonalEigen {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eigenvalues;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> eigenvectors;
};

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
/// `off_diagonal[i]` couples rows i and i+1 (size n-1, or n with a
/// trailing ignored entry). Eigenvalues come back ascending; each
/// eigenvector column has its first significant component positive.
template <typename Scalar>
TridiagonalEigen<Scalar> tridiagonal_eigen(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diagonal,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& off_diagonal) {
    using std::abs;
    using std::hypot;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    const Eigen::Index n = diagonal.size();
    if (off_diagonal.size() + 1 < n)
        throw std::invalid_argument("tridiagonal_eigen: off-diagonal too short");

    Vec d = diagonal;
    Vec e = Vec::Zero(n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) e[i] = off_diagonal[i];
    Mat z = Mat::Identity(n, n);
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();

    for (Eigen::Index l = 0; l < n; ++l) {
        int iterations = 0;
        Eigen::Index m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const Scalar dd = abs(d[m]) + abs(d[m + 1]);
                if (abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (++iterations > 60) throw std::runtime_error("tridiagonal_eigen: no convergence");
                Scalar g = (d[l + 1] - d[l]) / (Scalar(2) * e[l]);
                Scalar r = hypot(g, Scalar(1));
                g = d[m] - d[l] + e[l] / (g + (g >= Scalar(0) ? abs(r) : -abs(r)));
                Scalar s = 1, c = 1, p = 0;
                bool underflow = false;
                for (Eigen::Index i = m - 1; i >= l; --i) {
                    const Scalar f = s * e[i];
                    const Scalar b = c * e[i];
                    r = hypot(f, g);
                    e[i + 1] = r;
                    if (r == Scalar(0)) {
                        d[i + 1] -= p;
                        e[m] = 0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + Scalar(2) * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (Eigen::Index k = 0; k < n; ++k) {
                        const Scalar zf = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * zf;
                        z(k, i) = c * z(k, i) - s * zf;
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0;
            }
        } while (m != l);
    }

    // ascending order, stable in the original index for ties
    std::vector<Eigen::Index> order(n);
    for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return d[a] < d[b]; });

    TridiagonalEigen<Scalar> out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.eigenvalues[k] = d[order[k]];
        out.eigenvectors.col(k) = z.col(order[k]);
        for (Eigen::Index j = 0; j < n; ++j) {
            const Scalar v = out.eigenvectors(j, k);
            if (abs(v) > Scalar(1e-10)) {
                if (v < Scalar(0)) out.eigenvectors.col(k) *= Scalar(-1);
                break;
            }
        }
    }
    return out;
}

/// Single-particle spectrum: eigenvalues ascending, U(:, k) = a_k.
class SpectralDecomposition {
  public:
    SpectralDecomposition(Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors);

    int sites() const { return static_cast<int>(eigenvalues_.size()); }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }

    /// <j|a_k>, 1-based site, 0-based mode.
    double overlap(int site, int mode) const { return eigenvectors_(site - 1, mode); }

    double spectral_range() const {
        return eigenvalues_[eigenvalues_.size() - 1] - eigenvalues_[0];
    }

  private:
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
};

SpectralDecomposition decompose(const SingleParticleHamiltonian& h);
SpectralDecomposition decompose(const ChainSpec& spec);

/// exp(-i lambda_k t) for every mode.
Eigen::VectorXcd phase_factors(const SpectralDecomposition& sd, double t);

/// f_{j,i}(t) = <j| exp(-iHt) |i>, sites 1-based.
Complex amplitude_1p(const SpectralDecomposition& sd, int target, int source, double t);
Complex amplitude_1p(const SpectralDecomposition& sd, const Eigen::VectorXcd& phases,
                     int target, int source);

/// Column (f_{1,i}, ..., f_{N,i}) of the propagator.
Eigen::VectorXcd amplitude_row(const SpectralDecomposition& sd, int source, double t);
Eigen::VectorXcd amplitude_row(const SpectralDecomposition& sd, const Eigen::VectorXcd& phases,
                               int source);

/// Full N x N propagator exp(-iHt).
Eigen::MatrixXcd propagator(const SpectralDecomposition& sd, double t);

void check_site(const SpectralDecomposition& sd, int site);

}  // namespace qst
