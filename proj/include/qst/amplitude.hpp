#pragma once

#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "qst/spectral.hpp"

namespace qst {

/// Strictly increasing list of 1-based site labels.
class OrderedSiteSet {
  public:
    OrderedSiteSet(std::vector<int> sites);
    OrderedSiteSet(std::initializer_list<int> sites) : OrderedSiteSet(std::vector<int>(sites)) {}

    int size() const { return static_cast<int>(sites_.size()); }
    int operator[](int index) const { return sites_[index]; }
    const std::vector<int>& sites() const { return sites_; }
    auto begin() const { return sites_.begin(); }
    auto end() const { return sites_.end(); }

    friend bool operator==(const OrderedSiteSet&, const OrderedSiteSet&) = default;

  private:
    std::vector<int> sites_;
};

/// Determinant by partial-pivot LU; explicit formulas for sizes 1 and 2.
template <typename Derived>
typename Derived::Scalar minor_determinant(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("minor_determinant: not square");
    if (m.rows() == 1) return m(0, 0);
    if (m.rows() == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    using Plain = typename Derived::PlainObject;
    return Eigen::PartialPivLU<Plain>(m.eval()).determinant();
}

/// Restriction of a propagator to rows `targets` and columns `sources`.
Eigen::MatrixXcd propagator_minor(const Eigen::MatrixXcd& propagator, const OrderedSiteSet& targets,
                                  const OrderedSiteSet& sources);

/// r-excitation transition amplitude <targets| exp(-iHt) |sources> as the
/// determinant of the r x r single-particle propagator minor.
Complex amplitude_rp(const SpectralDecomposition& sd, const OrderedSiteSet& targets,
                     const OrderedSiteSet& sources, double t);

/// g_{i,j}^{r,s}(t); requires r < s and i < j.
Complex g_amplitude(const SpectralDecomposition& sd, int r, int s, int i, int j, double t);

/// Same, from two precomputed propagator columns f_{., i} and f_{., j}.
inline Complex g_from_rows(const Eigen::VectorXcd& from_i, const Eigen::VectorXcd& from_j, int r,
                           int s) {
    return from_i[r - 1] * from_j[s - 1] - from_j[r - 1] * from_i[s - 1];
}

}  // namespace qst
