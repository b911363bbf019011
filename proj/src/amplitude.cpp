#include "qst/amplitude.hpp"

#include <algorithm>
#include <stdexcept>

namespace qst {

OrderedSiteSet::OrderedSiteSet(std::vector<int> sites) : sites_(std::move(sites)) {
    if (sites_.empty()) throw std::invalid_argument("site set must not be empty");
    if (sites_.front() < 1) throw std::out_of_range("site labels are 1-based");
    for (std::size_t k = 1; k < sites_.size(); ++k)
        if (sites_[k] <= sites_[k - 1])
            throw std::invalid_argument("site set must be strictly increasing");
}

Eigen::MatrixXcd propagator_minor(const Eigen::MatrixXcd& propagator, const OrderedSiteSet& targets,
                                  const OrderedSiteSet& sources) {
    if (targets.size() != sources.size())
        throw std::invalid_argument("targets and sources differ in size");
    const int r = targets.size();
    const auto n = propagator.rows();
    if (targets.sites().back() > n || sources.sites().back() > n)
        throw std::out_of_range("site outside chain");
    Eigen::MatrixXcd m(r, r);
    for (int p = 0; p < r; ++p)
        for (int q = 0; q < r; ++q) m(p, q) = propagator(targets[p] - 1, sources[q] - 1);
    return m;
}

Complex amplitude_rp(const SpectralDecomposition& sd, const OrderedSiteSet& targets,
                     const OrderedSiteSet& sources, double t) {
    if (targets.size() != sources.size())
        throw std::invalid_argument("targets and sources differ in size");
    check_site(sd, targets.sites().back());
    check_site(sd, sources.sites().back());

    const Eigen::VectorXcd phases = phase_factors(sd, t);
    const int r = targets.size();
    Eigen::MatrixXcd m(r, r);
    for (int q = 0; q < r; ++q) {
        const Eigen::VectorXcd column = amplitude_row(sd, phases, sources[q]);
        for (int p = 0; p < r; ++p) m(p, q) = column[targets[p] - 1];
    }
    return minor_determinant(m);
}

Complex g_amplitude(const SpectralDecomposition& sd, int r, int s, int i, int j, double t) {
    if (!(r < s) || !(i < j)) throw std::invalid_argument("g_amplitude needs ordered pairs");
    return amplitude_rp(sd, OrderedSiteSet{r, s}, OrderedSiteSet{i, j}, t);
}

}  // namespace qst
