#include "qst/chain.hpp"

#include <cmath>
#include <stdexcept>

namespace qst {

std::string to_string(CouplingKind kind) {
    switch (kind) {
        case CouplingKind::Uniform: return "uniform";
        case CouplingKind::Engineered: return "engineered";
        case CouplingKind::Ballistic: return "ballistic";
    }
    return "unknown";
}

CouplingKind parse_coupling_kind(const std::string& name) {
    if (name == "uniform") return CouplingKind::Uniform;
    if (name == "engineered") return CouplingKind::Engineered;
    if (name == "ballistic") return CouplingKind::Ballistic;
    throw std::invalid_argument("unknown coupling profile '" + name + "'");
}

ChainSpec::ChainSpec(int sites, int block, double field, CouplingProfile profile)
    : sites_(sites), block_(block), field_(field), profile_(profile) {
    if (sites < 2) throw std::invalid_argument("chain needs at least 2 sites");
    if (block < 1) throw std::invalid_argument("sender block length must be >= 1");
    if (2 * block > sites)
        throw std::invalid_argument("sender and receiver blocks overlap");
    if (!(field >= 0.0) || !std::isfinite(field))
        throw std::invalid_argument("barrier field must be finite and >= 0");
    if (field > 0.0) {
        if (sites < 2 * block + 3)
            throw std::invalid_argument(
                "barrier mode needs N >= 2n + 3 (a channel site between the barriers)");
        barriers_ = BarrierSites{block + 1, sites - block};
    }

    couplings_.resize(sites - 1);
    for (int l = 1; l < sites; ++l) {
        double j = 1.0;
        switch (profile.kind) {
            case CouplingKind::Uniform: break;
            case CouplingKind::Engineered:
                j = std::sqrt(static_cast<double>(l) * static_cast<double>(sites - l));
                break;
            case CouplingKind::Ballistic:
                if (l == 1 || l == sites - 1) j = profile.c * std::pow(sites, -1.0 / 6.0);
                break;
        }
        couplings_[l - 1] = j;
    }
}

double ChainSpec::coupling(int bond) const {
    if (bond < 1 || bond >= sites_) throw std::out_of_range("bond index out of range");
    return couplings_[bond - 1];
}

Eigen::VectorXd ChainSpec::field_profile() const {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(sites_);
    if (barriers_) {
        h[barriers_->first - 1] = field_;
        h[barriers_->second - 1] = field_;
    }
    return h;
}

ChainSpec build_chain(int sites, int block, double field, CouplingProfile profile) {
    return ChainSpec(sites, block, field, profile);
}

Eigen::MatrixXd SingleParticleHamiltonian::dense() const {
    const int n = dimension();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    m.diagonal() = diagonal;
    for (int i = 0; i + 1 < n; ++i) {
        m(i, i + 1) = off_diagonal[i];
        m(i + 1, i) = off_diagonal[i];
    }
    return m;
}

SingleParticleHamiltonian hamiltonian_matrix(const ChainSpec& spec) {
    SingleParticleHamiltonian h;
    h.diagonal = -2.0 * spec.field_profile();
    h.off_diagonal = -2.0 * spec.couplings();
    return h;
}

}  // namespace qst
