#include "qst/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "qst/amplitude.hpp"
#include "qst/spectral.hpp"

namespace qst::oracle {

Configuration to_configuration(const OrderedSiteSet& sites) {
    Configuration c = 0;
    for (int s : sites) {
        if (s > 32) throw std::out_of_range("oracle supports at most 32 sites");
        c |= Configuration{1} << (s - 1);
    }
    return c;
}

namespace {

void enumerate(int sites, int remaining, int next_site, Configuration partial,
               std::vector<Configuration>& out) {
    if (remaining == 0) {
        out.push_back(partial);
        return;
    }
    for (int s = next_site; s <= sites - remaining + 1; ++s)
        enumerate(sites, remaining - 1, s + 1, partial | (Configuration{1} << (s - 1)), out);
}

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

}  // namespace

SectorBasis::SectorBasis(int sites, int excitations) : sites_(sites), excitations_(excitations) {
    if (sites < 1 || sites > 32) throw std::invalid_argument("oracle supports 1..32 sites");
    if (excitations < 0 || excitations > sites) throw std::invalid_argument("bad excitation count");
    if (binomial(sites, excitations) > kMaxSectorDimension)
        throw std::invalid_argument("sector too large for the dense oracle");
    enumerate(sites, excitations, 1, 0, states_);
    index_.reserve(states_.size());
    for (int i = 0; i < dimension(); ++i) index_.emplace(states_[i], i);
}

int SectorBasis::index_of(Configuration c) const {
    auto it = index_.find(c);
    if (it == index_.end()) throw std::out_of_range("configuration not in sector");
    return it->second;
}

double energy_offset(const ChainSpec& spec) { return spec.field_profile().sum(); }

Eigen::MatrixXd sector_hamiltonian(const ChainSpec& spec, const SectorBasis& basis) {
    const int n = spec.sites();
    const Eigen::VectorXd h = spec.field_profile();
    const Eigen::VectorXd& j = spec.couplings();
    const int dim = basis.dimension();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (int col = 0; col < dim; ++col) {
        const Configuration c = basis.state(col);
        double diag = 0.0;
        for (int l = 0; l < n; ++l) diag += h[l] * (((c >> l) & 1u) ? -1.0 : 1.0);
        m(col, col) = diag;
        // (XX + YY) exchanges a flipped spin across the bond with matrix element 2
        for (int l = 0; l + 1 < n; ++l) {
            const bool left = (c >> l) & 1u, right = (c >> (l + 1)) & 1u;
            if (left == right) continue;
            const Configuration moved = c ^ (Configuration{1} << l) ^ (Configuration{1} << (l + 1));
            m(basis.index_of(moved), col) += -2.0 * j[l];
        }
    }
    return m;
}

SectorPropagator::SectorPropagator(const ChainSpec& spec, int excitations)
    : basis_(spec.sites(), excitations), offset_(energy_offset(spec)) {
    if (excitations > 3) throw std::invalid_argument("oracle sectors limited to r <= 3");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sector_hamiltonian(spec, basis_));
    if (solver.info() != Eigen::Success) throw std::runtime_error("sector eigensolver failed");
    energies_ = solver.eigenvalues();
    modes_ = solver.eigenvectors();
}

Eigen::VectorXcd SectorPropagator::evolve(const Eigen::VectorXcd& v, double t) const {
    if (v.size() != basis_.dimension()) throw std::invalid_argument("sector vector has wrong size");
    const Eigen::MatrixXcd modes = modes_.cast<Complex>();
    Eigen::VectorXcd coeff = modes.adjoint() * v;
    for (Eigen::Index k = 0; k < coeff.size(); ++k) coeff[k] *= std::polar(1.0, -energies_[k] * t);
    return modes * coeff;
}

Complex SectorPropagator::amplitude(Configuration targets, Configuration sources, double t) const {
    const int row = basis_.index_of(targets);
    const int col = basis_.index_of(sources);
    Complex sum = 0.0;
    for (Eigen::Index k = 0; k < energies_.size(); ++k)
        sum += modes_(row, k) * modes_(col, k) * std::polar(1.0, -energies_[k] * t);
    return sum * std::polar(1.0, offset_ * t);
}

Eigen::VectorXcd sector_evolve(const ChainSpec& spec, int excitations,
                               const Eigen::VectorXcd& amplitudes_in, double t) {
    return SectorPropagator(spec, excitations).evolve(amplitudes_in, t);
}

Complex oracle_amplitude(const ChainSpec& spec, const OrderedSiteSet& targets,
                         const OrderedSiteSet& sources, double t) {
    if (targets.size() != sources.size()) throw std::invalid_argument("sector mismatch");
    if (targets.sites().back() > spec.sites() || sources.sites().back() > spec.sites())
        throw std::out_of_range("site outside chain");
    const SectorPropagator p(spec, targets.size());
    return p.amplitude(to_configuration(targets), to_configuration(sources), t);
}

ReceiverPairState oracle_rdm(const ChainSpec& spec, const TwoQubitState& psi0, double t) {
    const int n = spec.sites();
    if (n < 4 || n > 14) throw std::invalid_argument("oracle_rdm supports 4 <= N <= 14");

    // global state over the occupied sectors, keyed by configuration
    std::vector<std::pair<Configuration, Complex>> global;
    const double offset = energy_offset(spec);
    global.emplace_back(0u, psi0.alpha() * std::polar(1.0, -offset * t));

    const Configuration site1 = 1u, site2 = 2u;
    {
        const SectorPropagator p(spec, 1);
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(p.basis().dimension());
        v[p.basis().index_of(site1)] += psi0.gamma();
        v[p.basis().index_of(site2)] += psi0.beta();
        const Eigen::VectorXcd out = p.evolve(v, t);
        for (int i = 0; i < p.basis().dimension(); ++i) global.emplace_back(p.basis().state(i), out[i]);
    }
    {
        const SectorPropagator p(spec, 2);
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(p.basis().dimension());
        v[p.basis().index_of(site1 | site2)] = psi0.delta();
        const Eigen::VectorXcd out = p.evolve(v, t);
        for (int i = 0; i < p.basis().dimension(); ++i) global.emplace_back(p.basis().state(i), out[i]);
    }

    const Configuration env_mask = (Configuration{1} << (n - 2)) - 1;
    auto receiver_index = [&](Configuration c) {
        const int first = (c >> (n - 2)) & 1u, second = (c >> (n - 1)) & 1u;
        return 3 - (2 * first + second);
    };

    ReceiverPairState out;
    for (const auto& [c1, a1] : global)
        for (const auto& [c2, a2] : global)
            if ((c1 & env_mask) == (c2 & env_mask))
                out.rho(receiver_index(c1), receiver_index(c2)) += a1 * std::conj(a2);
    return out;
}

bool BatteryReport::passed() const {
    return std::all_of(lines.begin(), lines.end(), [](const Line& l) { return l.passed(); });
}

BatteryReport run_battery(std::uint64_t seed, int draws) {
    CounterRng rng(seed, 0x0AC1E);
    BatteryReport report;

    std::array<double, 4> amp{};
    double rdm = 0.0, norm = 0.0;
    for (int n = 5; n <= 9; ++n) {
        for (int d = 0; d < draws; ++d) {
            const double h = 50.0 * rng.uniform();
            const double t = 100.0 * rng.uniform();
            const ChainSpec spec = build_chain(n, 1, h);
            const SpectralDecomposition sd = decompose(spec);
            for (int r = 1; r <= 3; ++r) {
                const SectorPropagator p(spec, r);
                const int dim = p.basis().dimension();
                const int src = static_cast<int>(rng.next_u64() % dim);
                const int dst = static_cast<int>(rng.next_u64() % dim);
                std::vector<int> sources, targets;
                for (int s = 1; s <= n; ++s) {
                    if ((p.basis().state(src) >> (s - 1)) & 1u) sources.push_back(s);
                    if ((p.basis().state(dst) >> (s - 1)) & 1u) targets.push_back(s);
                }
                const Complex det = amplitude_rp(sd, OrderedSiteSet(targets), OrderedSiteSet(sources), t);
                const double dev =
                    std::abs(det - p.amplitude(p.basis().state(dst), p.basis().state(src), t));
                amp[r] = std::max(amp[r], dev);

                Eigen::VectorXcd v(dim);
                for (int i = 0; i < dim; ++i) v[i] = rng.complex_normal();
                v.normalize();
                norm = std::max(norm, std::abs(p.evolve(v, t).norm() - 1.0));
            }
        }
    }
    for (int n : {7, 8}) {
        for (int d = 0; d < draws; ++d) {
            const double h = 50.0 * rng.uniform();
            const double t = 100.0 * rng.uniform();
            const ChainSpec spec = build_chain(n, 2, h);
            const TwoQubitState psi = sample_haar_2q(rng);
            const ReceiverPairState a = evolve_receiver_pair(decompose(spec), psi, t);
            const ReceiverPairState b = oracle_rdm(spec, psi, t);
            rdm = std::max(rdm, (a.rho - b.rho).cwiseAbs().maxCoeff());
        }
    }
    report.lines.push_back({"one-excitation amplitude", amp[1], 1e-10});
    report.lines.push_back({"two-excitation amplitude", amp[2], 1e-10});
    report.lines.push_back({"three-excitation amplitude", amp[3], 1e-10});
    report.lines.push_back({"receiver pair state", rdm, 1e-10});
    report.lines.push_back({"sector norm", norm, 1e-12});
    return report;
}

}  // namespace qst::oracle
