#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

namespace qst {

enum class CouplingKind { Uniform, Engineered, Ballistic };

/// Nearest-neighbour coupling layout. `c` is only read for Ballistic.
struct CouplingProfile {
    CouplingKind kind = CouplingKind::Uniform;
    double c = 1.030;

    static CouplingProfile uniform() { return {CouplingKind::Uniform, 1.030}; }
    static CouplingProfile engineered() { return {CouplingKind::Engineered, 1.030}; }
    static CouplingProfile ballistic(double c = 1.030) { return {CouplingKind::Ballistic, c}; }
};

std::string to_string(CouplingKind kind);
CouplingKind parse_coupling_kind(const std::string& name);

/// 1-based positions of the two field-carrying barrier spins.
struct BarrierSites {
    int first = 0;
    int second = 0;
};

/// Geometry of an XX chain: N sites, sender block [1..n], receiver block
/// [N-n+1..N], and (when h > 0) barrier spins at n+1 and N-n carrying a
/// field h. Energies are in units of J.
class ChainSpec {
  public:
    ChainSpec(int sites, int block, double field, CouplingProfile profile);

    int sites() const { return sites_; }
    int block() const { return block_; }
    double field() const { return field_; }
    const CouplingProfile& profile() const { return profile_; }
    const std::optional<BarrierSites>& barriers() const { return barriers_; }

    /// J_l for l = 1..N-1, stored at index l-1.
    const Eigen::VectorXd& couplings() const { return couplings_; }
    double coupling(int bond) const;

    /// h_l for l = 1..N, stored at index l-1.
    Eigen::VectorXd field_profile() const;

  private:
    int sites_;
    int block_;
    double field_;
    CouplingProfile profile_;
    std::optional<BarrierSites> barriers_;
    Eigen::VectorXd couplings_;
};

/// Validating constructor. Throws std::invalid_argument on bad geometry.
ChainSpec build_chain(int sites, int block, double field,
                      CouplingProfile profile = CouplingProfile::uniform());

/// Real symmetric tridiagonal single-particle matrix of the Jordan-Wigner
/// fermion model: off-diagonal -2 J_l, diagonal -2 h on the barrier sites.
struct SingleParticleHamiltonian {
    Eigen::VectorXd diagonal;
    Eigen::VectorXd off_diagonal;

    int dimension() const { return static_cast<int>(diagonal.size()); }
    Eigen::MatrixXd dense() const;
};

SingleParticleHamiltonian hamiltonian_matrix(const ChainSpec& spec);

}  // namespace qst
