#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "qst/amplitude.hpp"
#include "qst/chain.hpp"
#include "qst/reduced_state.hpp"
#include "qst/states.hpp"

namespace qst::oracle {

/// Occupation bitmask, bit (l-1) set when site l is flipped.
using Configuration = std::uint32_t;

Configuration to_configuration(const OrderedSiteSet& sites);

/// All C(N, r) configurations with r flipped spins, lexicographic in the
/// increasing site list.
class SectorBasis {
  public:
    SectorBasis(int sites, int excitations);

    int sites() const { return sites_; }
    int excitations() const { return excitations_; }
    int dimension() const { return static_cast<int>(states_.size()); }
    Configuration state(int index) const { return states_[index]; }
    const std::vector<Configuration>& states() const { return states_; }
    /// Throws std::out_of_range when `c` is not in this sector.
    int index_of(Configuration c) const;

  private:
    int sites_;
    int excitations_;
    std::vector<Configuration> states_;
    std::unordered_map<Configuration, int> index_;
};

/// Spin Hamiltonian -sum J_l (XX + YY) + sum h_l Z restricted to one sector,
/// with Z|0> = +|0> and Z|1> = -|1>. Includes the constant sum_l h_l.
Eigen::MatrixXd sector_hamiltonian(const ChainSpec& spec, const SectorBasis& basis);

/// Diagonal offset sum_l h_l that the fermion matrix drops; every sector
/// carries the same constant, so it only contributes a global phase.
double energy_offset(const ChainSpec& spec);

/// Cached dense eigendecomposition of one sector.
class SectorPropagator {
  public:
    SectorPropagator(const ChainSpec& spec, int excitations);

    const SectorBasis& basis() const { return basis_; }
    /// exp(-iHt) v in the spin model.
    Eigen::VectorXcd evolve(const Eigen::VectorXcd& v, double t) const;
    /// <targets| exp(-iHt) |sources> with the global offset phase removed,
    /// directly comparable with the fermionic determinant.
    Complex amplitude(Configuration targets, Configuration sources, double t) const;

  private:
    SectorBasis basis_;
    double offset_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXd modes_;
};

inline constexpr int kMaxSectorDimension = 20000;

/// exp(-iHt) v in sector r. Requires r <= 3 and C(N, r) <= 2e4.
Eigen::VectorXcd sector_evolve(const ChainSpec& spec, int excitations,
                               const Eigen::VectorXcd& amplitudes_in, double t);

/// Offset-free amplitude between two configurations of equal size.
Complex oracle_amplitude(const ChainSpec& spec, const OrderedSiteSet& targets,
                         const OrderedSiteSet& sources, double t);

/// Receiver-pair state by evolving the 0, 1 and 2 excitation components
/// and summing over the configurations of sites 1..N-2. N <= 14.
ReceiverPairState oracle_rdm(const ChainSpec& spec, const TwoQubitState& psi0, double t);

/// Largest deviations found by the verification battery.
struct BatteryReport {
    struct Line {
        std::string name;
        double max_deviation;
        double tolerance;
        bool passed() const { return max_deviation <= tolerance; }
    };
    std::vector<Line> lines;
    bool passed() const;
};

/// Random comparisons of determinants and receiver states against the
/// sector evolution, plus sector norm conservation.
BatteryReport run_battery(std::uint64_t seed, int draws = 20);

}  // namespace qst::oracle
