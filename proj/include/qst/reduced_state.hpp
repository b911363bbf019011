#pragma once

#include <Eigen/Dense>

#include "qst/amplitude.hpp"
#include "qst/spectral.hpp"
#include "qst/states.hpp"

namespace qst {

/// Which receiver spin is compared against sender site 1. Direct maps
/// 1 -> N-1 and 2 -> N; Mirrored swaps the receivers (1 -> N, 2 -> N-1).
enum class ReceiverFrame { Direct, Mirrored };

/// Propagator columns from the two sender sites, f_{r,1}(t) and f_{r,2}(t).
struct TransferAmplitudes {
    Eigen::VectorXcd from_first;
    Eigen::VectorXcd from_second;

    int sites() const { return static_cast<int>(from_first.size()); }
    Complex f(int target, int source) const {
        return source == 1 ? from_first[target - 1] : from_second[target - 1];
    }
    /// g_{1,2}^{r,s}, r < s.
    Complex g(int r, int s) const { return g_from_rows(from_first, from_second, r, s); }
};

TransferAmplitudes transfer_amplitudes(const SpectralDecomposition& sd, double t);
TransferAmplitudes transfer_amplitudes(const SpectralDecomposition& sd,
                                       const Eigen::VectorXcd& phases);

/// Basis positions of the receiver pair (site N-1, site N).
namespace receiver {
inline constexpr int both = 0;      // |11>
inline constexpr int first = 1;     // |10>, site N-1 excited
inline constexpr int second = 2;    // |01>, site N excited
inline constexpr int vacuum = 3;    // |00>
}  // namespace receiver

/// 4x4 reduced density matrix of sites (N-1, N) in the order
/// |11>, |10>, |01>, |00>.
struct ReceiverPairState {
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();

    double trace() const { return rho.trace().real(); }
    double hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }
    double min_eigenvalue() const;
    double purity() const { return (rho * rho).trace().real(); }
    /// Expected number of excitations on the two receiver spins.
    double excitation_number() const;
};

/// Assembles the receiver-pair state from F_r = beta f_{r,2} + gamma f_{r,1}
/// and G^{r,s} = delta g_{1,2}^{r,s}, tracing sites 1..N-2.
ReceiverPairState evolve_receiver_pair(const TransferAmplitudes& amps, const TwoQubitState& psi0);
ReceiverPairState evolve_receiver_pair(const SpectralDecomposition& sd, const TwoQubitState& psi0,
                                       double t);

/// Receiver state with the receiver spins exchanged.
ReceiverPairState swap_receivers(const ReceiverPairState& state);

/// Applies exp(i theta) to the one-excitation receiver sector.
ReceiverPairState apply_receiver_phase(const ReceiverPairState& state, double theta);

/// <psi0|rho|psi0> with psi0 transplanted onto the receivers in `frame`.
double fidelity_against(const ReceiverPairState& state, const TwoQubitState& psi0,
                        ReceiverFrame frame = ReceiverFrame::Direct);

/// Uhlmann fidelity sqrt(<psi0|rho|psi0>) for pure targets.
double uhlmann_fidelity(const ReceiverPairState& state, const TwoQubitState& psi0,
                        ReceiverFrame frame = ReceiverFrame::Direct);

/// Receiver-spin state (site N) after sending `psi0` from site 1, basis |0>, |1>.
Eigen::Matrix2cd evolve_receiver_qubit(const SpectralDecomposition& sd, const OneQubitState& psi0,
                                       double t);

double fidelity_against(const Eigen::Matrix2cd& rho, const OneQubitState& psi0);

}  // namespace qst
