#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "qst/reduced_state.hpp"
#include "qst/spectral.hpp"
#include "qst/states.hpp"

namespace qst {

/// Input-state ensemble an average runs over.
enum class FidelityClass { OneQubit, Omega1, Omega2, General };

std::string to_string(FidelityClass cls);
FidelityClass parse_fidelity_class(const std::string& name);

enum class FidelityMethod {
    ClosedForm1Q,
    ClosedFormOmega1,
    ClosedFormOmega2,
    MonteCarloGeneral,
    MonteCarloOneQubit,
    MonteCarloOmega1,
    MonteCarloOmega2,
};

std::string to_string(FidelityMethod method);

struct AverageFidelity {
    double value = 0.0;
    FidelityMethod method = FidelityMethod::ClosedForm1Q;
    std::optional<double> mc_stderr;  // set for the Monte Carlo methods only
};

struct FidelityOptions {
    ReceiverFrame frame = ReceiverFrame::Direct;
    /// Maximize over a phase exp(i theta) on the one-excitation receiver sector.
    bool optimize_phase = false;
};

/// 1/2 + |f|/3 + |f|^2/6.
AverageFidelity avg_fidelity_1q(Complex f);

/// Closed form over b|01> + c|10>; needs N >= 4.
AverageFidelity avg_fidelity_omega1(const SpectralDecomposition& sd, double t,
                                    const FidelityOptions& options = {});
AverageFidelity avg_fidelity_omega1(const TransferAmplitudes& amps,
                                    const FidelityOptions& options = {});

/// Closed form over a|00> + d|11>; needs N >= 4.
AverageFidelity avg_fidelity_omega2(const SpectralDecomposition& sd, double t,
                                    const FidelityOptions& options = {});
AverageFidelity avg_fidelity_omega2(const TransferAmplitudes& amps,
                                    const FidelityOptions& options = {});

/// Sample mean of <psi0|rho(t)|psi0> over `samples` draws of the class, one
/// independent substream per sample index. The one-qubit class corrects the
/// receiver phase of f_{N,1}, which the closed form already assumes.
AverageFidelity monte_carlo_average(const SpectralDecomposition& sd, double t, FidelityClass cls,
                                    std::int64_t samples, const CounterRng& rng,
                                    const FidelityOptions& options = {}, int threads = 1);

/// Monte Carlo over Haar-random two-qubit senders.
AverageFidelity avg_fidelity_general_mc(const SpectralDecomposition& sd, double t,
                                        std::int64_t samples, const CounterRng& rng,
                                        const FidelityOptions& options = {}, int threads = 1);

/// Fourth-moment matrix Q_{kl} = mean(conj(w_k) w_l), w_{4x+a} = conj(psi_x) psi_a,
/// of a fixed set of sender states. Averaging against Q reproduces the
/// sample mean of the per-state fidelities at any time.
class MomentMatrix {
  public:
    using Matrix = Eigen::Matrix<Complex, 16, 16>;

    explicit MomentMatrix(const Matrix& q, std::int64_t samples) : q_(q), samples_(samples) {}

    static MomentMatrix from_samples(FidelityClass cls, std::int64_t samples, const CounterRng& rng,
                                     int threads = 1);

    const Matrix& matrix() const { return q_; }
    std::int64_t samples() const { return samples_; }

  private:
    Matrix q_;
    std::int64_t samples_;
};

/// Average fidelity of the channel at `amps` over the states behind `moments`.
double moment_average(const MomentMatrix& moments, const TransferAmplitudes& amps,
                      const FidelityOptions& options = {});

/// Fast F(t) for one chain and class, used by the scans. Thread-safe.
class FidelityEvaluator {
  public:
    FidelityEvaluator(const SpectralDecomposition& sd, FidelityClass cls,
                      FidelityOptions options = {},
                      std::optional<MomentMatrix> moments = std::nullopt);

    double operator()(double t) const;

    /// F at t0, t0 + dt, ..., t0 + (count-1) dt into `out`. Phases advance by
    /// recurrence and are recomputed exactly every few hundred steps.
    void evaluate_grid(double t0, double dt, std::int64_t count, double* out) const;

    FidelityClass fidelity_class() const { return cls_; }
    const SpectralDecomposition& spectrum() const { return sd_; }

  private:
    double from_phases(const Eigen::VectorXcd& phases) const;

    SpectralDecomposition sd_;
    FidelityClass cls_;
    FidelityOptions options_;
    std::optional<MomentMatrix> moments_;
    Eigen::MatrixXd weights_first_;
    Eigen::MatrixXd weights_second_;
};

}  // namespace qst
