#include "qst/fidelity.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qst/parallel.hpp"

namespace qst {

int default_thread_count() {
    if (const char* env = std::getenv("QST_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string to_string(FidelityClass cls) {
    switch (cls) {
        case FidelityClass::OneQubit: return "one-qubit";
        case FidelityClass::Omega1: return "omega1";
        case FidelityClass::Omega2: return "omega2";
        case FidelityClass::General: return "general";
    }
    return "unknown";
}

FidelityClass parse_fidelity_class(const std::string& name) {
    if (name == "one-qubit") return FidelityClass::OneQubit;
    if (name == "omega1") return FidelityClass::Omega1;
    if (name == "omega2") return FidelityClass::Omega2;
    if (name == "general") return FidelityClass::General;
    throw std::invalid_argument("unknown fidelity class '" + name + "'");
}

std::string to_string(FidelityMethod method) {
    switch (method) {
        case FidelityMethod::ClosedForm1Q: return "closed-form-1q";
        case FidelityMethod::ClosedFormOmega1: return "closed-form-omega1";
        case FidelityMethod::ClosedFormOmega2: return "closed-form-omega2";
        case FidelityMethod::MonteCarloGeneral: return "monte-carlo-general";
        case FidelityMethod::MonteCarloOneQubit: return "monte-carlo-one-qubit";
        case FidelityMethod::MonteCarloOmega1: return "monte-carlo-omega1";
        case FidelityMethod::MonteCarloOmega2: return "monte-carlo-omega2";
    }
    return "unknown";
}

AverageFidelity avg_fidelity_1q(Complex f) {
    const double m = std::abs(f);
    if (m > 1.0 + 1e-9) throw std::domain_error("transition amplitude modulus exceeds 1");
    return {0.5 + m / 3.0 + m * m / 6.0, FidelityMethod::ClosedForm1Q, std::nullopt};
}

namespace {

void require_pair_chain(int sites) {
    if (sites < 4) throw std::invalid_argument("two-qubit transfer needs N >= 4");
}

// receiver spin that sender site 1 should land on, and the one for site 2
std::pair<int, int> receiver_sites(int sites, ReceiverFrame frame) {
    return frame == ReceiverFrame::Direct ? std::pair{sites - 1, sites} : std::pair{sites, sites - 1};
}

}  // namespace

AverageFidelity avg_fidelity_omega1(const TransferAmplitudes& amps, const FidelityOptions& options) {
    const int n = amps.sites();
    require_pair_chain(n);
    const auto [r1, r2] = receiver_sites(n, options.frame);
    const Complex f11 = amps.f(r1, 1), f22 = amps.f(r2, 2), f12 = amps.f(r1, 2), f21 = amps.f(r2, 1);
    const double value =
        (std::norm(f11) + std::norm(f22) + 0.5 * std::norm(f12) + 0.5 * std::norm(f21)) / 3.0 +
        std::real(f22 * std::conj(f11)) / 3.0;
    return {value, FidelityMethod::ClosedFormOmega1, std::nullopt};
}

AverageFidelity avg_fidelity_omega1(const SpectralDecomposition& sd, double t,
                                    const FidelityOptions& options) {
    require_pair_chain(sd.sites());
    return avg_fidelity_omega1(transfer_amplitudes(sd, t), options);
}

AverageFidelity avg_fidelity_omega2(const TransferAmplitudes& amps, const FidelityOptions&) {
    const int n = amps.sites();
    require_pair_chain(n);
    double traced = 0.0;
    for (int m = 1; m <= n - 2; ++m) traced += std::norm(amps.g(m, n - 1)) + std::norm(amps.g(m, n));
    const Complex g = amps.g(n - 1, n);
    const double value = 0.5 - traced / 6.0 + std::norm(g) / 6.0 + std::real(g) / 3.0;
    return {value, FidelityMethod::ClosedFormOmega2, std::nullopt};
}

AverageFidelity avg_fidelity_omega2(const SpectralDecomposition& sd, double t,
                                    const FidelityOptions& options) {
    require_pair_chain(sd.sites());
    return avg_fidelity_omega2(transfer_amplitudes(sd, t), options);
}

namespace {

constexpr std::int64_t kSampleBlock = 1024;

TwoQubitState sample_pair_state(FidelityClass cls, CounterRng& rng) {
    switch (cls) {
        case FidelityClass::Omega1: return sample_omega1(rng);
        case FidelityClass::Omega2: return sample_omega2(rng);
        case FidelityClass::General: return sample_haar_2q(rng);
        case FidelityClass::OneQubit: break;
    }
    throw std::invalid_argument("one-qubit class has no two-qubit sender states");
}

FidelityMethod monte_carlo_method(FidelityClass cls) {
    switch (cls) {
        case FidelityClass::OneQubit: return FidelityMethod::MonteCarloOneQubit;
        case FidelityClass::Omega1: return FidelityMethod::MonteCarloOmega1;
        case FidelityClass::Omega2: return FidelityMethod::MonteCarloOmega2;
        case FidelityClass::General: return FidelityMethod::MonteCarloGeneral;
    }
    return FidelityMethod::MonteCarloGeneral;
}

// per-sample fidelity at receiver phases 0, pi/2, pi
using PhaseTriple = std::array<double, 3>;

// F(theta) = A + Re(B e^{i theta})
struct PhaseHarmonics {
    double a;
    Complex b;
};

PhaseHarmonics harmonics(const PhaseTriple& f) {
    const double a = 0.5 * (f[0] + f[2]);
    return {a, Complex(0.5 * (f[0] - f[2]), a - f[1])};
}

double at_phase(const PhaseHarmonics& h, double theta) {
    return h.a + std::real(h.b * std::polar(1.0, theta));
}

}  // namespace

AverageFidelity monte_carlo_average(const SpectralDecomposition& sd, double t, FidelityClass cls,
                                    std::int64_t samples, const CounterRng& rng,
                                    const FidelityOptions& options, int threads) {
    if (samples < 2) throw std::invalid_argument("Monte Carlo needs at least 2 samples");

    std::vector<PhaseTriple> values(static_cast<std::size_t>(samples));
    if (cls == FidelityClass::OneQubit) {
        const Complex f = amplitude_1p(sd, sd.sites(), 1, t);
        const Complex correction = std::abs(f) > 0.0 ? std::conj(f) / std::abs(f) : Complex(1.0);
        parallel_blocks(samples, kSampleBlock, threads,
                        [&](std::int64_t, std::int64_t begin, std::int64_t end) {
                            for (std::int64_t k = begin; k < end; ++k) {
                                CounterRng local = rng.substream(static_cast<std::uint64_t>(k));
                                const OneQubitState psi = sample_haar_1q(local);
                                Eigen::Matrix2cd rho = evolve_receiver_qubit(sd, psi, t);
                                rho(0, 1) *= std::conj(correction);
                                rho(1, 0) *= correction;
                                const double v = fidelity_against(rho, psi);
                                values[k] = {v, v, v};
                            }
                        });
    } else {
        require_pair_chain(sd.sites());
        const TransferAmplitudes amps = transfer_amplitudes(sd, t);
        parallel_blocks(samples, kSampleBlock, threads,
                        [&](std::int64_t, std::int64_t begin, std::int64_t end) {
                            for (std::int64_t k = begin; k < end; ++k) {
                                CounterRng local = rng.substream(static_cast<std::uint64_t>(k));
                                const TwoQubitState psi = sample_pair_state(cls, local);
                                const ReceiverPairState rho = evolve_receiver_pair(amps, psi);
                                PhaseTriple& out = values[k];
                                out[0] = fidelity_against(rho, psi, options.frame);
                                if (options.optimize_phase) {
                                    const double half_pi = 0.5 * std::numbers::pi;
                                    out[1] = fidelity_against(apply_receiver_phase(rho, half_pi), psi,
                                                              options.frame);
                                    out[2] = fidelity_against(apply_receiver_phase(rho, std::numbers::pi),
                                                              psi, options.frame);
                                } else {
                                    out[1] = out[2] = out[0];
                                }
                            }
                        });
    }

    double theta = 0.0;
    if (options.optimize_phase && cls != FidelityClass::OneQubit) {
        Complex b = 0.0;
        for (const auto& v : values) b += harmonics(v).b;
        theta = std::abs(b) > 0.0 ? -std::arg(b) : 0.0;
    }

    double sum = 0.0, sum_sq = 0.0;
    for (const auto& v : values) {
        const double f = (options.optimize_phase && cls != FidelityClass::OneQubit)
                             ? at_phase(harmonics(v), theta)
                             : v[0];
        sum += f;
        sum_sq += f * f;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double variance = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return {mean, monte_carlo_method(cls), std::sqrt(variance / n)};
}

AverageFidelity avg_fidelity_general_mc(const SpectralDecomposition& sd, double t,
                                        std::int64_t samples, const CounterRng& rng,
                                        const FidelityOptions& options, int threads) {
    if (samples < 1000) throw std::invalid_argument("general Monte Carlo needs at least 1000 samples");
    return monte_carlo_average(sd, t, FidelityClass::General, samples, rng, options, threads);
}

MomentMatrix MomentMatrix::from_samples(FidelityClass cls, std::int64_t samples,
                                        const CounterRng& rng, int threads) {
    if (samples < 1) throw std::invalid_argument("moment matrix needs samples");
    const std::int64_t blocks = (samples + kSampleBlock - 1) / kSampleBlock;
    std::vector<Matrix> partial(static_cast<std::size_t>(blocks), Matrix::Zero());
    parallel_blocks(samples, kSampleBlock, threads,
                    [&](std::int64_t block, std::int64_t begin, std::int64_t end) {
                        Matrix acc = Matrix::Zero();
                        for (std::int64_t k = begin; k < end; ++k) {
                            CounterRng local = rng.substream(static_cast<std::uint64_t>(k));
                            const TwoQubitState psi = sample_pair_state(cls, local);
                            Eigen::Matrix<Complex, 16, 1> w;
                            for (int x = 0; x < 4; ++x)
                                for (int a = 0; a < 4; ++a)
                                    w[4 * x + a] = std::conj(psi.amplitudes[x]) * psi.amplitudes[a];
                            acc.noalias() += w.conjugate() * w.transpose();
                        }
                        partial[block] = acc;
                    });
    Matrix q = Matrix::Zero();
    for (const auto& p : partial) q += p;
    return MomentMatrix(q / static_cast<double>(samples), samples);
}

namespace {

// sender-basis labels: 0 = |00>, 1 = |01> (site 2), 2 = |10> (site 1), 3 = |11>
struct SparseChannel {
    std::array<int, 6> index{};
    std::array<Complex, 6> value{};
    int count = 0;

    void add(int x, int a, Complex v) {
        index[count] = 4 * x + a;
        value[count] = v;
        ++count;
    }
};

double quadratic(const MomentMatrix::Matrix& q, const SparseChannel& c) {
    Complex acc = 0.0;
    for (int i = 0; i < c.count; ++i) {
        Complex row = 0.0;
        for (int j = 0; j < c.count; ++j) row += q(c.index[i], c.index[j]) * c.value[j];
        acc += std::conj(c.value[i]) * row;
    }
    return acc.real();
}

double moment_average_at_phase(const MomentMatrix::Matrix& q, const TransferAmplitudes& amps,
                               ReceiverFrame frame, Complex phase) {
    const int n = amps.sites();
    const auto [r1, r2] = receiver_sites(n, frame);
    auto label = [&](int site) { return site == r1 ? 2 : 1; };
    (void)r2;

    double total = 0.0;
    SparseChannel empty;
    empty.add(0, 0, 1.0);
    for (int site : {n - 1, n}) {
        empty.add(label(site), 2, phase * amps.f(site, 1));
        empty.add(label(site), 1, phase * amps.f(site, 2));
    }
    empty.add(3, 3, amps.g(n - 1, n));
    total += quadratic(q, empty);

    double pairs = 1.0 - std::norm(amps.g(n - 1, n));
    for (int m = 1; m <= n - 2; ++m) {
        SparseChannel single;
        single.add(0, 2, amps.f(m, 1));
        single.add(0, 1, amps.f(m, 2));
        const Complex ga = amps.g(m, n - 1), gb = amps.g(m, n);
        single.add(label(n - 1), 3, phase * ga);
        single.add(label(n), 3, phase * gb);
        pairs -= std::norm(ga) + std::norm(gb);
        total += quadratic(q, single);
    }
    SparseChannel both_traced;
    both_traced.add(0, 3, std::sqrt(std::max(0.0, pairs)));
    total += quadratic(q, both_traced);
    return total;
}

}  // namespace

double moment_average(const MomentMatrix& moments, const TransferAmplitudes& amps,
                      const FidelityOptions& options) {
    require_pair_chain(amps.sites());
    const auto& q = moments.matrix();
    const double f0 = moment_average_at_phase(q, amps, options.frame, 1.0);
    if (!options.optimize_phase) return f0;
    const double f1 = moment_average_at_phase(q, amps, options.frame, Complex(0.0, 1.0));
    const double f2 = moment_average_at_phase(q, amps, options.frame, -1.0);
    const auto h = harmonics({f0, f1, f2});
    return h.a + std::abs(h.b);
}

FidelityEvaluator::FidelityEvaluator(const SpectralDecomposition& sd, FidelityClass cls,
                                     FidelityOptions options, std::optional<MomentMatrix> moments)
    : sd_(sd), cls_(cls), options_(options), moments_(std::move(moments)) {
    if (cls_ == FidelityClass::General && !moments_)
        throw std::invalid_argument("general class evaluator needs a moment matrix");
    if (cls_ != FidelityClass::OneQubit) require_pair_chain(sd_.sites());
    const auto& u = sd_.eigenvectors();
    weights_first_ = u.array().rowwise() * u.row(0).array();
    weights_second_ = u.array().rowwise() * u.row(1).array();
}

double FidelityEvaluator::operator()(double t) const { return from_phases(phase_factors(sd_, t)); }

void FidelityEvaluator::evaluate_grid(double t0, double dt, std::int64_t count, double* out) const {
    constexpr std::int64_t kResync = 256;
    const Eigen::VectorXcd step = phase_factors(sd_, dt);
    Eigen::VectorXcd phases;
    for (std::int64_t i = 0; i < count; ++i) {
        if (i % kResync == 0)
            phases = phase_factors(sd_, t0 + static_cast<double>(i) * dt);
        else
            phases = phases.cwiseProduct(step);
        out[i] = from_phases(phases);
    }
}

double FidelityEvaluator::from_phases(const Eigen::VectorXcd& phases) const {
    const int n = sd_.sites();
    switch (cls_) {
        case FidelityClass::OneQubit: {
            Complex f = 0.0;
            for (int k = 0; k < n; ++k) f += weights_first_(n - 1, k) * phases[k];
            return avg_fidelity_1q(f).value;
        }
        case FidelityClass::Omega1: {
            TransferAmplitudes amps{Eigen::VectorXcd::Zero(n), Eigen::VectorXcd::Zero(n)};
            for (int site : {n - 1, n}) {
                Complex s1 = 0.0, s2 = 0.0;
                for (int k = 0; k < n; ++k) {
                    s1 += weights_first_(site - 1, k) * phases[k];
                    s2 += weights_second_(site - 1, k) * phases[k];
                }
                amps.from_first[site - 1] = s1;
                amps.from_second[site - 1] = s2;
            }
            return avg_fidelity_omega1(amps, options_).value;
        }
        case FidelityClass::Omega2:
        case FidelityClass::General: {
            TransferAmplitudes amps{weights_first_ * phases, weights_second_ * phases};
            if (cls_ == FidelityClass::Omega2) return avg_fidelity_omega2(amps, options_).value;
            return moment_average(*moments_, amps, options_);
        }
    }
    return 0.0;
}

}  // namespace qst
