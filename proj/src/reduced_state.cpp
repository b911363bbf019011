#include "qst/reduced_state.hpp"

#include <stdexcept>

namespace qst {

TransferAmplitudes transfer_amplitudes(const SpectralDecomposition& sd,
                                       const Eigen::VectorXcd& phases) {
    if (sd.sites() < 2) throw std::invalid_argument("transfer amplitudes need N >= 2");
    return {amplitude_row(sd, phases, 1), amplitude_row(sd, phases, 2)};
}

TransferAmplitudes transfer_amplitudes(const SpectralDecomposition& sd, double t) {
    return transfer_amplitudes(sd, phase_factors(sd, t));
}

double ReceiverPairState::min_eigenvalue() const {
    const Eigen::Matrix4cd h = 0.5 * (rho + rho.adjoint());
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(h, Eigen::EigenvaluesOnly)
        .eigenvalues()
        .minCoeff();
}

double ReceiverPairState::excitation_number() const {
    using namespace receiver;
    return 2.0 * rho(both, both).real() + rho(first, first).real() + rho(second, second).real();
}

ReceiverPairState evolve_receiver_pair(const TransferAmplitudes& amps, const TwoQubitState& psi0) {
    using namespace receiver;
    const int n = amps.sites();
    if (n < 4) throw std::invalid_argument("receiver pair state needs N >= 4");

    const Complex alpha = psi0.alpha(), beta = psi0.beta(), gamma = psi0.gamma(),
                  delta = psi0.delta();
    // F_r and G^{r,s}; site 1 carries gamma, site 2 carries beta
    auto F = [&](int r) { return beta * amps.f(r, 2) + gamma * amps.f(r, 1); };
    auto G = [&](int r, int s) { return delta * amps.g(r, s); };

    const int a = n - 1, b = n;
    const Complex g_ab = G(a, b), f_a = F(a), f_b = F(b);

    // traced m-sums over the channel sites 1..N-2
    double g_ma_sq = 0.0, g_mb_sq = 0.0;
    Complex g_ma_gmb = 0.0, g_ma_fm = 0.0, g_mb_fm = 0.0;
    for (int m = 1; m <= n - 2; ++m) {
        const Complex gma = G(m, a), gmb = G(m, b), fm = F(m);
        g_ma_sq += std::norm(gma);
        g_mb_sq += std::norm(gmb);
        g_ma_gmb += gma * std::conj(gmb);
        g_ma_fm += gma * std::conj(fm);
        g_mb_fm += gmb * std::conj(fm);
    }

    ReceiverPairState out;
    auto& rho = out.rho;
    rho(both, both) = std::norm(g_ab);
    rho(both, first) = g_ab * std::conj(f_a);
    rho(both, second) = g_ab * std::conj(f_b);
    rho(both, vacuum) = g_ab * std::conj(alpha);
    rho(first, first) = g_ma_sq + std::norm(f_a);
    rho(first, second) = g_ma_gmb + f_a * std::conj(f_b);
    rho(first, vacuum) = g_ma_fm + f_a * std::conj(alpha);
    rho(second, second) = g_mb_sq + std::norm(f_b);
    rho(second, vacuum) = g_mb_fm + f_b * std::conj(alpha);
    rho(vacuum, vacuum) = 1.0 - std::norm(g_ab) - g_ma_sq - g_mb_sq - std::norm(f_a) - std::norm(f_b);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < r; ++c) rho(r, c) = std::conj(rho(c, r));
    return out;
}

ReceiverPairState evolve_receiver_pair(const SpectralDecomposition& sd, const TwoQubitState& psi0,
                                       double t) {
    return evolve_receiver_pair(transfer_amplitudes(sd, t), psi0);
}

ReceiverPairState swap_receivers(const ReceiverPairState& state) {
    using namespace receiver;
    Eigen::Matrix4cd p = Eigen::Matrix4cd::Identity();
    p(first, first) = p(second, second) = 0.0;
    p(first, second) = p(second, first) = 1.0;
    return {p * state.rho * p};
}

ReceiverPairState apply_receiver_phase(const ReceiverPairState& state, double theta) {
    using namespace receiver;
    Eigen::Vector4cd d = Eigen::Vector4cd::Ones();
    d[first] = d[second] = std::polar(1.0, theta);
    return {d.asDiagonal() * state.rho * d.conjugate().asDiagonal()};
}

namespace {

Eigen::Vector4cd receiver_image(const TwoQubitState& psi0, ReceiverFrame frame) {
    using namespace receiver;
    Eigen::Vector4cd v;
    v[both] = psi0.delta();
    v[vacuum] = psi0.alpha();
    // gamma has site 1 excited, beta has site 2 excited
    if (frame == ReceiverFrame::Direct) {
        v[first] = psi0.gamma();
        v[second] = psi0.beta();
    } else {
        v[first] = psi0.beta();
        v[second] = psi0.gamma();
    }
    return v;
}

}  // namespace

double fidelity_against(const ReceiverPairState& state, const TwoQubitState& psi0,
                        ReceiverFrame frame) {
    const Eigen::Vector4cd v = receiver_image(psi0, frame);
    return (v.adjoint() * state.rho * v)(0, 0).real();
}

double uhlmann_fidelity(const ReceiverPairState& state, const TwoQubitState& psi0,
                        ReceiverFrame frame) {
    return std::sqrt(std::max(0.0, fidelity_against(state, psi0, frame)));
}

Eigen::Matrix2cd evolve_receiver_qubit(const SpectralDecomposition& sd, const OneQubitState& psi0,
                                       double t) {
    const int n = sd.sites();
    const Complex f = amplitude_1p(sd, n, 1, t);
    const Complex excited = psi0.b * f;
    Eigen::Matrix2cd rho;
    rho(1, 1) = std::norm(excited);
    rho(0, 0) = 1.0 - std::norm(excited);
    rho(0, 1) = psi0.a * std::conj(excited);
    rho(1, 0) = std::conj(rho(0, 1));
    return rho;
}

double fidelity_against(const Eigen::Matrix2cd& rho, const OneQubitState& psi0) {
    const Eigen::Vector2cd v(psi0.a, psi0.b);
    return (v.adjoint() * rho * v)(0, 0).real();
}

}  // namespace qst
