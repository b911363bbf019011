#include "qst/states.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qst {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

TwoQubitState TwoQubitState::from_components(Complex alpha, Complex beta, Complex gamma,
                                             Complex delta) {
    TwoQubitState s;
    s.amplitudes << alpha, beta, gamma, delta;
    return s;
}

Eigen::Matrix2cd Rotation::matrix() const {
    const Complex i(0.0, 1.0);
    Eigen::Matrix2cd rz_phi, ry, rz_omega;
    rz_phi << std::exp(-i * phi / 2.0), 0.0, 0.0, std::exp(i * phi / 2.0);
    rz_omega << std::exp(-i * omega / 2.0), 0.0, 0.0, std::exp(i * omega / 2.0);
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    ry << c, -s, s, c;
    return rz_phi * ry * rz_omega;
}

TwoQubitState from_schmidt(double s, const Rotation& first, const Rotation& second) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("Schmidt parameter s must lie in [0, 1]");
    Eigen::Vector4cd core(std::sqrt((1.0 + s) / 2.0), 0.0, 0.0, std::sqrt((1.0 - s) / 2.0));
    // Kronecker order: site 1 is the high bit
    const Eigen::Matrix2cd a = first.matrix(), b = second.matrix();
    Eigen::Matrix4cd local;
    for (int r1 = 0; r1 < 2; ++r1)
        for (int r2 = 0; r2 < 2; ++r2)
            for (int c1 = 0; c1 < 2; ++c1)
                for (int c2 = 0; c2 < 2; ++c2) local(2 * r1 + r2, 2 * c1 + c2) = a(r1, c1) * b(r2, c2);
    TwoQubitState out;
    out.amplitudes = local * core;
    return out;
}

double concurrence(const TwoQubitState& psi) {
    return 2.0 * std::abs(psi.alpha() * psi.delta() - psi.beta() * psi.gamma());
}

TwoQubitState parse_state_literal(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    ss.imbue(std::locale::classic());
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::istringstream is(item);
        is.imbue(std::locale::classic());
        double v;
        if (!(is >> v)) throw std::invalid_argument("state literal: bad number '" + item + "'");
        values.push_back(v);
    }
    if (values.size() != 8)
        throw std::invalid_argument("state literal needs eight comma-separated reals");
    TwoQubitState s;
    for (int k = 0; k < 4; ++k) s.amplitudes[k] = Complex(values[2 * k], values[2 * k + 1]);
    const double norm = s.amplitudes.norm();
    if (norm == 0.0) throw std::invalid_argument("state literal has zero norm");
    s.amplitudes /= norm;
    return s;
}

CounterRng CounterRng::substream(std::uint64_t id) const {
    return CounterRng(seed_, splitmix64(stream_ ^ splitmix64(id + 0x632BE59BD9B4E019ull)));
}

std::uint64_t CounterRng::next_u64() {
    const std::uint64_t key = splitmix64(seed_) ^ splitmix64(stream_ + 0xD1B54A32D192ED03ull);
    return splitmix64(key + splitmix64(counter_++));
}

double CounterRng::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

Complex CounterRng::complex_normal() {
    // Box-Muller; each component has variance 1/2
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

TwoQubitState sample_haar_2q(CounterRng& rng) {
    TwoQubitState s;
    for (int k = 0; k < 4; ++k) s.amplitudes[k] = rng.complex_normal();
    s.amplitudes.normalize();
    return s;
}

OneQubitState sample_haar_1q(CounterRng& rng) {
    Complex a = rng.complex_normal();
    Complex b = rng.complex_normal();
    const double norm = std::sqrt(std::norm(a) + std::norm(b));
    return {a / norm, b / norm};
}

TwoQubitState sample_omega1(CounterRng& rng) {
    const OneQubitState pair = sample_haar_1q(rng);
    return TwoQubitState::from_components(0.0, pair.a, pair.b, 0.0);
}

TwoQubitState sample_omega2(CounterRng& rng) {
    const OneQubitState pair = sample_haar_1q(rng);
    return TwoQubitState::from_components(pair.a, 0.0, 0.0, pair.b);
}

}  // namespace qst
