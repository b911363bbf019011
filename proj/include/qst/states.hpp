#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "qst/spectral.hpp"

namespace qst {

/// Sender pair state on sites (1, 2): components of |00>, |01>, |10>, |11>,
/// first digit is site 1. |01> therefore has site 2 excited.
struct TwoQubitState {
    Eigen::Vector4cd amplitudes = Eigen::Vector4cd(1.0, 0.0, 0.0, 0.0);

    Complex alpha() const { return amplitudes[0]; }
    Complex beta() const { return amplitudes[1]; }
    Complex gamma() const { return amplitudes[2]; }
    Complex delta() const { return amplitudes[3]; }

    static TwoQubitState from_components(Complex alpha, Complex beta, Complex gamma, Complex delta);
    double norm_squared() const { return amplitudes.squaredNorm(); }
};

/// Single sender qubit a|0> + b|1>.
struct OneQubitState {
    Complex a = 1.0;
    Complex b = 0.0;
};

/// Single-qubit rotation Rz(phi) Ry(theta) Rz(omega).
struct Rotation {
    double phi = 0.0;
    double theta = 0.0;
    double omega = 0.0;

    Eigen::Matrix2cd matrix() const;
    static Rotation identity() { return {}; }
};

/// (R1 (x) R2)(sqrt((1+s)/2)|00> + sqrt((1-s)/2)|11>), s in [0, 1].
TwoQubitState from_schmidt(double s, const Rotation& first, const Rotation& second);

/// 2|alpha delta - beta gamma|.
double concurrence(const TwoQubitState& psi);

/// Parses "re,im,re,im,..." (eight reals, alpha..delta) and normalizes.
TwoQubitState parse_state_literal(const std::string& text);

/// Counter-based generator: the value at (seed, stream, counter) is a pure
/// function of those three integers.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed = 0, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    std::uint64_t position() const { return counter_; }

    /// Independent generator keyed by (seed, id); counter restarts at 0.
    CounterRng substream(std::uint64_t id) const;

    std::uint64_t next_u64();
    /// Uniform on (0, 1].
    double uniform();
    /// Standard complex normal with E|z|^2 = 1.
    Complex complex_normal();

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

TwoQubitState sample_haar_2q(CounterRng& rng);
OneQubitState sample_haar_1q(CounterRng& rng);
/// b|01> + c|10>, Haar on that plane.
TwoQubitState sample_omega1(CounterRng& rng);
/// a|00> + d|11>, Haar on that plane.
TwoQubitState sample_omega2(CounterRng& rng);

}  // namespace qst
