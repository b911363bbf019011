#include <gtest/gtest.h>

#include "helpers.hpp"
#include "qst/amplitude.hpp"
#include "qst/oracle.hpp"

using namespace qst;

namespace {

std::vector<std::vector<int>> all_subsets(int n, int r) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int next) -> void {
        if (static_cast<int>(cur.size()) == r) {
            out.push_back(cur);
            return;
        }
        for (int s = next; s <= n; ++s) {
            cur.push_back(s);
            self(self, s + 1);
            cur.pop_back();
        }
    };
    rec(rec, 1);
    return out;
}

}  // namespace

TEST(OrderedSiteSet, RequiresStrictIncrease) {
    EXPECT_NO_THROW(OrderedSiteSet({1, 2, 5}));
    EXPECT_THROW(OrderedSiteSet({2, 1}), std::invalid_argument);
    EXPECT_THROW(OrderedSiteSet({3, 3}), std::invalid_argument);
    EXPECT_THROW(OrderedSiteSet({0, 1}), std::out_of_range);
    EXPECT_THROW(OrderedSiteSet(std::vector<int>{}), std::invalid_argument);
}

TEST(AmplitudeKernel, IdentityMinorsAtZeroTime) {
    const SpectralDecomposition sd = decompose(build_chain(8, 2, 6.0));
    EXPECT_NEAR(std::abs(amplitude_rp(sd, {1, 2}, {1, 2}, 0.0) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(amplitude_rp(sd, {1, 3, 8}, {1, 3, 8}, 0.0) - 1.0), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(amplitude_rp(sd, {7, 8}, {1, 2}, 0.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(amplitude_rp(sd, {2, 3, 4}, {1, 3, 4}, 0.0)), 0.0, 1e-14);
}

TEST(AmplitudeKernel, SingleSiteEqualsOneParticle) {
    CounterRng rng(21, 0);
    const SpectralDecomposition sd = decompose(build_chain(9, 2, 13.0));
    for (int k = 0; k < 10; ++k) {
        const int i = 1 + static_cast<int>(rng.next_u64() % 9), j = 1 + static_cast<int>(rng.next_u64() % 9);
        const double t = 100.0 * rng.uniform();
        EXPECT_LE(std::abs(amplitude_rp(sd, {j}, {i}, t) - amplitude_1p(sd, j, i, t)), 1e-15);
    }
}

TEST(AmplitudeKernel, TwoExcitationOracleAtEightSites) {
    CounterRng rng(22, 0);
    for (int draw = 0; draw < 10; ++draw) {
        const double h = 50.0 * rng.uniform(), t = 100.0 * rng.uniform();
        const ChainSpec spec = build_chain(8, 2, h);
        const SpectralDecomposition sd = decompose(spec);
        const Complex det = amplitude_rp(sd, {7, 8}, {1, 2}, t);
        EXPECT_LE(std::abs(det - oracle::oracle_amplitude(spec, {7, 8}, {1, 2}, t)), 1e-10);
        EXPECT_EQ(det, g_amplitude(sd, 7, 8, 1, 2, t));
    }
}

TEST(AmplitudeKernel, GAmplitudeConventions) {
    const SpectralDecomposition sd = decompose(build_chain(7, 2, 20.0));
    EXPECT_NEAR(std::abs(g_amplitude(sd, 1, 2, 1, 2, 0.0) - 1.0), 0.0, 1e-14);
    EXPECT_THROW(g_amplitude(sd, 2, 1, 1, 2, 1.0), std::invalid_argument);
    EXPECT_THROW(g_amplitude(sd, 1, 2, 2, 1, 1.0), std::invalid_argument);
    EXPECT_THROW(amplitude_rp(sd, {1, 2}, {1}, 1.0), std::invalid_argument);
    EXPECT_THROW(amplitude_rp(sd, {1, 8}, {1, 2}, 1.0), std::out_of_range);
}

TEST(AmplitudeKernel, GTraceMatchesOracle) {
    const ChainSpec spec = build_chain(7, 2, 20.0);
    const SpectralDecomposition sd = decompose(spec);
    const oracle::SectorPropagator p(spec, 2);
    const auto src = oracle::to_configuration({1, 2}), dst = oracle::to_configuration({6, 7});
    for (int k = 0; k < 100; ++k) {
        const double t = 40.0 * k;
        EXPECT_LE(std::abs(g_amplitude(sd, 6, 7, 1, 2, t) - p.amplitude(dst, src, t)), 1e-10);
    }
}

TEST(AmplitudeKernel, SectorUnitarity) {
    CounterRng rng(23, 0);
    for (int n = 4; n <= 10; ++n) {
        const SpectralDecomposition sd = decompose(build_chain(n, 1, n >= 5 ? 30.0 * rng.uniform() : 0.0));
        const double t = 500.0 * rng.uniform();
        for (const auto& sources : {std::vector<int>{1, 2}, std::vector<int>{1, n}}) {
            double total = 0.0;
            for (const auto& targets : all_subsets(n, 2))
                total += std::norm(amplitude_rp(sd, OrderedSiteSet(targets), OrderedSiteSet(sources), t));
            EXPECT_NEAR(total, 1.0, 1e-10) << "N=" << n;
        }
    }
}

TEST(AmplitudeKernel, CauchyBinetComposition) {
    CounterRng rng(24, 0);
    for (int draw = 0; draw < 10; ++draw) {
        const int n = 5 + draw % 5;
        const SpectralDecomposition sd = decompose(build_chain(n, 1, 25.0 * rng.uniform()));
        const double t1 = 50.0 * rng.uniform(), t2 = 50.0 * rng.uniform();
        const auto pairs = all_subsets(n, 2);
        for (const auto& target : {std::vector<int>{n - 1, n}, std::vector<int>{2, n}}) {
            Complex composed = 0.0;
            for (const auto& mid : pairs)
                composed += amplitude_rp(sd, OrderedSiteSet(target), OrderedSiteSet(mid), t2) *
                            amplitude_rp(sd, OrderedSiteSet(mid), {1, 2}, t1);
            EXPECT_LE(std::abs(composed - amplitude_rp(sd, OrderedSiteSet(target), {1, 2}, t1 + t2)), 1e-9);
        }
    }
}

TEST(AmplitudeKernel, ThreeByThreeLuAgreesWithCofactors) {
    Eigen::Matrix3cd m;
    m << Complex(1, 2), Complex(0, 1), Complex(3, -1), Complex(-2, 0), Complex(1, 1), Complex(0.5, 0),
        Complex(0, -1), Complex(2, 2), Complex(1, 0);
    const Complex cofactor = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    EXPECT_LE(std::abs(minor_determinant(m) - cofactor), 1e-12);
}

TEST(AmplitudeKernel, MinorModulusBounded) {
    CounterRng rng(25, 0);
    const SpectralDecomposition sd = decompose(build_chain(9, 2, 9.0));
    for (int k = 0; k < 50; ++k) {
        const double t = 300.0 * rng.uniform();
        EXPECT_LE(std::abs(amplitude_rp(sd, {3, 5, 9}, {1, 2, 4}, t)), 1.0 + 1e-12);
        EXPECT_LE(std::abs(amplitude_rp(sd, {8, 9}, {1, 2}, t)), 1.0 + 1e-12);
    }
}
