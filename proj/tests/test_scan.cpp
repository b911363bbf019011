#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qst/scan.hpp"

using namespace qst;

namespace {

ScanRequest small_request(int n, int block, double h, FidelityClass cls, double t_max) {
    ScanRequest r;
    r.sites = n;
    r.block = block;
    r.field = h;
    r.fidelity_class = cls;
    r.t_max = t_max;
    r.samples = 4000;
    return r;
}

}  // namespace

TEST(ScanDriver, TwoSitePerfectTransfer) {
    const ScanResult res = max_over_time(small_request(2, 1, 0.0, FidelityClass::OneQubit, 1.0));
    EXPECT_NEAR(res.t_star, std::numbers::pi / 4, 1e-6);
    EXPECT_NEAR(res.fbar_max, 1.0, 1e-12);
}

TEST(ScanDriver, EngineeredChainOneQubit) {
    ScanRequest r = small_request(7, 1, 0.0, FidelityClass::OneQubit, 2.0);
    r.profile = CouplingProfile::engineered();
    const ScanResult res = max_over_time(r);
    EXPECT_GE(res.fbar_max, 1.0 - 1e-8);
    EXPECT_NEAR(res.t_star, std::numbers::pi / 4, 1e-5);
}

TEST(ScanDriver, EngineeredChainGeneralMirrored) {
    ScanRequest r = small_request(6, 2, 0.0, FidelityClass::General, 2.0);
    r.profile = CouplingProfile::engineered();
    r.options = {ReceiverFrame::Mirrored, true};
    EXPECT_GE(max_over_time(r).fbar_max, 1.0 - 1e-6);
}

TEST(ScanDriver, BarrierBeatsBareChain) {
    const auto sweep = field_sweep(small_request(7, 2, 0.0, FidelityClass::Omega1, 2e3), {0.0, 20.0});
    ASSERT_EQ(sweep.size(), 2u);
    EXPECT_GT(sweep[1].fbar_max, sweep[0].fbar_max);
}

TEST(ScanDriver, MaximumIsConsistentWithEvaluator) {
    const ScanRequest r = small_request(8, 2, 7.0, FidelityClass::General, 3e3);
    const FidelityEvaluator eval = make_evaluator(r);
    const ScanResult res = max_over_time(r, eval);
    EXPECT_NEAR(res.fbar_max, eval(res.t_star), 1e-9);
    EXPECT_GE(res.t_star, 0.0);
    EXPECT_LE(res.t_star, r.t_max);
    std::vector<double> grid(static_cast<std::size_t>(res.grid_points));
    eval.evaluate_grid(0.0, res.grid_spacing, res.grid_points, grid.data());
    EXPECT_GE(res.fbar_max, *std::max_element(grid.begin(), grid.end()) - 1e-12);
}

TEST(ScanDriver, SweepMatchesStandaloneScans) {
    const ScanRequest r = small_request(7, 2, 0.0, FidelityClass::General, 1e3);
    const auto sweep = field_sweep(r, {0.0, 3.0});
    ScanRequest single = r;
    single.field = 3.0;
    EXPECT_EQ(sweep[1].fbar_max, max_over_time(single).fbar_max);
    EXPECT_EQ(sweep[0].t_star, max_over_time(r).t_star);
}

TEST(ScanDriver, DeterministicAcrossThreads) {
    ScanRequest r = small_request(9, 2, 12.0, FidelityClass::General, 2e4);
    r.threads = 1;
    const ScanResult a = max_over_time(r);
    r.threads = 4;
    const ScanResult b = max_over_time(r);
    EXPECT_EQ(a.t_star, b.t_star);
    EXPECT_EQ(a.fbar_max, b.fbar_max);
}

TEST(ScanDriver, RejectsBadRequests) {
    EXPECT_THROW(max_over_time(small_request(7, 2, 5.0, FidelityClass::General, 0.0)), std::invalid_argument);
    ScanRequest r = small_request(7, 2, 5.0, FidelityClass::Omega1, 10.0);
    r.grid_spacing = -1.0;
    EXPECT_THROW(max_over_time(r), std::invalid_argument);
    EXPECT_THROW(max_over_time(small_request(5, 2, 5.0, FidelityClass::Omega1, 10.0)), std::invalid_argument);
}

TEST(ScanDriver, GridSpacingGuard) {
    const SpectralDecomposition sd = decompose(build_chain(7, 2, 10.0));
    const double range = sd.eigenvalues().maxCoeff() - sd.eigenvalues().minCoeff();
    EXPECT_DOUBLE_EQ(guarded_spacing(sd, std::nullopt), std::numbers::pi / (4 * range));
    EXPECT_DOUBLE_EQ(guarded_spacing(sd, 1.0), std::numbers::pi / (4 * range));
    EXPECT_DOUBLE_EQ(guarded_spacing(sd, 1e-3), 1e-3);
}

TEST(ScanDriver, TraceIsDownsampled) {
    ScanRequest r = small_request(7, 2, 5.0, FidelityClass::Omega2, 100.0);
    r.trace_points = 50;
    const ScanResult res = max_over_time(r);
    ASSERT_GE(res.trace.size(), 2u);
    EXPECT_LE(res.trace.size(), 51u);
    for (std::size_t k = 1; k < res.trace.size(); ++k) EXPECT_GT(res.trace[k].t, res.trace[k - 1].t);
}

TEST(ScanDriver, FirstTimeReaching) {
    const ScanRequest r = small_request(7, 2, 20.0, FidelityClass::Omega1, 2e4);
    const FidelityEvaluator eval = make_evaluator(r);
    const ScanResult best = max_over_time(r, eval);
    const double level = best.fbar_max - 0.01;
    const auto t = first_time_reaching(r, level);
    ASSERT_TRUE(t.has_value());
    EXPECT_LE(*t, best.t_star + 1e-9);
    EXPECT_GE(eval(*t), level - 1e-7);
    EXPECT_FALSE(first_time_reaching(r, best.fbar_max + 1e-3).has_value());
    const auto zero = first_time_reaching(r, 0.0);
    ASSERT_TRUE(zero.has_value());
    EXPECT_EQ(*zero, 0.0);
}

TEST(ScanDriver, ThresholdEdgeTargets) {
    ThresholdRequest tr;
    tr.sites = {7, 8};
    tr.target = 0.0;
    tr.t_max = 100.0;
    const auto res = threshold_field(tr);
    ASSERT_EQ(res.size(), 2u);
    for (const auto& row : res) {
        ASSERT_TRUE(row.field.has_value());
        EXPECT_EQ(*row.field, 0.0);
    }
    tr.target = 1.5;
    EXPECT_THROW(threshold_field(tr), std::invalid_argument);
    tr.target = 0.9;
    tr.sites = {6};
    EXPECT_THROW(threshold_field(tr), std::invalid_argument);
}

TEST(ScanDriver, ThresholdIsMinimalOnGrid) {
    ThresholdRequest tr;
    tr.sites = {7};
    tr.target = 0.9;
    tr.t_max = 2e3;
    const ThresholdResult res = threshold_field(tr).front();
    ASSERT_TRUE(res.field.has_value());
    EXPECT_GE(res.fbar_max, 0.9);
    ScanRequest below = small_request(7, 2, *res.field - tr.resolution, FidelityClass::Omega1, tr.t_max);
    EXPECT_LT(max_over_time(below).fbar_max, 0.9);
}

TEST(ScanDriver, DefaultWindows) {
    EXPECT_EQ(default_t_max(7), 2e4);
    EXPECT_EQ(default_t_max(8), 6e4);
}
