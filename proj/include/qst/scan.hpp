#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qst/chain.hpp"
#include "qst/fidelity.hpp"

namespace qst {

/// Everything a time scan needs. `grid_spacing` is an upper bound; the
/// driver never samples coarser than pi / (4 * spectral range).
struct ScanRequest {
    int sites = 7;
    int block = 2;
    CouplingProfile profile = CouplingProfile::uniform();
    double field = 0.0;
    FidelityClass fidelity_class = FidelityClass::General;
    FidelityOptions options{};
    double t_max = 2e4;
    std::optional<double> grid_spacing;
    /// Haar samples behind the general-class moment matrix.
    std::int64_t samples = 20000;
    std::uint64_t seed = 0;
    int threads = 1;
    /// Grid candidates handed to golden-section refinement.
    int refine_candidates = 4;
    /// Downsampled F(t) points kept in the result; 0 keeps none.
    int trace_points = 0;
};

struct TracePoint {
    double t;
    double value;
};

struct ScanResult {
    int sites = 0;
    int block = 0;
    double field = 0.0;
    double t_star = 0.0;
    double fbar_max = 0.0;
    double grid_spacing = 0.0;
    std::int64_t grid_points = 0;
    std::vector<TracePoint> trace;
};

/// Largest coarse spacing the driver accepts for this spectrum.
double guarded_spacing(const SpectralDecomposition& sd, std::optional<double> requested);

/// Evaluator for the request's chain; builds the moment matrix when the
/// class needs one.
FidelityEvaluator make_evaluator(const ScanRequest& request,
                                 const std::optional<MomentMatrix>& moments = std::nullopt);

/// Coarse grid over [0, t_max] followed by golden-section refinement of
/// the best grid points. Ties go to the smaller t.
ScanResult max_over_time(const ScanRequest& request);
ScanResult max_over_time(const ScanRequest& request, const FidelityEvaluator& evaluator);

/// max_over_time for every field value; the general-class moment matrix is
/// shared across the sweep.
std::vector<ScanResult> field_sweep(const ScanRequest& request, const std::vector<double>& fields);

/// Earliest t in [0, t_max] with F(t) >= level, located to 1e-9 between
/// grid points, or nullopt.
std::optional<double> first_time_reaching(const ScanRequest& request, double level);

struct ThresholdRequest {
    std::vector<int> sites;
    int block = 2;
    CouplingProfile profile = CouplingProfile::uniform();
    FidelityClass fidelity_class = FidelityClass::Omega1;
    FidelityOptions options{};
    double target = 0.95;
    double t_max = 1.3e4;
    std::optional<double> grid_spacing;
    double coarse_step = 1.0;
    double resolution = 0.1;
    double field_cap = 100.0;
    std::int64_t samples = 20000;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct ThresholdResult {
    int sites = 0;
    std::optional<double> field;  // h*, empty when the target is unreachable below the cap
    double t_star = 0.0;
    double fbar_max = 0.0;
    int scans = 0;
    bool used_linear_fallback = false;
};

/// Smallest h on the resolution grid whose max-over-time fidelity reaches
/// the target: coarse bracket, bisection, then a verification scan at half
/// the grid spacing. A failed verification falls back to a linear scan.
std::vector<ThresholdResult> threshold_field(const ThresholdRequest& request);

/// Default scan window: 2e4 for odd N, 6e4 for even N.
double default_t_max(int sites);

}  // namespace qst
