#include "qst/scan.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qst/parallel.hpp"

namespace qst {

namespace {

constexpr std::int64_t kGridBlock = std::int64_t{1} << 16;
constexpr std::uint64_t kMomentStream = 0x5CA7;
constexpr double kTieTolerance = 1e-12;
constexpr double kInvPhi = 0.6180339887498949;

struct Candidate {
    std::int64_t index;
    double value;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.index < b.index;
}

void keep_best(std::vector<Candidate>& list, std::size_t limit) {
    std::sort(list.begin(), list.end(), better);
    if (list.size() > limit) list.resize(limit);
}

struct Grid {
    double dt;
    std::int64_t count;
    double at(std::int64_t i) const { return static_cast<double>(i) * dt; }
};

Grid make_grid(double t_max, double max_spacing) {
    const auto intervals = static_cast<std::int64_t>(std::ceil(t_max / max_spacing));
    const std::int64_t n = std::max<std::int64_t>(intervals, 1);
    return {t_max / static_cast<double>(n), n + 1};
}

void validate(const ScanRequest& r) {
    if (!(r.t_max > 0.0) || !std::isfinite(r.t_max)) throw std::invalid_argument("empty scan range: t_max must be > 0");
    if (r.grid_spacing && !(*r.grid_spacing > 0.0)) throw std::invalid_argument("grid spacing must be > 0");
    if (r.refine_candidates < 1) throw std::invalid_argument("need at least one refinement candidate");
    if (r.threads < 1) throw std::invalid_argument("threads must be >= 1");
}

// golden-section maximum of f on [a, b]
template <typename F>
std::pair<double, double> golden_max(const F& f, double a, double b) {
    double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    const double tol = 1e-10 * std::max(1.0, std::abs(b));
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

ChainSpec chain_of(const ScanRequest& r) { return build_chain(r.sites, r.block, r.field, r.profile); }

}  // namespace

double default_t_max(int sites) { return sites % 2 == 1 ? 2e4 : 6e4; }

double guarded_spacing(const SpectralDecomposition& sd, std::optional<double> requested) {
    const double range = sd.spectral_range();
    const double guard = range > 0.0 ? std::numbers::pi / (4.0 * range) : std::numeric_limits<double>::infinity();
    if (requested) return std::min(*requested, guard);
    if (!std::isfinite(guard)) throw std::invalid_argument("flat spectrum needs an explicit grid spacing");
    return guard;
}

FidelityEvaluator make_evaluator(const ScanRequest& request, const std::optional<MomentMatrix>& moments) {
    const SpectralDecomposition sd = decompose(chain_of(request));
    if (request.fidelity_class == FidelityClass::General && !moments)
        return FidelityEvaluator(sd, request.fidelity_class, request.options,
                                 MomentMatrix::from_samples(FidelityClass::General, request.samples,
                                                            CounterRng(request.seed, kMomentStream),
                                                            request.threads));
    return FidelityEvaluator(sd, request.fidelity_class, request.options, moments);
}

ScanResult max_over_time(const ScanRequest& request) {
    validate(request);
    return max_over_time(request, make_evaluator(request));
}

ScanResult max_over_time(const ScanRequest& request, const FidelityEvaluator& evaluator) {
    validate(request);
    const Grid grid = make_grid(request.t_max, guarded_spacing(evaluator.spectrum(), request.grid_spacing));
    const std::int64_t blocks = (grid.count + kGridBlock - 1) / kGridBlock;
    const auto limit = static_cast<std::size_t>(request.refine_candidates);
    const std::int64_t stride =
        request.trace_points > 0 ? std::max<std::int64_t>(1, (grid.count + request.trace_points - 1) / request.trace_points) : 0;

    std::vector<std::vector<Candidate>> local(static_cast<std::size_t>(blocks));
    std::vector<std::vector<TracePoint>> traces(static_cast<std::size_t>(blocks));
    parallel_blocks(grid.count, kGridBlock, request.threads,
                    [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
                        // one neighbour on each side so block edges see their local maxima
                        const std::int64_t lo = std::max<std::int64_t>(0, begin - 1);
                        const std::int64_t hi = std::min(grid.count, end + 1);
                        std::vector<double> v(static_cast<std::size_t>(hi - lo));
                        evaluator.evaluate_grid(grid.at(lo), grid.dt, hi - lo, v.data());
                        auto& out = local[b];
                        for (std::int64_t i = begin; i < end; ++i) {
                            const double x = v[i - lo];
                            const bool left = i == 0 || x >= v[i - 1 - lo];
                            const bool right = i + 1 == grid.count || x > v[i + 1 - lo];
                            if (left && right) out.push_back({i, x});
                            if (stride > 0 && i % stride == 0) traces[b].push_back({grid.at(i), x});
                            if (out.size() > 4 * limit) keep_best(out, limit);
                        }
                        keep_best(out, limit);
                    });

    std::vector<Candidate> all;
    for (const auto& c : local) all.insert(all.end(), c.begin(), c.end());
    keep_best(all, limit);
    std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) { return a.index < b.index; });

    ScanResult result;
    result.sites = request.sites;
    result.block = request.block;
    result.field = request.field;
    result.grid_spacing = grid.dt;
    result.grid_points = grid.count;
    for (auto& t : traces) result.trace.insert(result.trace.end(), t.begin(), t.end());

    bool have = false;
    for (const Candidate& c : all) {
        const double t_grid = grid.at(c.index);
        double t_best = t_grid, f_best = evaluator(t_grid);
        const double a = std::max(0.0, t_grid - grid.dt), b = std::min(request.t_max, t_grid + grid.dt);
        const auto [t_ref, f_ref] = golden_max(evaluator, a, b);
        if (f_ref > f_best) {
            t_best = t_ref;
            f_best = evaluator(t_ref);
        }
        // candidates arrive in time order, so a near tie keeps the earlier one
        if (!have || f_best > result.fbar_max + kTieTolerance) {
            result.t_star = t_best;
            result.fbar_max = f_best;
            have = true;
        }
    }
    return result;
}

std::vector<ScanResult> field_sweep(const ScanRequest& request, const std::vector<double>& fields) {
    validate(request);
    if (fields.empty()) throw std::invalid_argument("empty field list");
    std::optional<MomentMatrix> moments;
    if (request.fidelity_class == FidelityClass::General)
        moments = MomentMatrix::from_samples(FidelityClass::General, request.samples,
                                             CounterRng(request.seed, kMomentStream), request.threads);
    std::vector<ScanResult> out;
    out.reserve(fields.size());
    for (double h : fields) {
        ScanRequest r = request;
        r.field = h;
        out.push_back(max_over_time(r, make_evaluator(r, moments)));
    }
    return out;
}

std::optional<double> first_time_reaching(const ScanRequest& request, double level) {
    validate(request);
    const FidelityEvaluator f = make_evaluator(request);
    const Grid grid = make_grid(request.t_max, guarded_spacing(f.spectrum(), request.grid_spacing));
    constexpr double kPeakMargin = 0.05;

    // earliest t in [a, b] with f >= level, given f(a) < level <= f(b)
    auto crossing = [&](double a, double b) {
        while (b - a > 1e-9 * std::max(1.0, b)) {
            const double m = 0.5 * (a + b);
            (f(m) >= level ? b : a) = m;
        }
        return b;
    };

    if (f(0.0) >= level) return 0.0;
    double prev2 = 0.0, prev1 = f(0.0);
    std::vector<double> v;
    for (std::int64_t begin = 1; begin < grid.count; begin += kGridBlock) {
        const std::int64_t end = std::min(grid.count, begin + kGridBlock);
        v.resize(static_cast<std::size_t>(end - begin));
        f.evaluate_grid(grid.at(begin), grid.dt, end - begin, v.data());
        for (std::int64_t i = begin; i < end; ++i) {
            const double x = v[i - begin];
            if (i >= 2 && prev1 >= prev2 && prev1 >= x && prev1 >= level - kPeakMargin) {
                const auto [tp, fp] = golden_max(f, grid.at(i - 2), grid.at(i));
                if (fp >= level) return crossing(grid.at(i - 2), tp);
            }
            if (x >= level) return crossing(grid.at(i - 1), grid.at(i));
            prev2 = prev1;
            prev1 = x;
        }
    }
    return std::nullopt;
}

std::vector<ThresholdResult> threshold_field(const ThresholdRequest& request) {
    if (!(request.target >= 0.0 && request.target <= 1.0)) throw std::invalid_argument("target must lie in [0, 1]");
    if (!(request.resolution > 0.0) || !(request.coarse_step >= request.resolution))
        throw std::invalid_argument("need 0 < resolution <= coarse step");
    if (request.sites.empty()) throw std::invalid_argument("empty chain-length range");

    const auto steps_per_coarse = static_cast<std::int64_t>(std::llround(request.coarse_step / request.resolution));
    const auto cap = static_cast<std::int64_t>(std::floor(request.field_cap / request.resolution + 1e-9));
    std::optional<MomentMatrix> moments;
    if (request.fidelity_class == FidelityClass::General)
        moments = MomentMatrix::from_samples(FidelityClass::General, request.samples,
                                             CounterRng(request.seed, kMomentStream), request.threads);

    std::vector<ThresholdResult> out;
    for (int n : request.sites) {
        if (n < 2 * request.block + 3) throw std::invalid_argument("chain too short for barrier spins");
        ThresholdResult res;
        res.sites = n;
        // k / 10 rather than k * 0.1 keeps grid fields at the nearest double
        const double per_unit = 1.0 / request.resolution;
        const bool integral = std::abs(per_unit - std::round(per_unit)) < 1e-9;
        auto field_at = [&](std::int64_t k) {
            return integral ? static_cast<double>(k) / std::round(per_unit) : static_cast<double>(k) * request.resolution;
        };

        auto scan = [&](std::int64_t k, bool fine) {
            ScanRequest r;
            r.sites = n;
            r.block = request.block;
            r.profile = request.profile;
            r.field = field_at(k);
            r.fidelity_class = request.fidelity_class;
            r.options = request.options;
            r.t_max = request.t_max;
            r.samples = request.samples;
            r.seed = request.seed;
            r.threads = request.threads;
            const FidelityEvaluator e = make_evaluator(r, moments);
            double spacing = guarded_spacing(e.spectrum(), request.grid_spacing);
            if (fine) spacing *= 0.5;
            r.grid_spacing = spacing;
            ++res.scans;
            return max_over_time(r, e);
        };
        auto accept = [&](std::int64_t k, const ScanResult& s) {
            res.field = field_at(k);
            res.t_star = s.t_star;
            res.fbar_max = s.fbar_max;
        };

        const ScanResult at_zero = scan(0, false);
        if (at_zero.fbar_max >= request.target) {
            accept(0, at_zero);
            out.push_back(res);
            continue;
        }
        std::int64_t lo = 0, hi = -1;
        for (std::int64_t k = steps_per_coarse; k <= cap; k += steps_per_coarse) {
            if (scan(k, false).fbar_max >= request.target) {
                hi = k;
                break;
            }
            lo = k;
        }
        if (hi < 0) {
            out.push_back(res);
            continue;
        }
        while (hi - lo > 1) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            (scan(mid, false).fbar_max >= request.target ? hi : lo) = mid;
        }
        const ScanResult check = scan(hi, true);
        if (check.fbar_max >= request.target) {
            accept(hi, check);
        } else {
            res.used_linear_fallback = true;
            for (std::int64_t k = 1; k <= cap; ++k) {
                const ScanResult s = scan(k, true);
                if (s.fbar_max >= request.target) {
                    accept(k, s);
                    break;
                }
            }
        }
        out.push_back(res);
    }
    return out;
}

}  // namespace qst
