#include "qst/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <locale>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "qst/amplitude.hpp"
#include "qst/io.hpp"
#include "qst/oracle.hpp"
#include "qst/parallel.hpp"
#include "qst/scan.hpp"

namespace qst::cli {

namespace {

using nlohmann::ordered_json;

struct Shared {
    int sites = 7;
    int block = 2;
    double field = 0.0;
    std::string profile = "uniform";
    double c = 1.030;
    double t = 0.0;
    double t_max = 0.0;  // 0 selects the per-parity default
    double grid = 0.0;   // 0 selects the spectral guard
    std::string cls = "general";
    std::int64_t samples = 20000;
    std::uint64_t seed = 0;
    std::string out;
    int threads = 0;  // 0 defers to QST_THREADS, then the hardware
    std::string frame = "direct";
    bool phase_opt = false;

    CouplingProfile coupling() const { return {parse_coupling_kind(profile), c}; }
    ReceiverFrame receiver_frame() const { return frame == "mirrored" ? ReceiverFrame::Mirrored : ReceiverFrame::Direct; }
    FidelityOptions options() const { return {receiver_frame(), phase_opt}; }
    FidelityClass fidelity_class() const { return parse_fidelity_class(cls); }
    int thread_count() const { return threads > 0 ? threads : default_thread_count(); }
};

struct Extra {
    std::vector<int> sources{1};
    std::vector<int> targets{7};
    std::string state = "0,0,0,0,1,0,0,0";
    bool oracle = false;
    bool monte_carlo = false;
    int trace_points = 0;
    std::string trace_out;
    double h_min = 0.0, h_max = 20.0, h_step = 1.0;
    std::vector<double> h_list;
    int n_min = 7, n_max = 12;
    double target = 0.95;
    double h_cap = 100.0;
    double coarse_step = 1.0;
    double resolution = 0.1;
    int refine = 4;
    std::string figure;
    int draws = 20;
    std::string manifest;
};

const std::vector<double> kFigure4Fields = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 16, 18, 20, 25, 30, 40, 50};

std::string num(double x) { return format_number(x); }

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
    return s;
}

// every shared setting spelled out, so a manifest replays without defaults
std::vector<std::string> shared_arguments(const Shared& s, double t_max) {
    std::vector<std::string> a = {"--N", std::to_string(s.sites), "--n", std::to_string(s.block),
                                  "--h", num(s.field), "--profile", s.profile, "--c", num(s.c),
                                  "--t-max", num(t_max), "--class", s.cls,
                                  "--samples", std::to_string(s.samples), "--seed", std::to_string(s.seed),
                                  "--frame", s.frame};
    if (s.grid > 0.0) a.insert(a.end(), {"--grid", num(s.grid)});
    if (s.phase_opt) a.push_back("--phase-opt");
    if (!s.out.empty()) a.insert(a.end(), {"--out", s.out});
    return a;
}

ordered_json shared_config(const Shared& s, double t_max) {
    return {{"N", s.sites}, {"n", s.block}, {"h", s.field}, {"profile", s.profile}, {"c", s.c},
            {"t_max", t_max}, {"grid", s.grid > 0.0 ? ordered_json(s.grid) : ordered_json("spectral guard pi/(4 range)")},
            {"class", s.cls}, {"samples", s.samples}, {"seed", s.seed}, {"threads", s.thread_count()},
            {"frame", s.frame}, {"phase_opt", s.phase_opt}};
}

ScanRequest scan_request(const Shared& s, double t_max, int refine, int trace_points) {
    ScanRequest r;
    r.sites = s.sites;
    r.block = s.block;
    r.profile = s.coupling();
    r.field = s.field;
    r.fidelity_class = s.fidelity_class();
    r.options = s.options();
    r.t_max = t_max;
    if (s.grid > 0.0) r.grid_spacing = s.grid;
    r.samples = s.samples;
    r.seed = s.seed;
    r.threads = s.thread_count();
    r.refine_candidates = refine;
    r.trace_points = trace_points;
    return r;
}

void emit_json(const Shared& s, const ordered_json& j, std::ostream& out) {
    if (s.out.empty()) {
        out << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(s.out);
    if (!f) throw std::runtime_error("cannot write " + s.out);
    f << j.dump(2) << '\n';
}

// writes the CSV (stdout when --out is absent) and its manifest sidecar
template <typename Writer>
void emit_csv(const Shared& s, RunManifest manifest, Writer&& write, std::ostream& out,
              const std::vector<std::filesystem::path>& extra_outputs = {}) {
    if (s.out.empty()) {
        write(out);
        return;
    }
    {
        std::ofstream f(s.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + s.out);
        write(f);
    }
    std::vector<std::filesystem::path> outputs{s.out};
    outputs.insert(outputs.end(), extra_outputs.begin(), extra_outputs.end());
    write_manifest(manifest, outputs);
    for (const auto& p : extra_outputs) {
        std::vector<std::filesystem::path> rotated{p, s.out};
        write_manifest(manifest, rotated);
    }
}

RunManifest make_manifest(const std::string& command, std::vector<std::string> args, ordered_json config,
                          std::uint64_t seed) {
    RunManifest m;
    m.command = command;
    args.insert(args.begin(), command);
    m.arguments = std::move(args);
    m.config = std::move(config);
    m.seed = seed;
    return m;
}

int cmd_spectrum(const Shared& s, std::ostream& out) {
    const SpectralDecomposition sd = decompose(build_chain(s.sites, s.block, s.field, s.coupling()));
    auto args = shared_arguments(s, 0.0);
    emit_csv(s, make_manifest("spectrum", args, shared_config(s, 0.0), s.seed),
             [&](std::ostream& os) {
                 os << "k,lambda\n";
                 for (int k = 0; k < sd.sites(); ++k) os << k + 1 << ',' << num(sd.eigenvalues()[k]) << '\n';
             },
             out);
    return kSuccess;
}

int cmd_amplitude(const Shared& s, const Extra& e, std::ostream& out) {
    const ChainSpec spec = build_chain(s.sites, s.block, s.field, s.coupling());
    const OrderedSiteSet targets(e.targets), sources(e.sources);
    const Complex a = e.oracle ? oracle::oracle_amplitude(spec, targets, sources, s.t)
                               : amplitude_rp(decompose(spec), targets, sources, s.t);
    ordered_json j = {{"N", s.sites}, {"n", s.block}, {"h", s.field}, {"t", s.t},
                      {"targets", e.targets}, {"sources", e.sources}, {"method", e.oracle ? "sector-oracle" : "determinant"},
                      {"re", a.real()}, {"im", a.imag()}, {"abs", std::abs(a)}};
    emit_json(s, j, out);
    return kSuccess;
}

int cmd_rdm(const Shared& s, const Extra& e, std::ostream& out) {
    const ChainSpec spec = build_chain(s.sites, s.block, s.field, s.coupling());
    const TwoQubitState psi = parse_state_literal(e.state);
    const ReceiverPairState rho = e.oracle ? oracle::oracle_rdm(spec, psi, s.t) : evolve_receiver_pair(decompose(spec), psi, s.t);
    ordered_json re = ordered_json::array(), im = ordered_json::array();
    for (int i = 0; i < 4; ++i) {
        ordered_json rr = ordered_json::array(), ii = ordered_json::array();
        for (int k = 0; k < 4; ++k) {
            rr.push_back(rho.rho(i, k).real());
            ii.push_back(rho.rho(i, k).imag());
        }
        re.push_back(rr);
        im.push_back(ii);
    }
    ordered_json j = {{"N", s.sites}, {"n", s.block}, {"h", s.field}, {"t", s.t},
                      {"basis", {"|11>", "|10>", "|01>", "|00>"}}, {"method", e.oracle ? "sector-oracle" : "amplitudes"},
                      {"re", re}, {"im", im}, {"trace", rho.trace()}, {"purity", rho.purity()},
                      {"min_eigenvalue", rho.min_eigenvalue()}, {"excitations", rho.excitation_number()},
                      {"fidelity", fidelity_against(rho, psi, s.receiver_frame())}};
    emit_json(s, j, out);
    return kSuccess;
}

int cmd_fidelity(const Shared& s, const Extra& e, std::ostream& out) {
    const SpectralDecomposition sd = decompose(build_chain(s.sites, s.block, s.field, s.coupling()));
    const FidelityClass cls = s.fidelity_class();
    AverageFidelity f;
    if (cls == FidelityClass::General || e.monte_carlo) {
        const CounterRng rng(s.seed, 0xF1DE);
        f = cls == FidelityClass::General
                ? avg_fidelity_general_mc(sd, s.t, s.samples, rng, s.options(), s.thread_count())
                : monte_carlo_average(sd, s.t, cls, s.samples, rng, s.options(), s.thread_count());
    } else if (cls == FidelityClass::OneQubit) {
        f = avg_fidelity_1q(amplitude_1p(sd, s.sites, 1, s.t));
    } else if (cls == FidelityClass::Omega1) {
        f = avg_fidelity_omega1(sd, s.t, s.options());
    } else {
        f = avg_fidelity_omega2(sd, s.t, s.options());
    }
    ordered_json j = {{"N", s.sites}, {"n", s.block}, {"h", s.field}, {"t", s.t}, {"class", s.cls},
                      {"value", f.value}, {"method", to_string(f.method)}};
    j["stderr"] = f.mc_stderr ? ordered_json(*f.mc_stderr) : ordered_json(nullptr);
    if (f.mc_stderr) {
        j["samples"] = s.samples;
        j["seed"] = s.seed;
    }
    emit_json(s, j, out);
    return kSuccess;
}

double resolved_t_max(const Shared& s, double fallback) { return s.t_max > 0.0 ? s.t_max : fallback; }

int cmd_scan_time(const Shared& s, const Extra& e, std::ostream& out) {
    const double t_max = resolved_t_max(s, default_t_max(s.sites));
    const ScanResult r = max_over_time(scan_request(s, t_max, e.refine, e.trace_points));
    auto args = shared_arguments(s, t_max);
    args.insert(args.end(), {"--refine", std::to_string(e.refine), "--trace-points", std::to_string(e.trace_points)});
    if (!e.trace_out.empty()) args.insert(args.end(), {"--trace", e.trace_out});
    ordered_json cfg = shared_config(s, t_max);
    cfg["refine"] = e.refine;
    cfg["trace_points"] = e.trace_points;
    std::vector<std::filesystem::path> extra;
    if (!e.trace_out.empty()) {
        std::ofstream f(e.trace_out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + e.trace_out);
        write_trace_csv(f, r.trace);
        extra.emplace_back(e.trace_out);
    }
    emit_csv(s, make_manifest("scan-time", args, cfg, s.seed),
             [&](std::ostream& os) { write_scan_csv(os, {r}, s.fidelity_class(), s.seed); }, out, extra);
    return kSuccess;
}

std::vector<double> field_values(const Extra& e) {
    if (!e.h_list.empty()) return e.h_list;
    if (!(e.h_step > 0.0) || e.h_max < e.h_min) throw std::invalid_argument("need h-step > 0 and h-max >= h-min");
    std::vector<double> h;
    const auto steps = static_cast<std::int64_t>(std::floor((e.h_max - e.h_min) / e.h_step + 1e-9));
    for (std::int64_t k = 0; k <= steps; ++k) h.push_back(e.h_min + static_cast<double>(k) * e.h_step);
    return h;
}

int run_sweep(const std::string& command, const Shared& s, const Extra& e, const std::vector<double>& fields,
              double t_max, std::vector<std::string> args, std::ostream& out) {
    const auto rows = field_sweep(scan_request(s, t_max, e.refine, 0), fields);
    ordered_json cfg = shared_config(s, t_max);
    cfg["fields"] = fields;
    cfg["refine"] = e.refine;
    emit_csv(s, make_manifest(command, std::move(args), cfg, s.seed),
             [&](std::ostream& os) { write_scan_csv(os, rows, s.fidelity_class(), s.seed); }, out);
    return kSuccess;
}

int cmd_scan_field(const Shared& s, const Extra& e, std::ostream& out) {
    const double t_max = resolved_t_max(s, default_t_max(s.sites));
    const auto fields = field_values(e);
    auto args = shared_arguments(s, t_max);
    args.insert(args.end(), {"--h-list", join(fields), "--refine", std::to_string(e.refine)});
    return run_sweep("scan-field", s, e, fields, t_max, args, out);
}

int run_threshold(const std::string& command, const Shared& s, const Extra& e, double t_max,
                  std::vector<std::string> args, std::ostream& out) {
    if (e.n_max < e.n_min) throw std::invalid_argument("N-max < N-min");
    ThresholdRequest r;
    for (int n = e.n_min; n <= e.n_max; ++n) r.sites.push_back(n);
    r.block = s.block;
    r.profile = s.coupling();
    r.fidelity_class = s.fidelity_class();
    r.options = s.options();
    r.target = e.target;
    r.t_max = t_max;
    if (s.grid > 0.0) r.grid_spacing = s.grid;
    r.coarse_step = e.coarse_step;
    r.resolution = e.resolution;
    r.field_cap = e.h_cap;
    r.samples = s.samples;
    r.seed = s.seed;
    r.threads = s.thread_count();
    const auto rows = threshold_field(r);
    ordered_json cfg = shared_config(s, t_max);
    cfg["N_range"] = {e.n_min, e.n_max};
    cfg["target"] = e.target;
    cfg["h_cap"] = e.h_cap;
    cfg["coarse_step"] = e.coarse_step;
    cfg["resolution"] = e.resolution;
    emit_csv(s, make_manifest(command, std::move(args), cfg, s.seed),
             [&](std::ostream& os) { write_threshold_csv(os, rows, s.block, s.fidelity_class(), s.seed, e.target); },
             out);
    return kSuccess;
}

std::vector<std::string> threshold_arguments(const Extra& e) {
    return {"--N-min", std::to_string(e.n_min), "--N-max", std::to_string(e.n_max), "--target", num(e.target),
            "--h-cap", num(e.h_cap), "--coarse-step", num(e.coarse_step), "--resolution", num(e.resolution)};
}

int cmd_threshold(const Shared& s, const Extra& e, std::ostream& out) {
    const double t_max = resolved_t_max(s, 1.3e4);
    auto args = shared_arguments(s, t_max);
    const auto more = threshold_arguments(e);
    args.insert(args.end(), more.begin(), more.end());
    return run_threshold("threshold", s, e, t_max, args, out);
}

int cmd_reproduce(Shared s, Extra e, std::ostream& out) {
    std::vector<std::string> head = {"--figure", e.figure};
    if (e.figure == "5") {
        s.cls = "omega1";
        const double t_max = resolved_t_max(s, 1.3e4);
        auto args = shared_arguments(s, t_max);
        const auto more = threshold_arguments(e);
        args.insert(args.begin(), head.begin(), head.end());
        args.insert(args.end(), more.begin(), more.end());
        return run_threshold("reproduce", s, e, t_max, args, out);
    }
    s.cls = "general";
    s.sites = e.figure == "4a" ? 7 : 8;
    const double t_max = resolved_t_max(s, default_t_max(s.sites));
    const auto fields = e.h_list.empty() ? kFigure4Fields : e.h_list;
    auto args = shared_arguments(s, t_max);
    args.insert(args.begin(), head.begin(), head.end());
    args.insert(args.end(), {"--h-list", join(fields), "--refine", std::to_string(e.refine)});
    return run_sweep("reproduce", s, e, fields, t_max, args, out);
}

std::string short_num(double x) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << x;
    return os.str();
}

int cmd_verify(const Shared& s, const Extra& e, std::ostream& out) {
    const auto report = oracle::run_battery(s.seed, e.draws);
    for (const auto& l : report.lines)
        out << l.name << ": max deviation " << num(l.max_deviation) << " (tolerance " << short_num(l.tolerance) << ") "
            << (l.passed() ? "ok" : "FAILED") << '\n';
    return report.passed() ? kSuccess : kDomainError;
}

void add_shared(CLI::App& app, Shared& s) {
    app.add_option("--N", s.sites, "chain length")->capture_default_str();
    app.add_option("--n", s.block, "sender/receiver block size")->capture_default_str();
    app.add_option("--h", s.field, "barrier field")->capture_default_str();
    app.add_option("--profile", s.profile, "coupling profile")
        ->check(CLI::IsMember({"uniform", "engineered", "ballistic"}))
        ->capture_default_str();
    app.add_option("--c", s.c, "ballistic endpoint constant")->capture_default_str();
    app.add_option("--t", s.t, "evolution time")->capture_default_str();
    app.add_option("--t-max", s.t_max, "scan window; default 2e4 odd N, 6e4 even N, 1.3e4 threshold")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--grid", s.grid, "upper bound on the coarse time spacing")->check(CLI::NonNegativeNumber);
    app.add_option("--class", s.cls, "fidelity class")
        ->check(CLI::IsMember({"general", "omega1", "omega2", "one-qubit"}))
        ->capture_default_str();
    app.add_option("--samples", s.samples, "Monte Carlo samples")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--seed", s.seed, "RNG seed")->capture_default_str();
    app.add_option("--out", s.out, "output file; stdout when omitted");
    app.add_option("--threads", s.threads, "worker threads; QST_THREADS when omitted")->check(CLI::PositiveNumber);
    app.add_option("--frame", s.frame, "receiver assignment")
        ->check(CLI::IsMember({"direct", "mirrored"}))
        ->capture_default_str();
    app.add_flag("--phase-opt", s.phase_opt, "maximize over a phase on the one-excitation receiver sector");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_replay(const Extra& e, const Shared& s, bool out_given, std::ostream& out, std::ostream& err) {
    RunManifest m = read_manifest(e.manifest);
    std::vector<std::string> args = m.arguments;
    if (out_given) {
        auto it = std::find(args.begin(), args.end(), "--out");
        if (it != args.end() && it + 1 != args.end()) *(it + 1) = s.out;
        else args.insert(args.end(), {"--out", s.out});
    }
    return dispatch(args, out, err);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact state-transfer simulator for XX spin chains with barrier fields", "qst"};
    app.set_help_flag("--help", "print this help and exit");
    app.failure_message(CLI::FailureMessage::help);
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file with the shared keys; flags win");
    app.set_version_flag("--version", std::string(kToolVersion));

    Shared s;
    Extra e;
    add_shared(app, s);

    auto* spectrum = app.add_subcommand("spectrum", "single-particle spectrum (CSV)");
    auto* amplitude = app.add_subcommand("amplitude", "r-excitation transition amplitude (JSON)");
    amplitude->add_option("--sources", e.sources, "sender sites, comma separated")->delimiter(',');
    amplitude->add_option("--targets", e.targets, "target sites, comma separated")->delimiter(',');
    amplitude->add_flag("--oracle", e.oracle, "use the sector evolution instead of the determinant");
    auto* rdm = app.add_subcommand("rdm", "receiver pair density matrix (JSON)");
    rdm->add_option("--state", e.state, "eight reals: re/im of alpha, beta, gamma, delta on |00>,|01>,|10>,|11>");
    rdm->add_flag("--oracle", e.oracle, "use the sector evolution");
    auto* fidelity = app.add_subcommand("fidelity", "average fidelity at one time (JSON)");
    fidelity->add_flag("--mc", e.monte_carlo, "Monte Carlo for the closed-form classes too");
    auto* scan_time = app.add_subcommand("scan-time", "max over t in [0, t-max] (CSV)");
    scan_time->add_option("--trace-points", e.trace_points, "downsampled F(t) points")->check(CLI::NonNegativeNumber);
    scan_time->add_option("--trace", e.trace_out, "CSV file for the trace");
    auto* scan_field = app.add_subcommand("scan-field", "max over t for each h (CSV)");
    scan_field->add_option("--h-min", e.h_min)->capture_default_str();
    scan_field->add_option("--h-max", e.h_max)->capture_default_str();
    scan_field->add_option("--h-step", e.h_step)->capture_default_str();
    scan_field->add_option("--h-list", e.h_list, "explicit fields, comma separated")->delimiter(',');
    auto* threshold = app.add_subcommand("threshold", "smallest h reaching the target per N (CSV)");
    auto* reproduce = app.add_subcommand("reproduce", "rerun a figure experiment (CSV)");
    reproduce->add_option("--figure", e.figure)->required()->check(CLI::IsMember({"4a", "4b", "5"}));
    reproduce->add_option("--h-list", e.h_list, "fields for 4a/4b, comma separated")->delimiter(',');
    for (auto* sub : {threshold, reproduce}) {
        sub->add_option("--N-min", e.n_min)->capture_default_str();
        sub->add_option("--N-max", e.n_max)->capture_default_str();
        sub->add_option("--target", e.target)->capture_default_str();
        sub->add_option("--h-cap", e.h_cap)->capture_default_str();
        sub->add_option("--coarse-step", e.coarse_step)->capture_default_str();
        sub->add_option("--resolution", e.resolution)->capture_default_str();
    }
    for (auto* sub : {scan_time, scan_field, reproduce})
        sub->add_option("--refine", e.refine, "grid candidates refined")->check(CLI::PositiveNumber)->capture_default_str();
    auto* verify = app.add_subcommand("verify", "oracle battery");
    verify->add_option("--draws", e.draws)->check(CLI::PositiveNumber)->capture_default_str();
    auto* replay = app.add_subcommand("replay", "rerun the invocation recorded in a manifest");
    replay->add_option("--manifest", e.manifest)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::Error& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (spectrum->parsed()) return cmd_spectrum(s, out);
        if (amplitude->parsed()) return cmd_amplitude(s, e, out);
        if (rdm->parsed()) return cmd_rdm(s, e, out);
        if (fidelity->parsed()) return cmd_fidelity(s, e, out);
        if (scan_time->parsed()) return cmd_scan_time(s, e, out);
        if (scan_field->parsed()) return cmd_scan_field(s, e, out);
        if (threshold->parsed()) return cmd_threshold(s, e, out);
        if (reproduce->parsed()) return cmd_reproduce(s, e, out);
        if (verify->parsed()) return cmd_verify(s, e, out);
        if (replay->parsed()) return cmd_replay(e, s, app.count("--out") > 0, out, err);
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kDomainError;
    }
    return kUsageError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return dispatch(args, out, err);
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace qst::cli
