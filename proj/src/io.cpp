#include "qst/io.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace qst {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

void write_scan_csv(std::ostream& os, const std::vector<ScanResult>& rows, FidelityClass cls,
                    std::uint64_t seed) {
    os << "N,n,h,t_star,fbar_max,class,seed\n";
    for (const auto& r : rows)
        os << r.sites << ',' << r.block << ',' << format_number(r.field) << ',' << format_number(r.t_star)
           << ',' << format_number(r.fbar_max) << ',' << to_string(cls) << ',' << seed << '\n';
}

void write_trace_csv(std::ostream& os, const std::vector<TracePoint>& trace) {
    os << "t,fbar\n";
    for (const auto& p : trace) os << format_number(p.t) << ',' << format_number(p.value) << '\n';
}

void write_threshold_csv(std::ostream& os, const std::vector<ThresholdResult>& rows, int block,
                         FidelityClass cls, std::uint64_t seed, double target) {
    os << "N,n,h,t_star,fbar_max,class,seed,target,reached\n";
    for (const auto& r : rows) {
        os << r.sites << ',' << block << ',' << (r.field ? format_number(*r.field) : "") << ','
           << format_number(r.t_star) << ',' << format_number(r.fbar_max) << ',' << to_string(cls) << ','
           << seed << ',' << format_number(target) << ',' << (r.field ? "true" : "false") << '\n';
    }
}

std::string sha256_hex(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 init failed");
    std::array<char, 1 << 14> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "qst";
    j["version"] = version;
    j["command"] = command;
    j["arguments"] = arguments;
    j["seed"] = seed;
    j["timestamp"] = timestamp;
    j["config"] = config;
    nlohmann::ordered_json d = nlohmann::ordered_json::object();
    for (const auto& [file, digest] : digests) d[file] = {{"sha256", digest}};
    j["outputs"] = d;
    return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.arguments = j.at("arguments").get<std::vector<std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.version = j.value("version", std::string(kToolVersion));
    m.timestamp = j.value("timestamp", std::string{});
    if (j.contains("config")) m.config = j.at("config");
    if (j.contains("outputs"))
        for (const auto& [file, entry] : j.at("outputs").items())
            m.digests.emplace_back(file, entry.at("sha256").get<std::string>());
    return m;
}

std::filesystem::path manifest_path(const std::filesystem::path& csv) {
    return std::filesystem::path(csv.string() + ".manifest.json");
}

void write_manifest(RunManifest manifest, const std::vector<std::filesystem::path>& outputs) {
    if (outputs.empty()) throw std::invalid_argument("manifest needs at least one output");
    manifest.timestamp = utc_timestamp();
    manifest.digests.clear();
    for (const auto& p : outputs) manifest.digests.emplace_back(p.filename().string(), sha256_hex(p));
    std::ofstream out(manifest_path(outputs.front()));
    if (!out) throw std::runtime_error("cannot write manifest for " + outputs.front().string());
    out << manifest.to_json().dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return RunManifest::from_json(nlohmann::json::parse(in));
}

}  // namespace qst
