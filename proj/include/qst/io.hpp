#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "qst/scan.hpp"

namespace qst {

inline constexpr const char* kToolVersion = "1.0.0";

/// 17 significant digits, '.' separator, independent of the global locale.
std::string format_number(double x);

void write_scan_csv(std::ostream& os, const std::vector<ScanResult>& rows, FidelityClass cls,
                    std::uint64_t seed);
void write_trace_csv(std::ostream& os, const std::vector<TracePoint>& trace);
void write_threshold_csv(std::ostream& os, const std::vector<ThresholdResult>& rows, int block,
                         FidelityClass cls, std::uint64_t seed, double target);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_hex(const std::filesystem::path& path);

/// Provenance record written next to every CSV as `<csv>.manifest.json`.
struct RunManifest {
    std::string command;
    /// Resolved argument list, defaults included; replaying it reproduces the outputs.
    std::vector<std::string> arguments;
    nlohmann::ordered_json config;
    std::uint64_t seed = 0;
    std::string version = kToolVersion;
    std::string timestamp;
    /// file name -> digest
    std::vector<std::pair<std::string, std::string>> digests;

    nlohmann::ordered_json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
};

std::filesystem::path manifest_path(const std::filesystem::path& csv);

/// Digests `outputs`, stamps the current UTC time and writes the sidecar of outputs.front().
void write_manifest(RunManifest manifest, const std::vector<std::filesystem::path>& outputs);
RunManifest read_manifest(const std::filesystem::path& path);

std::string utc_timestamp();

}  // namespace qst
