#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "tcond/experiments.hpp"
#include "tcond/poly.hpp"

namespace tcond {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kReportSchema = "toeplitz-cond/1";

// {"r": int, "s": int, "coeffs": [...]} with coeffs ordered from -r to s.
// Round trips losslessly (shortest round-trip decimal).
Json symbol_to_json(const LaurentSymbol& sym);
LaurentSymbol symbol_from_json(const Json& j);
Json poly_to_json(const KacPolynomial& p);       // encoded as r = 0 symbol
KacPolynomial poly_from_json(const Json& j);

Json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const Json& j);

// Full report, schema-tagged.  Deterministic except "wall_time_seconds".
Json report_to_json(const ExperimentReport& report);

// Flat per-trial table; header fixed per experiment name.
std::string report_csv(const ExperimentReport& report);

std::uint64_t fnv1a(std::string_view bytes);

struct WrittenFiles {
    std::filesystem::path json_path;
    std::filesystem::path csv_path;
    std::filesystem::path manifest_path;
};

// Writes <name>_seed<seed>.json and .csv under dir and appends a line with
// name, seed, paths and content hashes to dir/manifest.jsonl.
WrittenFiles write_report(const ExperimentReport& report, const std::filesystem::path& dir);

// Appends a failure record for a run that threw before producing a report.
void append_failure_manifest(const std::filesystem::path& dir, const std::string& name,
                             std::uint64_t seed, const std::string& message);

}  // namespace tcond
