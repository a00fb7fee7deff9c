#include "tcond/report_io.hpp"

#include <fstream>
#include <stdexcept>

#include "tcond/detail/format.hpp"

namespace tcond {

namespace {

std::vector<double> doubles_from(const Json& j) {
    std::vector<double> out;
    out.reserve(j.size());
    for (const Json& v : j) out.push_back(v.get<double>());
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string hash_hex(std::uint64_t h) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = kDigits[h & 0xF];
        h >>= 4;
    }
    return s;
}

void append_manifest_line(const std::filesystem::path& dir, const Json& line) {
    std::ofstream out(dir / "manifest.jsonl", std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot append to manifest in " + dir.string());
    out << line.dump() << '\n';
    if (!out) throw std::runtime_error("manifest write failed in " + dir.string());
}

}  // namespace

Json symbol_to_json(const LaurentSymbol& sym) {
    return Json{{"r", sym.r}, {"s", sym.s}, {"coeffs", sym.coeffs}};
}

LaurentSymbol symbol_from_json(const Json& j) {
    return make_symbol(j.at("r").get<int>(), j.at("s").get<int>(), doubles_from(j.at("coeffs")));
}

Json poly_to_json(const KacPolynomial& p) {
    return Json{{"r", 0}, {"s", p.degree()}, {"coeffs", p.coeffs}};
}

KacPolynomial poly_from_json(const Json& j) {
    if (j.at("r").get<int>() != 0)
        throw std::invalid_argument("polynomial json must have r = 0");
    std::vector<double> coeffs = doubles_from(j.at("coeffs"));
    if (static_cast<int>(coeffs.size()) != j.at("s").get<int>() + 1)
        throw std::invalid_argument("polynomial json: coefficient count does not match s + 1");
    return KacPolynomial(std::move(coeffs));
}

Json config_to_json(const ExperimentConfig& cfg) {
    return Json{{"dist", cfg.dist},
                {"degree", cfg.degree},
                {"lower", cfg.lower},
                {"upper", cfg.upper},
                {"trials", cfg.trials},
                {"seed", cfg.seed},
                {"radius_offsets", cfg.radius_offsets},
                {"n_sweep", cfg.n_sweep},
                {"angles", cfg.angles},
                {"a_list", cfg.a_list},
                {"quad_nodes", cfg.quad_nodes},
                {"threads", cfg.threads},
                {"fixed_coeffs", cfg.fixed_coeffs},
                {"thresholds", cfg.thresholds}};
}

ExperimentConfig config_from_json(const Json& j) {
    static const char* kKeys[] = {"dist",    "degree",  "lower",          "upper",
                                  "trials",  "seed",    "radius_offsets", "n_sweep",
                                  "angles",  "a_list",  "quad_nodes",     "threads",
                                  "fixed_coeffs", "thresholds"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool known = false;
        for (const char* k : kKeys) known = known || key == k;
        if (!known) throw std::invalid_argument("config json: unknown key \"" + key + "\"");
    }
    ExperimentConfig cfg;
    if (j.contains("dist")) j.at("dist").get_to(cfg.dist);
    if (j.contains("degree")) j.at("degree").get_to(cfg.degree);
    if (j.contains("lower")) j.at("lower").get_to(cfg.lower);
    if (j.contains("upper")) j.at("upper").get_to(cfg.upper);
    if (j.contains("trials")) j.at("trials").get_to(cfg.trials);
    if (j.contains("seed")) j.at("seed").get_to(cfg.seed);
    if (j.contains("radius_offsets")) cfg.radius_offsets = doubles_from(j.at("radius_offsets"));
    if (j.contains("n_sweep")) {
        cfg.n_sweep.clear();
        for (const Json& v : j.at("n_sweep")) cfg.n_sweep.push_back(v.get<int>());
    }
    if (j.contains("angles")) cfg.angles = doubles_from(j.at("angles"));
    if (j.contains("a_list")) cfg.a_list = doubles_from(j.at("a_list"));
    if (j.contains("quad_nodes")) j.at("quad_nodes").get_to(cfg.quad_nodes);
    if (j.contains("threads")) j.at("threads").get_to(cfg.threads);
    if (j.contains("fixed_coeffs")) cfg.fixed_coeffs = doubles_from(j.at("fixed_coeffs"));
    if (j.contains("thresholds")) {
        cfg.thresholds.clear();
        for (const auto& [key, value] : j.at("thresholds").items())
            cfg.thresholds[key] = value.get<double>();
    }
    return cfg;
}

Json report_to_json(const ExperimentReport& report) {
    Json estimates = Json::array();
    for (const Estimate& e : report.estimates)
        estimates.push_back(Json{{"name", e.name}, {"value", e.value}, {"std_error", e.std_error}});
    Json targets = Json::array();
    for (const TargetValue& t : report.targets)
        targets.push_back(Json{{"name", t.name}, {"value", t.value}, {"note", t.note}});
    Json verdicts = Json::array();
    for (const Verdict& v : report.verdicts)
        verdicts.push_back(Json{{"name", v.name},
                                {"observed", v.observed},
                                {"target", v.target},
                                {"tolerance", v.tolerance},
                                {"threshold_name", v.threshold_name},
                                {"pass", v.pass}});
    return Json{{"schema", std::string(kReportSchema)},
                {"name", report.name},
                {"config", config_to_json(report.config)},
                {"attempted", report.attempted},
                {"skipped", report.skipped},
                {"columns", report.columns},
                {"rows", report.rows},
                {"estimates", estimates},
                {"targets", targets},
                {"verdicts", verdicts},
                {"diagnostics", report.diagnostics},
                {"all_pass", report.all_pass()},
                {"wall_time_seconds", report.wall_time_seconds}};
}

std::string report_csv(const ExperimentReport& report) {
    std::string out;
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
        if (c) out += ',';
        out += report.columns[c];
    }
    out += '\n';
    for (const std::vector<double>& row : report.rows) {
        if (row.size() != report.columns.size())
            throw std::invalid_argument("report row width does not match the column header");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += detail::format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

WrittenFiles write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::string stem = report.name + "_seed" + std::to_string(report.config.seed);
    WrittenFiles files;
    files.json_path = dir / (stem + ".json");
    files.csv_path = dir / (stem + ".csv");
    files.manifest_path = dir / "manifest.jsonl";

    const std::string json_text = report_to_json(report).dump(2) + "\n";
    const std::string csv_text = report_csv(report);
    write_text(files.json_path, json_text);
    write_text(files.csv_path, csv_text);

    append_manifest_line(dir, Json{{"name", report.name},
                                   {"seed", report.config.seed},
                                   {"status", "ok"},
                                   {"json", files.json_path.filename().string()},
                                   {"json_fnv1a", hash_hex(fnv1a(json_text))},
                                   {"csv", files.csv_path.filename().string()},
                                   {"csv_fnv1a", hash_hex(fnv1a(csv_text))},
                                   {"all_pass", report.all_pass()}});
    return files;
}

void append_failure_manifest(const std::filesystem::path& dir, const std::string& name,
                             std::uint64_t seed, const std::string& message) {
    std::filesystem::create_directories(dir);
    append_manifest_line(
        dir, Json{{"name", name}, {"seed", seed}, {"status", "failed"}, {"message", message}});
}

}  // namespace tcond
