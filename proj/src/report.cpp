#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "npspec/errors.hpp"
#include "npspec/harness.hpp"
#include "npspec/text.hpp"

namespace npspec {
namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

constexpr std::string_view kCsvHeader =
    "model,theta,errors,n,test,calibration,level,reps,valid,degenerate,rejections,rate,se";

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

json cell_to_json(const CellResult& c) {
    return json{{"ordinal", c.ordinal},       {"model", c.model},
                {"theta", c.theta},           {"errors", c.errors},
                {"n", c.n},                   {"test", c.test},
                {"calibration", c.calibration}, {"level", c.level},
                {"reps", c.reps},             {"valid", c.valid},
                {"degenerate", c.degenerate}, {"rejections", c.rejections},
                {"rate", c.rate},             {"se", c.se}};
}

CellResult cell_from_json(const json& j) {
    CellResult c;
    c.ordinal = j.at("ordinal").get<std::uint64_t>();
    c.model = j.at("model").get<std::string>();
    c.theta = j.at("theta").get<double>();
    c.errors = j.at("errors").get<std::string>();
    c.n = j.at("n").get<Index>();
    c.test = j.at("test").get<std::string>();
    c.calibration = j.at("calibration").get<std::string>();
    c.level = j.at("level").get<double>();
    c.reps = j.at("reps").get<int>();
    c.valid = j.at("valid").get<int>();
    c.degenerate = j.at("degenerate").get<int>();
    c.rejections = j.at("rejections").get<int>();
    c.rate = j.at("rate").get<double>();
    c.se = j.at("se").get<double>();
    return c;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

std::string format_report_csv(const MCReport& report) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& c : report.cells) {
        out += csv_field(c.model) + ',' + text::format_double(c.theta) + ',' + csv_field(c.errors) + ',' +
               std::to_string(c.n) + ',' + csv_field(c.test) + ',' + csv_field(c.calibration) + ',' +
               text::format_double(c.level) + ',' + std::to_string(c.reps) + ',' + std::to_string(c.valid) + ',' +
               std::to_string(c.degenerate) + ',' + std::to_string(c.rejections) + ',' +
               text::format_double(c.rate) + ',' + text::format_double(c.se) + '\n';
    }
    return out;
}

std::string format_report_text(const MCReport& report) {
    std::ostringstream out;
    out << report.name << "  (config " << report.config_hash << ", seed " << report.master_seed << ", "
        << report.reps << " reps)\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-8s %7s %-10s %5s  %-22s %-11s %6s %7s %6s\n", "model", "theta", "errors", "n",
                  "test", "calibration", "level", "rate%", "se");
    out << line;
    for (const auto& c : report.cells) {
        std::snprintf(line, sizeof line, "%-8s %7.3g %-10s %5lld  %-22s %-11s %6.3g %7.1f %6.2f\n", c.model.c_str(),
                      c.theta, c.errors.c_str(), static_cast<long long>(c.n), c.test.c_str(), c.calibration.c_str(),
                      c.level, c.rate, c.se);
        out << line;
    }
    return out.str();
}

std::string report_to_json(const MCReport& report) {
    json cells = json::array();
    for (const auto& c : report.cells) cells.push_back(cell_to_json(c));
    json doc{{"schema_version", report.schema_version},
             {"name", report.name},
             {"config_hash", report.config_hash},
             {"config", report.config_text},
             {"master_seed", report.master_seed},
             {"reps", report.reps},
             {"cells", std::move(cells)},
             {"table_csv", format_report_csv(report)},
             {"metadata",
              {{"started_utc", report.metadata.started_utc},
               {"wall_seconds", report.metadata.wall_seconds},
               {"threads", report.metadata.threads},
               {"shard", report.metadata.shard}}}};
    return doc.dump(2) + "\n";
}

MCReport report_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw DataError("report: malformed JSON at line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) +
                        ": " + e.what());
    }
    try {
        MCReport r;
        r.schema_version = doc.at("schema_version").get<int>();
        if (r.schema_version != kSchemaVersion) {
            throw DataError("report: unsupported schema_version " + std::to_string(r.schema_version));
        }
        r.name = doc.at("name").get<std::string>();
        r.config_hash = doc.at("config_hash").get<std::string>();
        r.config_text = doc.at("config").get<std::string>();
        r.master_seed = doc.at("master_seed").get<std::uint64_t>();
        r.reps = doc.at("reps").get<int>();
        for (const auto& c : doc.at("cells")) r.cells.push_back(cell_from_json(c));
        const json& meta = doc.at("metadata");
        r.metadata.started_utc = meta.at("started_utc").get<std::string>();
        r.metadata.wall_seconds = meta.at("wall_seconds").get<double>();
        r.metadata.threads = meta.at("threads").get<unsigned>();
        r.metadata.shard = meta.at("shard").get<std::string>();
        return r;
    } catch (const json::exception& e) {
        throw DataError(std::string("report: ") + e.what());
    }
}

void persist_report(const MCReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report '" + path.string() + "'");
    out << report_to_json(report);
    if (!out) throw std::runtime_error("failed writing report '" + path.string() + "'");
}

MCReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open report '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return report_from_json(buf.str());
}

MCReport merge_reports(const MCReport& a, const MCReport& b) {
    if (a.config_hash != b.config_hash) {
        throw std::invalid_argument("cannot merge reports of different configs (" + a.config_hash + " vs " +
                                    b.config_hash + ")");
    }
    MCReport out = a;
    for (const auto& cell : b.cells) {
        const auto it = std::find_if(out.cells.begin(), out.cells.end(),
                                     [&](const CellResult& c) { return c.ordinal == cell.ordinal; });
        if (it == out.cells.end()) {
            out.cells.push_back(cell);
        } else if (!(*it == cell)) {
            throw std::invalid_argument("reports disagree on cell " + std::to_string(cell.ordinal) + " (" + cell.model +
                                        ", " + cell.test + ")");
        }
    }
    std::sort(out.cells.begin(), out.cells.end(),
              [](const CellResult& x, const CellResult& y) { return x.ordinal < y.ordinal; });
    out.metadata.started_utc = std::min(a.metadata.started_utc, b.metadata.started_utc);
    out.metadata.wall_seconds = a.metadata.wall_seconds + b.metadata.wall_seconds;
    out.metadata.threads = std::max(a.metadata.threads, b.metadata.threads);
    out.metadata.shard = "merged";
    return out;
}

}  // namespace npspec
