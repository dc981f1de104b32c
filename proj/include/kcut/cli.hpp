// cli.hpp — batch front end: JSON config in, per-point records out as
// JSON ("kcut-report/1") or CSV.  Artifacts are written atomically and are
// byte-deterministic: fixed seeds, fixed float formatting (all numeric
// values are rounded through the 15-significant-digit wire format before
// they reach a report).

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace kcut::cli {

using Json = nlohmann::ordered_json;

struct GridSpec {
    std::vector<std::pair<double, double>> center;  // (re, im) per coordinate
    double extent = 1.0;
    int samples = 5;
};

struct RunConfig {
    std::string command;
    Json problem;            // command-specific problem description
    GridSpec grid;
    std::string out_path;    // empty: no artifact file
    std::string format = "json";
    double tolerance = -1.0; // < 0: command default
    std::uint64_t seed = 1;
    int workers = 1;
};

using Cell = std::variant<double, std::int64_t, std::string, bool>;

struct Record {
    std::vector<Cell> cells;
};

struct RunReport {
    std::string command;
    std::vector<std::string> columns;
    std::vector<Record> records;
    Json summary;            // ordered; includes "pass"
    double wall_ms = 0.0;    // console only, never emitted
    bool pass = false;
};

// Parses and validates a config document; throws Error(config_error) on
// anything malformed.
RunConfig parse_config(const Json& doc);

// Executes the configured pipeline.  Throws kcut::Error for configuration
// and module failures; verification failures come back as pass = false.
RunReport run(const RunConfig& config);

// Serializes a report; both formats carry the same rounded numbers.
std::string emit(const RunReport& report, const std::string& format);

// Atomic write (temp file + rename).
void write_artifact(const std::string& bytes, const std::string& path);

// exit code: 0 pass, 1 verification failure, 2 config/module error
int exit_code_for(const RunReport& report);

// 15 significant digits, lowercase scientific; rejects non-finite values.
std::string format_wire(double x);
double round_wire(double x);

} // namespace kcut::cli
