#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sturmkit/construct.hpp"
#include "sturmkit/ode.hpp"
#include "sturmkit/oscillation.hpp"
#include "sturmkit/principality.hpp"

namespace sturmkit {

/// Insertion-ordered JSON so output key order is fixed by construction order
/// and byte-stable across runs.
using Json = nlohmann::ordered_json;

/// Settings stamped into every machine-readable output so a run can be
/// reproduced exactly from the output alone.
struct RunConfig {
  double tol = 1e-10;             // integrator error control
  double eps = 1e-4;              // stand-off from finite interval ends
  double infinite_window = 64.0;  // window half-width factor toward infinite ends
  int ladder_rungs = 8;           // endpoint-mass ladder length
  double ladder_ratio = 0.25;     // geometric shrink factor of the ladder
  double x0 = std::numeric_limits<double>::quiet_NaN();  // NaN: per-equation default
  std::string format = "json";    // "json" | "csv"
  unsigned long seed = 0;         // recorded for sweep reproducibility
};

Json to_json(const RunConfig& c);

/// Encode a double for JSON: finite values stay numbers; infinities and NaN
/// (which JSON cannot represent as literals) become "inf", "-inf", "nan".
Json json_real(double v);

/// Fixed 17-significant-digit rendering used by all CSV cells, enough to
/// round-trip any double exactly.
std::string format_real(double v);

/// One CSV block: a header row plus data rows, rendered with format_real.
struct CsvTable {
  std::string name;  // file stem when written separately
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
  std::string str() const;
};

/// Render tables for one stream: blocks separated by single blank lines.
std::string csv_blocks(const std::vector<CsvTable>& tables);

/// Serialize with a fixed layout (2-space indent, trailing newline).
std::string json_text(const Json& j);

/// Write content to path via a temporary file in the same directory plus an
/// atomic rename, so readers never observe a half-written file.
void write_file_atomic(const std::string& path, const std::string& content);

// --- payload builders ----------------------------------------------------
// Builders return the result payload only; the command front end wraps it
// with the command echo and the RunConfig.

/// Sampled solution: anchor, requested and reached spans, completion flags,
/// and the accepted-step table.
Json trajectory_json(const Trajectory& t);
CsvTable trajectory_table(const Trajectory& t);

/// Per-endpoint classification: verdict, extrapolated value with an error
/// bound when finite, growth model with exponent and fit residual, and the
/// truncation ladder as {eps, I} pairs.  The interval ends are needed to
/// express ladder cuts as distances from the endpoint.
Json principality_json(const PrincipalityReport& rep, double a, double b, double x0);
std::vector<CsvTable> principality_tables(const PrincipalityReport& rep, double a, double b,
                                          double x0);

Json comparison_json(const ComparisonReport& rep);
std::vector<CsvTable> comparison_tables(const ComparisonReport& rep);

Json separation_json(const SeparationReport& rep, double a, double b, double x0);
std::vector<CsvTable> separation_tables(const SeparationReport& rep);

/// Constructed pair with P and v sampled on a uniform grid over the window.
Json counterexample_json(const CounterexampleResult& res, int grid_points);
std::vector<CsvTable> counterexample_tables(const CounterexampleResult& res, int grid_points);

Json separation_counterexample_json(const SeparationCounterexample& res, int grid_points);
std::vector<CsvTable> separation_counterexample_tables(const SeparationCounterexample& res,
                                                       int grid_points);

}  // namespace sturmkit
