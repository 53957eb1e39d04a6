#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace mfe {

struct Metric {
  std::string name;
  double value = 0.0;
};

struct NamedMatrix {
  std::string name;
  Eigen::MatrixXd value;
};

/// Results for one (n, h, label) cell of the experiment grid.
struct ReportRow {
  int n = 0;
  std::vector<double> h;
  std::string label;
  std::vector<Metric> metrics;
  std::vector<NamedMatrix> matrices;

  void add(const std::string& name, double value) { metrics.push_back({name, value}); }
  void add(const std::string& name, const Eigen::MatrixXd& value) { matrices.push_back({name, value}); }
};

/// A pass/fail flag tied to a named tolerance of the spec.
struct CheckResult {
  std::string name;
  std::string tolerance_key;
  double tolerance = 0.0;
  double measured = 0.0;
  /// "<", "<=", ">", ">=" comparing measured to tolerance, or "flag".
  std::string relation;
  bool pass = false;
  /// Index into rows when the check belongs to one row, else -1.
  int row = -1;
};

struct ExperimentReport {
  std::string name;
  std::string kind;
  std::string manifold;
  std::uint64_t seed = 0;
  nlohmann::ordered_json spec;
  std::vector<ReportRow> rows;
  std::vector<Metric> summary;
  std::vector<NamedMatrix> matrices;
  std::vector<CheckResult> checks;
  long replicates_total = 0;
  long replicates_failed = 0;
  double runtime_seconds = 0.0;

  bool pass() const;
  /// Adds a check comparing `measured` against tolerance `value`.
  CheckResult& check(const std::string& name, const std::string& key, double value, double measured,
                     const std::string& relation, int row = -1);
  const CheckResult* find_check(const std::string& name) const;
};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

/// Full report. The runtime field is omitted when `include_runtime` is false.
std::string report_to_json(const ExperimentReport& report, bool include_runtime = true);
/// One row per (experiment, n, h, label).
std::string report_to_csv(const ExperimentReport& report);

/// Writes report.json and summary.csv into `dir` (created if missing).
void write_report(const ExperimentReport& report, const std::string& dir);

}  // namespace mfe
