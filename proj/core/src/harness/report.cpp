#include "mfe/harness/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfe/errors.hpp"

namespace mfe {

using ojson = nlohmann::ordered_json;

bool ExperimentReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

CheckResult& ExperimentReport::check(const std::string& name, const std::string& key, double value,
                                     double measured, const std::string& relation, int row) {
  bool ok;
  if (relation == "<") {
    ok = measured < value;
  } else if (relation == "<=") {
    ok = measured <= value;
  } else if (relation == ">") {
    ok = measured > value;
  } else if (relation == ">=") {
    ok = measured >= value;
  } else {
    fail(ErrorCode::InvalidArgument, "unknown check relation '" + relation + "'");
  }
  checks.push_back({name, key, value, measured, relation, ok && std::isfinite(measured), row});
  return checks.back();
}

const CheckResult* ExperimentReport::find_check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "NaN";
  if (std::isinf(x)) return x > 0 ? "Infinity" : "-Infinity";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

// JSON writer that renders numbers with format_double; non-finite values
// become null.
void emit(std::ostream& os, const ojson& j, int indent, int depth) {
  const std::string pad(static_cast<size_t>(indent * (depth + 1)), ' ');
  const std::string end_pad(static_cast<size_t>(indent * depth), ' ');
  switch (j.type()) {
    case ojson::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << ojson(it.key()).dump() << ": ";
        emit(os, it.value(), indent, depth + 1);
      }
      os << "\n" << end_pad << "}";
      return;
    }
    case ojson::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const ojson& e) { return e.is_primitive(); });
      os << "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) os << (flat ? ", " : ",");
        if (!flat) os << "\n" << pad;
        first = false;
        emit(os, e, indent, depth + 1);
      }
      if (!flat) os << "\n" << end_pad;
      os << "]";
      return;
    }
    case ojson::value_t::number_float: {
      const double x = j.get<double>();
      os << (std::isfinite(x) ? format_double(x) : "null");
      return;
    }
    default:
      os << j.dump();
  }
}

ojson matrix_json(const Eigen::MatrixXd& m) {
  ojson data = ojson::array();
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

ojson metrics_json(const std::vector<Metric>& ms) {
  ojson o = ojson::object();
  for (const auto& m : ms) o[m.name] = m.value;
  return o;
}

ojson matrices_json(const std::vector<NamedMatrix>& ms) {
  ojson o = ojson::object();
  for (const auto& m : ms) o[m.name] = matrix_json(m.value);
  return o;
}

std::string h_label(const std::vector<double>& h) {
  std::string s;
  for (size_t i = 0; i < h.size(); ++i) s += (i ? ";" : "") + format_double(h[i]);
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::string report_to_json(const ExperimentReport& r, bool include_runtime) {
  ojson j;
  j["name"] = r.name;
  j["kind"] = r.kind;
  j["manifold"] = r.manifold;
  j["seed"] = r.seed;
  j["pass"] = r.pass();
  j["spec"] = r.spec;
  ojson checks = ojson::array();
  for (const auto& c : r.checks) {
    ojson o;
    o["name"] = c.name;
    o["tolerance_key"] = c.tolerance_key;
    o["tolerance"] = c.tolerance;
    o["measured"] = c.measured;
    o["relation"] = c.relation;
    o["pass"] = c.pass;
    if (c.row >= 0) o["row"] = c.row;
    checks.push_back(o);
  }
  j["checks"] = checks;
  j["summary"] = metrics_json(r.summary);
  j["matrices"] = matrices_json(r.matrices);
  ojson rows = ojson::array();
  for (const auto& row : r.rows) {
    ojson o;
    o["n"] = row.n;
    o["h"] = row.h;
    o["label"] = row.label;
    o["metrics"] = metrics_json(row.metrics);
    o["matrices"] = matrices_json(row.matrices);
    rows.push_back(o);
  }
  j["rows"] = rows;
  j["replicates"] = {{"total", r.replicates_total},
                     {"failed", r.replicates_failed},
                     {"failure_fraction", r.replicates_total ? static_cast<double>(r.replicates_failed) /
                                                                   static_cast<double>(r.replicates_total)
                                                             : 0.0}};
  if (include_runtime) j["runtime_seconds"] = r.runtime_seconds;
  std::ostringstream os;
  emit(os, j, 2, 0);
  os << "\n";
  return os.str();
}

std::string report_to_csv(const ExperimentReport& r) {
  std::vector<std::string> cols;
  for (const auto& row : r.rows)
    for (const auto& m : row.metrics)
      if (std::find(cols.begin(), cols.end(), m.name) == cols.end()) cols.push_back(m.name);
  std::ostringstream os;
  os << "experiment,kind,n,h,label";
  for (const auto& c : cols) os << "," << csv_field(c);
  os << ",checks_pass\n";
  for (size_t i = 0; i < r.rows.size(); ++i) {
    const ReportRow& row = r.rows[i];
    os << csv_field(r.name) << "," << r.kind << "," << row.n << "," << h_label(row.h) << "," << csv_field(row.label);
    for (const auto& c : cols) {
      os << ",";
      for (const auto& m : row.metrics)
        if (m.name == c) {
          os << format_double(m.value);
          break;
        }
    }
    bool any = false, ok = true;
    for (const auto& c : r.checks)
      if (c.row == static_cast<int>(i)) {
        any = true;
        ok = ok && c.pass;
      }
    os << "," << (any ? (ok ? "true" : "false") : "") << "\n";
  }
  return os.str();
}

void write_report(const ExperimentReport& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Config, "cannot create output directory '" + dir + "': " + ec.message());
  const auto write = [&](const std::string& file, const std::string& text) {
    std::ofstream out(std::filesystem::path(dir) / file, std::ios::binary);
    if (!out) fail(ErrorCode::Config, "cannot write '" + file + "' in '" + dir + "'");
    out << text;
  };
  write("report.json", report_to_json(r));
  write("summary.csv", report_to_csv(r));
}

}  // namespace mfe
