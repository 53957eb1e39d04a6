#include "mfe/harness/spec.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "mfe/errors.hpp"
#include "mfe/geometry/builtin.hpp"

namespace mfe {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::Config, what); }

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) {
    // Integers may be given where reals are expected, not the reverse.
    return a.is_number_float() || !b.is_number_float();
  }
  return a.type() == b.type();
}

// Overlays `user` on `defaults`, requiring the same keys and value types.
json merge_checked(const json& defaults, const json& user, const std::string& where) {
  json out = defaults;
  if (user.is_null()) return out;
  if (!user.is_object()) config_error(where + " must be an object");
  for (const auto& [key, value] : user.items()) {
    if (!defaults.contains(key)) config_error("unknown key '" + key + "' in " + where);
    const json& d = defaults[key];
    if (!same_kind(d, value)) config_error("wrong type for '" + key + "' in " + where);
    out[key] = d.is_object() ? merge_checked(d, value, where + "." + key) : value;
  }
  return out;
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(where + "." + key + ": " + e.what());
  }
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"lan", "regularity", "superefficiency", "crlb",
                                                 "convolution", "van_trees", "sim", "aipw"};
  return kinds;
}

json kind_defaults(const std::string& kind) {
  if (kind == "lan") {
    return {{"tolerances", {{"mean_se_multiple", 3.0}, {"var_rel", 0.10}, {"ad_p_min", 0.01}}},
            {"params", json::object()}};
  }
  if (kind == "regularity") {
    return {{"tolerances", {{"hodges_ratio_min", 5.0}, {"failure_fraction_max", 0.01}}},
            {"params", {{"permutations", 1000}, {"level", 0.01}, {"calibration_size", 300}}}};
  }
  if (kind == "superefficiency") {
    return {{"tolerances", {{"risk_ratio_max", 0.2}, {"hodges_growth_min", 3.0}, {"frechet_variation_max", 0.15},
                            {"failure_fraction_max", 0.01}}},
            {"params", {{"c", 1.0}}}};
  }
  if (kind == "crlb" || kind == "convolution") {
    return {{"tolerances", {{"cov_frobenius_rel", 0.10}, {"slack_se", 3.0}, {"failure_fraction_max", 0.01}}},
            {"params", {{"bootstrap", 200}}}};
  }
  if (kind == "van_trees") {
    return {{"tolerances", {{"slack_se", 3.0}, {"crlb_rel", 0.05}}},
            {"params",
             {{"draws", 2000},
              {"half_width", 1.0},
              {"shape", "cosine_squared"},
              {"panels", 2},
              {"bootstrap", 200},
              {"shrinking_spreads", {1.0, 0.5, 0.25, 0.125, 0.0625}},
              {"growing_spreads", {1.0, 2.0, 4.0, 8.0, 16.0}}}}};
  }
  if (kind == "sim") {
    return {{"tolerances", {{"norm_err_max", 1e-14},
                            {"symbolic_err_max", 1e-12},
                            {"derivative_err_max", 1e-6},
                            {"corr_se_multiple", 4.0},
                            {"bound_rel", 0.03}}},
            {"params",
             {{"orthogonality_dim", 3},
              {"orthogonality_n", 100000},
              {"bound_n", 200000},
              {"nuisance", "oracle"},
              {"exp_cases", 1000}}}};
  }
  if (kind == "aipw") {
    return {{"tolerances", {{"reduction_err_max", 1e-10}, {"mean_se_multiple", 4.0}, {"cov_frobenius_rel", 0.15},
                            {"failure_fraction_max", 0.01}}},
            {"params", {{"z_half_width", 2.0}, {"pi_intercept", 0.5}, {"pi_slope", 1.0}, {"shift", 0.3}}}};
  }
  config_error("unknown experiment kind '" + kind + "'");
}

ExperimentSpec parse_spec(const json& doc) {
  reject_unknown(doc, {"kind", "name", "description", "manifold", "model", "n", "reps", "h", "seed", "estimator",
                       "tolerances", "params", "output"},
                 "spec");
  for (const char* key : {"kind", "manifold", "n", "reps", "seed"}) {
    if (!doc.contains(key)) config_error(std::string("missing required key '") + key + "'");
  }
  ExperimentSpec s;
  s.kind = get<std::string>(doc, "kind", "spec");
  const json defaults = kind_defaults(s.kind);
  s.name = doc.value("name", s.kind);
  s.description = doc.value("description", "");
  s.manifold = get<std::string>(doc, "manifold", "spec");
  const ManifoldPtr m = make_manifold(s.manifold);

  if (doc.contains("model")) {
    const json& model = doc["model"];
    reject_unknown(model, {"sigma", "center"}, "model");
    if (model.contains("sigma")) s.sigma = get<double>(model, "sigma", "model");
    if (model.contains("center")) s.center = get<std::vector<double>>(model, "center", "model");
  }
  if (!(s.sigma > 0.0)) config_error("model.sigma must be positive");
  if (!s.center.empty() && static_cast<int>(s.center.size()) != m->chart_dim()) {
    config_error("model.center must have " + std::to_string(m->chart_dim()) + " coordinates");
  }

  s.n = get<std::vector<int>>(doc, "n", "spec");
  if (s.n.empty()) config_error("n must be non-empty");
  for (size_t i = 0; i < s.n.size(); ++i) {
    if (s.n[i] < 1) config_error("n entries must be positive");
    if (i > 0 && s.n[i] <= s.n[i - 1]) config_error("n must be strictly increasing");
  }
  s.reps = get<int>(doc, "reps", "spec");
  const std::set<std::string> distributional = {"lan", "regularity", "superefficiency", "crlb", "convolution", "aipw"};
  if (distributional.count(s.kind) && s.reps < 100) config_error("reps must be at least 100 for kind " + s.kind);
  if (s.reps < 1) config_error("reps must be positive");

  if (doc.contains("h")) s.h = get<std::vector<std::vector<double>>>(doc, "h", "spec");
  for (const auto& h : s.h) {
    if (static_cast<int>(h.size()) != m->dim()) config_error("each h must have " + std::to_string(m->dim()) + " coordinates");
  }
  if (s.h.empty()) s.h.push_back(std::vector<double>(static_cast<size_t>(m->dim()), 0.0));
  s.seed = get<std::uint64_t>(doc, "seed", "spec");

  if (doc.contains("estimator")) {
    const json& e = doc["estimator"];
    reject_unknown(e, {"step", "tol", "max_iter", "positivity_floor", "bandwidth"}, "estimator");
    s.estimator.step = e.value("step", s.estimator.step);
    s.estimator.tol = e.value("tol", s.estimator.tol);
    s.estimator.max_iter = e.value("max_iter", s.estimator.max_iter);
    s.estimator.positivity_floor = e.value("positivity_floor", s.estimator.positivity_floor);
    s.estimator.bandwidth = e.value("bandwidth", s.estimator.bandwidth);
    if (!(s.estimator.step > 0.0) || !(s.estimator.tol > 0.0) || s.estimator.max_iter < 1) {
      config_error("estimator step, tol and max_iter must be positive");
    }
  }

  const json tol = merge_checked(defaults["tolerances"], doc.value("tolerances", json()), "tolerances");
  for (const auto& [k, v] : tol.items()) s.tolerances[k] = v.get<double>();
  s.params = merge_checked(defaults["params"], doc.value("params", json()), "params");

  if (doc.contains("output")) {
    const json& o = doc["output"];
    reject_unknown(o, {"dir", "format"}, "output");
    s.out_dir = o.value("dir", "");
    s.format = o.value("format", "json");
    if (s.format != "json" && s.format != "csv") config_error("output.format must be json or csv");
  }
  return s;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open spec file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    config_error("spec file '" + path + "': " + e.what());
  }
  return parse_spec(doc);
}

nlohmann::ordered_json spec_to_json(const ExperimentSpec& s) {
  nlohmann::ordered_json j;
  j["kind"] = s.kind;
  j["name"] = s.name;
  if (!s.description.empty()) j["description"] = s.description;
  j["manifold"] = s.manifold;
  j["model"] = {{"sigma", s.sigma}, {"center", s.center}};
  j["n"] = s.n;
  j["reps"] = s.reps;
  j["h"] = s.h;
  j["seed"] = s.seed;
  j["estimator"] = {{"step", s.estimator.step},
                    {"tol", s.estimator.tol},
                    {"max_iter", s.estimator.max_iter},
                    {"positivity_floor", s.estimator.positivity_floor},
                    {"bandwidth", s.estimator.bandwidth}};
  nlohmann::ordered_json tol = nlohmann::ordered_json::object();
  for (const auto& [k, v] : s.tolerances) tol[k] = v;
  j["tolerances"] = tol;
  j["params"] = nlohmann::ordered_json::parse(s.params.dump());
  return j;
}

}  // namespace mfe
