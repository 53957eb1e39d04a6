#include <charconv>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "mfe/errors.hpp"
#include "mfe/geometry/builtin.hpp"
#include "mfe/geometry/ops.hpp"
#include "mfe/harness/presets.hpp"
#include "mfe/harness/report.hpp"
#include "mfe/harness/runners.hpp"
#include "mfe/harness/spec.hpp"

using namespace mfe;
using nlohmann::json;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

json base_doc() {
  return json::parse(R"({
    "kind": "convolution",
    "manifold": "hyperbolic",
    "model": {"sigma": 0.5},
    "n": [100],
    "reps": 100,
    "seed": 1
  })");
}

void expect_config_error(const json& doc) {
  try {
    parse_spec(doc);
    ADD_FAILURE() << "accepted " << doc.dump();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Config) << e.what();
  }
}

}  // namespace

TEST(Spec, DefaultsFilledIn) {
  const ExperimentSpec s = parse_spec(base_doc());
  EXPECT_EQ(s.kind, "convolution");
  EXPECT_EQ(s.name, "convolution");
  EXPECT_DOUBLE_EQ(s.tolerances.at("cov_frobenius_rel"), 0.10);
  EXPECT_EQ(s.params.at("bootstrap").get<int>(), 200);
  ASSERT_EQ(s.h.size(), 1u);
  EXPECT_EQ(s.h[0], std::vector<double>({0.0, 0.0}));
}

TEST(Spec, UnknownKeysRejectedEverywhere) {
  for (const char* path : {"/extra", "/model/mu", "/estimator/momentum", "/tolerances/made_up", "/params/nope",
                           "/output/compress"}) {
    json doc = base_doc();
    doc[json::json_pointer(path)] = 1;
    expect_config_error(doc);
  }
}

TEST(Spec, InvalidValuesRejected) {
  json doc = base_doc();
  doc["reps"] = 50;
  expect_config_error(doc);
  doc = base_doc();
  doc["n"] = {200, 100};
  expect_config_error(doc);
  doc = base_doc();
  doc["h"] = {{1.0, 0.0, 0.0}};
  expect_config_error(doc);
  doc = base_doc();
  doc["kind"] = "bogus";
  expect_config_error(doc);
  doc = base_doc();
  doc["tolerances"] = {{"cov_frobenius_rel", "loose"}};
  expect_config_error(doc);
  doc = base_doc();
  doc.erase("seed");
  expect_config_error(doc);
  doc = base_doc();
  doc["model"]["sigma"] = -1.0;
  expect_config_error(doc);
}

TEST(Spec, OverridesAndCanonicalForm) {
  json doc = base_doc();
  doc["tolerances"] = {{"slack_se", 4}};
  doc["output"] = {{"dir", "/tmp/x"}, {"format", "csv"}};
  const ExperimentSpec s = parse_spec(doc);
  EXPECT_DOUBLE_EQ(s.tolerances.at("slack_se"), 4.0);
  EXPECT_EQ(s.format, "csv");
  const auto j = spec_to_json(s);
  EXPECT_FALSE(j.contains("output"));
  EXPECT_EQ(parse_spec(json::parse(j.dump())).tolerances, s.tolerances);
}

TEST(Spec, EveryShippedPresetParses) {
  const auto presets = list_presets();
  EXPECT_GE(presets.size(), 16u);
  for (const auto& p : presets) EXPECT_NO_THROW(load_spec(p.path)) << p.name;
}

TEST(Report, ShortestRoundTripFloats) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0, 123456789.125}) {
    const std::string s = format_double(x);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, x) << s;
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(Report, JsonLayout) {
  ExperimentReport r;
  r.name = "t";
  r.kind = "crlb";
  r.runtime_seconds = 1.5;
  ReportRow row{10, {1.0, 0.0}, "x", {}, {}};
  row.add("m", 0.1);
  row.add("nan", std::numeric_limits<double>::quiet_NaN());
  Eigen::MatrixXd a(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  row.add("a", a);
  r.rows.push_back(row);
  r.check("c", "k", 1.0, 0.5, "<", 0);

  const json j = json::parse(report_to_json(r));
  EXPECT_TRUE(j.contains("runtime_seconds"));
  const json& mat = j["rows"][0]["matrices"]["a"];
  EXPECT_EQ(mat["rows"], 2);
  EXPECT_EQ(mat["cols"], 3);
  EXPECT_EQ(mat["data"], json({1, 2, 3, 4, 5, 6}));
  EXPECT_TRUE(j["rows"][0]["metrics"]["nan"].is_null());
  EXPECT_EQ(j["checks"][0]["tolerance_key"], "k");
  EXPECT_TRUE(j["checks"][0]["pass"].get<bool>());
  EXPECT_FALSE(json::parse(report_to_json(r, false)).contains("runtime_seconds"));

  const std::string csv = report_to_csv(r);
  EXPECT_NE(csv.find("experiment"), std::string::npos);
  EXPECT_NE(csv.find("0.1"), std::string::npos);
}

TEST(Report, CheckRelations) {
  ExperimentReport r;
  EXPECT_TRUE(r.check("a", "k", 1.0, 1.0, "<=").pass);
  EXPECT_FALSE(r.check("b", "k", 1.0, 1.0, "<").pass);
  EXPECT_TRUE(r.check("c", "k", 0.0, 2.0, ">").pass);
  EXPECT_FALSE(r.pass());
  EXPECT_NE(r.find_check("c"), nullptr);
  EXPECT_EQ(r.find_check("zz"), nullptr);
}

TEST(LocalAlternative, Cases) {
  const auto h = make_manifold("hyperbolic");
  const Vec theta = v2(0.3, 1.2);
  EXPECT_EQ(local_alternative(*h, theta, Vec::Zero(2), 100), theta);
  const auto e = make_manifold("euclidean");
  EXPECT_LT((local_alternative(*e, theta, v2(2, -4), 16) - v2(0.8, 0.2)).norm(), 1e-15);
  const Vec hh = v2(0.5, -0.7);
  const Vec alt = local_alternative(*h, theta, hh, 400);
  EXPECT_NEAR(distance(*h, theta, alt), norm(*h, theta, hh) / 20, 1e-10);
}

TEST(TransportedResidual, Cases) {
  const auto h = make_manifold("hyperbolic");
  const Vec truth = v2(0, 1), pert = v2(0.05, 1.02), est = v2(-0.1, 0.9);
  EXPECT_LT(transported_residual(*h, pert, truth, pert, 100).norm(), 1e-15);
  const auto e = make_manifold("euclidean");
  EXPECT_LT((transported_residual(*e, pert, truth, est, 100) - 10 * (est - pert)).norm(), 1e-12);
  const Vec r = transported_residual(*h, pert, truth, est, 100);
  EXPECT_NEAR(norm(*h, truth, r), 10 * distance(*h, pert, est), 1e-9);
}

TEST(Runners, LanZeroDirection) {
  json doc = json::parse(R"({"kind": "lan", "manifold": "hyperbolic", "n": [50], "reps": 100, "seed": 3,
                            "h": [[0, 0]]})");
  const ExperimentReport r = run_experiment(parse_spec(doc));
  const CheckResult* c = r.find_check("lan_zero_h_n50");
  ASSERT_NE(c, nullptr);
  EXPECT_TRUE(c->pass);
  EXPECT_EQ(c->measured, 0.0);
}

TEST(Runners, ConvolutionEuclideanClassicalClt) {
  json doc = json::parse(R"({"kind": "convolution", "manifold": "euclidean", "model": {"sigma": 1.0},
                            "n": [5000], "reps": 4000, "seed": 4, "tolerances": {"cov_frobenius_rel": 0.05},
                            "params": {"bootstrap": 50}})");
  const ExperimentReport r = run_experiment(parse_spec(doc));
  EXPECT_TRUE(r.pass());
  for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.measured;
}

TEST(Runners, RegularitySingleLawPassesTrivially) {
  json doc = json::parse(R"({"kind": "regularity", "manifold": "hyperbolic", "n": [64], "reps": 100, "seed": 5,
                            "h": [[0, 0]], "params": {"permutations": 50, "calibration_size": 50}})");
  const ExperimentReport r = run_experiment(parse_spec(doc));
  const CheckResult* c = r.find_check("frechet_regular_n64");
  ASSERT_NE(c, nullptr);
  EXPECT_TRUE(c->pass);
}

TEST(Runners, DeterministicAcrossWorkerCounts) {
  const ExperimentSpec s = load_spec(preset_path("smoke_lan"));
  const std::string a = report_to_json(run_experiment(s, {1}), false);
  const std::string b = report_to_json(run_experiment(s, {3}), false);
  EXPECT_EQ(a, b);
}
