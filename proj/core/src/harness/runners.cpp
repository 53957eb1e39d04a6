#include "mfe/harness/runners.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include <Eigen/Dense>

#include "mfe/bounds/crlb.hpp"
#include "mfe/bounds/van_trees.hpp"
#include "mfe/errors.hpp"
#include "mfe/estimators/aipw.hpp"
#include "mfe/estimators/frechet.hpp"
#include "mfe/estimators/sim.hpp"
#include "mfe/geometry/builtin.hpp"
#include "mfe/geometry/ops.hpp"
#include "mfe/models/gaussian.hpp"
#include "mfe/models/quadrature.hpp"
#include "mfe/stats/linalg.hpp"
#include "mfe/stats/parallel.hpp"
#include "mfe/stats/random.hpp"
#include "mfe/stats/tests.hpp"

namespace mfe {

Vec local_alternative(const Manifold& m, const Vec& theta, const Vec& h, int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "local_alternative: n must be positive");
  if (h.squaredNorm() == 0.0) return theta;
  return exp_map(m, theta, h / std::sqrt(static_cast<double>(n)));
}

Vec transported_residual(const Manifold& m, const Vec& perturbed, const Vec& truth, const Vec& estimate, int n) {
  if (m.in_cut_locus(perturbed, estimate)) fail(ErrorCode::CutLocus, "transported_residual: estimate in cut locus");
  const Vec v = std::sqrt(static_cast<double>(n)) * log_map(m, perturbed, estimate);
  if (perturbed == truth) return v;
  return parallel_transport(m, perturbed, truth, v);
}

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t kind_id(const std::string& kind) {
  const auto& k = experiment_kinds();
  return static_cast<std::uint64_t>(std::find(k.begin(), k.end(), kind) - k.begin()) + 1;
}

struct Setup {
  ManifoldPtr manifold;
  Vec center;
  std::optional<RiemannianGaussian> family;
  FisherInfo fisher;
};

Setup make_setup(const ExperimentSpec& spec, bool with_fisher = true) {
  Setup s;
  s.manifold = make_manifold(spec.manifold);
  if (spec.center.empty()) {
    s.center = s.manifold->reference_point();
  } else {
    s.center = Eigen::Map<const Eigen::VectorXd>(spec.center.data(), static_cast<long>(spec.center.size()));
  }
  s.family.emplace(s.manifold, s.center, spec.sigma);
  if (with_fisher) s.fisher = fisher_information(*s.family);
  return s;
}

ExperimentReport start_report(const ExperimentSpec& spec) {
  ExperimentReport r;
  r.name = spec.name;
  r.kind = spec.kind;
  r.manifold = spec.manifold;
  r.seed = spec.seed;
  r.spec = spec_to_json(spec);
  return r;
}

FrechetOptions frechet_options(const ExperimentSpec& spec) {
  FrechetOptions f;
  f.step = spec.estimator.step;
  f.tol = spec.estimator.tol;
  f.max_iter = spec.estimator.max_iter;
  return f;
}

Vec h_frame(const std::vector<double>& h) {
  return Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<long>(h.size()));
}

// Rows of `rows` whose slot in `ok` is set.
Eigen::MatrixXd compact(const Eigen::MatrixXd& rows, const std::vector<char>& ok) {
  const long keep = std::count(ok.begin(), ok.end(), 1);
  Eigen::MatrixXd out(keep, rows.cols());
  for (long i = 0, k = 0; i < rows.rows(); ++i)
    if (ok[static_cast<size_t>(i)]) out.row(k++) = rows.row(i);
  return out;
}

std::vector<double> squared_norms(const Eigen::MatrixXd& rows) {
  std::vector<double> out(static_cast<size_t>(rows.rows()));
  for (long i = 0; i < rows.rows(); ++i) out[static_cast<size_t>(i)] = rows.row(i).squaredNorm();
  return out;
}

void failure_check(ExperimentReport& r, const ExperimentSpec& spec) {
  const double frac = r.replicates_total ? static_cast<double>(r.replicates_failed) / static_cast<double>(r.replicates_total) : 0.0;
  r.check("failure_fraction", "failure_fraction_max", spec.tolerances.at("failure_fraction_max"), frac, "<");
}

/// Replicated Frechet fits under P_{theta_{n,h}}: transported residuals (frame
/// coordinates at theta) of the Frechet mean and of the Hodges estimator.
struct ReplicateResiduals {
  Eigen::MatrixXd frechet;
  Eigen::MatrixXd hodges;
  long failed = 0;
};

ReplicateResiduals simulate_residuals(const Setup& s, const ExperimentSpec& spec, const Vec& sample_center,
                                      int n, std::uint64_t seed, int workers) {
  const Manifold& m = *s.manifold;
  const int d = m.dim();
  const RiemannianGaussian fam = s.family->with_center(sample_center);
  const FrechetOptions fo = frechet_options(spec);
  Eigen::MatrixXd rf(spec.reps, d), rh(spec.reps, d);
  std::vector<char> ok(static_cast<size_t>(spec.reps), 0);
  parallel_for(spec.reps, workers, [&](int r) {
    try {
      const auto data = fam.sample(n, stream_seed(seed, {static_cast<std::uint64_t>(r)}));
      const Vec est = frechet_mean(m, data, fo).estimate;
      const Vec hod = hodges_from_mean(m, est, s.center, n);
      rf.row(r) = to_frame(m, s.center, transported_residual(m, sample_center, s.center, est, n)).transpose();
      rh.row(r) = to_frame(m, s.center, transported_residual(m, sample_center, s.center, hod, n)).transpose();
      ok[static_cast<size_t>(r)] = 1;
    } catch (const Error&) {
    }
  });
  ReplicateResiduals out;
  out.frechet = compact(rf, ok);
  out.hodges = compact(rh, ok);
  out.failed = spec.reps - out.frechet.rows();
  if (out.frechet.rows() < 2) fail(ErrorCode::NotConverged, "too few successful replicates");
  return out;
}

void residual_metrics(ReportRow& row, const Eigen::MatrixXd& res) {
  const std::vector<double> sq = squared_norms(res);
  row.add("risk", mean(sq));
  row.add("risk_se", mc_se(sq));
  row.add("mean_norm", res.colwise().mean().norm());
  row.add("mean", Eigen::MatrixXd(res.colwise().mean()));
  row.add("covariance", covariance(res));
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

// ------------------------------------------------------------------------ LAN

ExperimentReport run_lan(const ExperimentSpec& spec, const RunOptions& opt) {
  ExperimentReport r = start_report(spec);
  const Setup s = make_setup(spec);
  const Manifold& m = *s.manifold;
  r.matrices.push_back({"fisher_information", s.fisher.matrix});
  for (size_t ni = 0; ni < spec.n.size(); ++ni) {
    const int n = spec.n[ni];
    for (size_t hi = 0; hi < spec.h.size(); ++hi) {
      const Vec hf = h_frame(spec.h[hi]);
      const double q = hf.dot(s.fisher.matrix * hf);
      const LanStatistics st = lan_statistics(*s.family, s.center, from_frame(m, s.center, hf), n, spec.reps,
                                              stream_seed(spec.seed, {kind_id(spec.kind), ni, hi}), opt.workers);
      r.replicates_total += spec.reps;
      ReportRow row{n, spec.h[hi], "log_lr", {}, {}};
      const double se = mc_se(st.log_lr);
      row.add("mean_log_lr", st.mean_log_lr);
      row.add("var_log_lr", st.var_log_lr);
      row.add("expected_mean", -0.5 * q);
      row.add("expected_var", q);
      row.add("mc_se", se);
      row.add("mean_linear_term", st.mean_linear_term);
      r.rows.push_back(row);
      const int idx = static_cast<int>(r.rows.size()) - 1;
      if (q == 0.0) {
        r.check("lan_zero_h_n" + std::to_string(n), "exact", 0.0, std::max(std::abs(st.mean_log_lr), st.var_log_lr),
                "<=", idx);
        continue;
      }
      const AndersonDarling ad = anderson_darling_normal(st.log_lr);
      r.rows.back().add("ad_statistic", ad.statistic);
      r.rows.back().add("ad_p_value", ad.p_value);
      const std::string tag = "_n" + std::to_string(n) + "_h" + std::to_string(hi);
      r.check("lan_mean" + tag, "mean_se_multiple", spec.tolerances.at("mean_se_multiple"),
              std::abs(st.mean_log_lr + 0.5 * q) / se, "<=", idx);
      r.check("lan_variance" + tag, "var_rel", spec.tolerances.at("var_rel"), std::abs(st.var_log_lr / q - 1.0), "<=",
              idx);
      r.check("lan_normality" + tag, "ad_p_min", spec.tolerances.at("ad_p_min"), ad.p_value, ">", idx);
    }
  }
  return r;
}

// ----------------------------------------------------------------- regularity

ExperimentReport run_regularity(const ExperimentSpec& spec, const RunOptions& opt) {
  ExperimentReport r = start_report(spec);
  const Setup s = make_setup(spec, false);
  const Manifold& m = *s.manifold;
  EnergyTestOptions eo;
  eo.permutations = spec.params.at("permutations").get<int>();
  eo.level = spec.params.at("level").get<double>();
  eo.calibration_size = spec.params.at("calibration_size").get<int>();
  eo.workers = opt.workers;

  for (size_t ni = 0; ni < spec.n.size(); ++ni) {
    const int n = spec.n[ni];
    std::vector<Eigen::MatrixXd> groups_f, groups_h;
    for (size_t hi = 0; hi < spec.h.size(); ++hi) {
      const Vec alt = local_alternative(m, s.center, from_frame(m, s.center, h_frame(spec.h[hi])), n);
      const ReplicateResiduals res =
          simulate_residuals(s, spec, alt, n, stream_seed(spec.seed, {kind_id(spec.kind), ni, hi}), opt.workers);
      r.replicates_total += spec.reps;
      r.replicates_failed += res.failed;
      ReportRow rf{n, spec.h[hi], "frechet", {}, {}};
      residual_metrics(rf, res.frechet);
      ReportRow rh{n, spec.h[hi], "hodges", {}, {}};
      residual_metrics(rh, res.hodges);
      r.rows.push_back(rf);
      r.rows.push_back(rh);
      groups_f.push_back(res.frechet);
      groups_h.push_back(res.hodges);
    }
    const std::string tag = "_n" + std::to_string(n);
    eo.seed = stream_seed(spec.seed, {kind_id(spec.kind), ni, 0xe0});
    const EnergyTest tf = energy_test(groups_f, eo);
    eo.seed = stream_seed(spec.seed, {kind_id(spec.kind), ni, 0xe1});
    const EnergyTest th = energy_test(groups_h, eo);
    r.summary.push_back({"energy_max_frechet" + tag, tf.max_statistic});
    r.summary.push_back({"energy_threshold_frechet" + tag, tf.threshold});
    r.summary.push_back({"energy_max_hodges" + tag, th.max_statistic});
    r.summary.push_back({"energy_threshold_hodges" + tag, th.threshold});
    if (ni + 1 == spec.n.size()) {
      if (tf.pairs.empty()) {
        r.check("frechet_regular" + tag, "exact", 0.0, 0.0, "<=");
      } else {
        r.check("frechet_regular" + tag, "params.level", tf.threshold, tf.max_statistic, "<=");
        r.check("hodges_irregular" + tag, "hodges_ratio_min", spec.tolerances.at("hodges_ratio_min"),
                th.max_statistic / th.threshold, ">=");
      }
    }
  }
  failure_check(r, spec);
  return r;
}

// ------------------------------------------------------------ superefficiency

ExperimentReport run_superefficiency(const ExperimentSpec& spec, const RunOptions& opt) {
  ExperimentReport r = start_report(spec);
  const Setup s = make_setup(spec, false);
  const Manifold& m = *s.manifold;
  const double c = spec.params.at("c").get<double>();
  Vec dir = Vec::Unit(m.dim(), 0);
  for (const auto& h : spec.h)
    if (h_frame(h).squaredNorm() > 0.0) {
      dir = h_frame(h);
      break;
    }

  std::vector<double> ratio0, hodges_n, frechet_n;
  for (size_t ni = 0; ni < spec.n.size(); ++ni) {
    const int n = spec.n[ni];
    const double scale = c * std::pow(static_cast<double>(n), -0.25);
    const Vec mu_n = exp_map(m, s.center, from_frame(m, s.center, scale * dir));

    const ReplicateResiduals at0 =
        simulate_residuals(s, spec, s.center, n, stream_seed(spec.seed, {kind_id(spec.kind), ni, 0}), opt.workers);
    const ReplicateResiduals atn =
        simulate_residuals(s, spec, mu_n, n, stream_seed(spec.seed, {kind_id(spec.kind), ni, 1}), opt.workers);
    r.replicates_total += 2L * spec.reps;
    r.replicates_failed += at0.failed + atn.failed;

    // Residual norms are invariant under transport, so these are the risks at
    // the sampling center.
    const double f0 = mean(squared_norms(at0.frechet)), h0 = mean(squared_norms(at0.hodges));
    const double fn = mean(squared_norms(atn.frechet)), hn = mean(squared_norms(atn.hodges));
    ReportRow row0{n, std::vector<double>(static_cast<size_t>(m.dim()), 0.0), "at_reference", {}, {}};
    row0.add("risk_frechet", f0);
    row0.add("risk_hodges", h0);
    row0.add("risk_ratio", h0 / f0);
    ReportRow rown{n, to_std(scale * dir), "at_perturbed", {}, {}};
    rown.add("risk_frechet", fn);
    rown.add("risk_hodges", hn);
    rown.add("risk_ratio", hn / fn);
    rown.add("risk_hodges_se", mc_se(squared_norms(atn.hodges)));
    r.rows.push_back(row0);
    r.rows.push_back(rown);
    ratio0.push_back(h0 / f0);
    hodges_n.push_back(hn);
    frechet_n.push_back(fn);
  }
  const std::string last = "_n" + std::to_string(spec.n.back());
  r.check("hodges_superefficient_at_reference" + last, "risk_ratio_max", spec.tolerances.at("risk_ratio_max"),
          ratio0.back(), "<");
  if (spec.n.size() > 1) {
    r.check("hodges_risk_growth_at_perturbed", "hodges_growth_min", spec.tolerances.at("hodges_growth_min"),
            hodges_n.back() / hodges_n.front(), ">=");
    const auto [lo, hi] = std::minmax_element(frechet_n.begin(), frechet_n.end());
    r.check("frechet_risk_stable_at_perturbed", "frechet_variation_max", spec.tolerances.at("frechet_variation_max"),
            *hi / *lo - 1.0, "<");
  }
  failure_check(r, spec);
  return r;
}

// ----------------------------------------------------------- crlb/convolution

namespace {

ExperimentReport run_attainment(const ExperimentSpec& spec, const RunOptions& opt, bool convolution) {
  ExperimentReport r = start_report(spec);
  const Setup s = make_setup(spec);
  const Manifold& m = *s.manifold;
  const int d = m.dim();
  const Mat eye = Mat::Identity(d, d);
  const CurvatureOperator curv = normal_coefficients(m, s.center);
  const Mat v_ref = convolution_reference(s.fisher, eye);
  const double slack_se = spec.tolerances.at("slack_se");
  const int boot = spec.params.at("bootstrap").get<int>();
  r.matrices.push_back({"fisher_information", s.fisher.matrix});
  r.matrices.push_back({"convolution_reference", v_ref});

  for (size_t ni = 0; ni < spec.n.size(); ++ni) {
    const int n = spec.n[ni];
    const Mat bound = static_cast<double>(n) * crlb_n(s.fisher, curv, eye, n);
    r.summary.push_back({"bound_gap_frobenius_n" + std::to_string(n), (bound - v_ref).norm()});
    double sup_risk = -std::numeric_limits<double>::infinity(), sup_se = 0.0;
    for (size_t hi = 0; hi < spec.h.size(); ++hi) {
      const Vec hf = h_frame(spec.h[hi]);
      const Vec alt = local_alternative(m, s.center, from_frame(m, s.center, hf), n);
      const ReplicateResiduals res =
          simulate_residuals(s, spec, alt, n, stream_seed(spec.seed, {kind_id(spec.kind), ni, hi}), opt.workers);
      r.replicates_total += spec.reps;
      r.replicates_failed += res.failed;
      ReportRow row{n, spec.h[hi], "frechet", {}, {}};
      residual_metrics(row, res.frechet);
      const std::vector<double> sq = squared_norms(res.frechet);
      if (mean(sq) > sup_risk) {
        sup_risk = mean(sq);
        sup_se = mc_se(sq);
      }
      const Mat cov = covariance(res.frechet);
      const double gap = psd_gap(cov, bound);
      const Eigen::MatrixXd& rows = res.frechet;
      const double se = bootstrap_se(static_cast<int>(rows.rows()), boot,
                                     stream_seed(spec.seed, {kind_id(spec.kind), ni, hi, 0xb0}),
                                     [&](const std::vector<int>& idx) {
                                       Eigen::MatrixXd sub(static_cast<long>(idx.size()), d);
                                       for (size_t k = 0; k < idx.size(); ++k) sub.row(static_cast<long>(k)) = rows.row(idx[k]);
                                       return psd_gap(covariance(sub), bound);
                                     },
                                     opt.workers);
      row.add("psd_gap", gap);
      row.add("psd_gap_bootstrap_se", se);
      row.add("cov_frobenius_rel", frobenius_relative(cov, v_ref));
      row.add("crlb_n_scaled", Eigen::MatrixXd(bound));
      r.rows.push_back(row);
      const int idx = static_cast<int>(r.rows.size()) - 1;
      if (hf.squaredNorm() != 0.0) continue;
      const std::string tag = "_n" + std::to_string(n);
      r.check("psd_gap_vs_crlb_n" + tag, "slack_se", -slack_se * se, gap, ">=", idx);
      if (convolution) {
        r.check("covariance_matches_convolution_reference" + tag, "cov_frobenius_rel",
                spec.tolerances.at("cov_frobenius_rel"), frobenius_relative(cov, v_ref), "<=", idx);
      }
    }
    if (convolution) {
      const double lam = lam_reference(s.fisher, eye).trace();
      r.summary.push_back({"lam_sup_risk_n" + std::to_string(n), sup_risk});
      r.summary.push_back({"lam_reference_trace", lam});
      r.check("lam_sup_risk_n" + std::to_string(n), "slack_se", -slack_se * sup_se, sup_risk - lam, ">=");
    }
  }
  if (spec.n.size() > 1) {
    Eigen::VectorXd ns(static_cast<long>(spec.n.size())), gaps(static_cast<long>(spec.n.size()));
    for (size_t i = 0; i < spec.n.size(); ++i) {
      ns[static_cast<long>(i)] = spec.n[i];
      gaps[static_cast<long>(i)] = (static_cast<double>(spec.n[i]) * crlb_n(s.fisher, curv, eye, spec.n[i]) - v_ref).norm();
    }
    if (gaps.minCoeff() > 0.0) r.summary.push_back({"bound_gap_loglog_slope", loglog_slope(ns, gaps)});
  }
  failure_check(r, spec);
  return r;
}

}  // namespace

ExperimentReport run_crlb(const ExperimentSpec& spec, const RunOptions& opt) {
  return run_attainment(spec, opt, false);
}

ExperimentReport run_convolution(const ExperimentSpec& spec, const RunOptions& opt) {
  return run_attainment(spec, opt, true);
}

// ------------------------------------------------------------------ van Trees

ExperimentReport run_van_trees(const ExperimentSpec& spec, const RunOptions& opt) {
  ExperimentReport r = start_report(spec);
  const Setup s = make_setup(spec);
  const Manifold& m = *s.manifold;
  const int d = m.dim();
  const Mat eye = Mat::Identity(d, d);
  const CurvatureOperator curv = normal_coefficients(m, s.center);
  const FrechetOptions fo = frechet_options(spec);
  const EstimatorHook est = [&](const std::vector<Vec>& data) { return frechet_mean(m, data, fo).estimate; };

  PriorSpec prior;
  const std::string shape = spec.params.at("shape").get<std::string>();
  if (shape == "cosine_squared") {
    prior.shape = PriorSpec::Shape::CosineSquared;
  } else if (shape == "uniform") {
    prior.shape = PriorSpec::Shape::Uniform;
  } else {
    fail(ErrorCode::Config, "params.shape must be cosine_squared or uniform");
  }
  prior.center = s.center;
  prior.half_width = spec.params.at("half_width").get<double>();
  prior.panels = spec.params.at("panels").get<int>();
  VanTreesOptions vo;
  vo.draws = spec.params.at("draws").get<int>();
  vo.bootstrap = spec.params.at("bootstrap").get<int>();
  vo.slack_se = spec.tolerances.at("slack_se");
  vo.workers = opt.workers;

  for (size_t ni = 0; ni < spec.n.size(); ++ni) {
    const int n = spec.n[ni];
    vo.seed = stream_seed(spec.seed, {kind_id(spec.kind), ni});
    const VanTreesReport vt = van_trees_bound(*s.family, prior, est, n, vo);
    ReportRow row{n, std::vector<double>(static_cast<size_t>(d), 0.0), "bayes_risk", {}, {}};
    row.add("gap_min_eig", vt.report.gap_min_eig);
    row.add("slack", vt.report.slack);
    row.add("bound_trace", vt.report.bound_matrix.trace());
    row.add("bayes_risk_trace", vt.report.empirical_cov.trace());
    row.add("bound", Eigen::MatrixXd(vt.report.bound_matrix));
    row.add("bayes_risk", Eigen::MatrixXd(vt.report.empirical_cov));
    row.add("prior_information", Eigen::MatrixXd(vt.prior_information));
    row.add("mean_information", Eigen::MatrixXd(vt.mean_information));
    row.add("outer_factor", Eigen::MatrixXd(vt.outer_factor));
    r.rows.push_back(row);
    r.replicates_total += vo.draws;
    r.check("bayes_risk_dominates_bound_n" + std::to_string(n), "slack_se", -vt.report.slack, vt.report.gap_min_eig,
            ">=", static_cast<int>(r.rows.size()) - 1);
  }

  // Spread sweeps at the smallest n: distance of the bound from the CRLB.
  const int n0 = spec.n.front();
  const Mat crlb = crlb_n(s.fisher, curv, eye, n0);
  const auto sweep = [&](const std::string& label, const std::string& key, std::uint64_t sweep_id) {
    std::vector<double> rel, traces;
    const auto spreads = spec.params.at(key).get<std::vector<double>>();
    for (size_t k = 0; k < spreads.size(); ++k) {
      PriorSpec p = prior;
      p.half_width = spreads[k];
      VanTreesOptions o = vo;
      o.seed = stream_seed(spec.seed, {kind_id(spec.kind), 0x5e, sweep_id, k});
      const VanTreesReport vt = van_trees_bound(*s.family, p, est, n0, o);
      rel.push_back(frobenius_relative(vt.report.bound_matrix, crlb));
      traces.push_back(vt.report.bound_matrix.trace());
      ReportRow row{n0, std::vector<double>(static_cast<size_t>(d), 0.0), label, {}, {}};
      row.add("half_width", spreads[k]);
      row.add("bound_trace", traces.back());
      row.add("crlb_trace", crlb.trace());
      row.add("crlb_rel_gap", rel.back());
      r.rows.push_back(row);
    }
    int non_monotone = 0;
    for (size_t k = 1; k < rel.size(); ++k) non_monotone += rel[k] >= rel[k - 1] ? 1 : 0;
    return std::make_tuple(rel, traces, non_monotone);
  };

  const auto [rel_s, tr_s, nm_s] = sweep("spread_shrinking", "shrinking_spreads", 0);
  r.check("bound_approaches_crlb_monotonically_as_spread_shrinks", "exact", 0.0, nm_s, "<=");
  r.check("bound_reaches_crlb_as_spread_shrinks", "crlb_rel", spec.tolerances.at("crlb_rel"), rel_s.back(), "<=");
  int trace_up = 0;
  for (size_t k = 1; k < tr_s.size(); ++k) trace_up += tr_s[k] >= tr_s[k - 1] ? 1 : 0;
  r.check("bound_decreases_as_spread_shrinks", "exact", 0.0, trace_up, "<=");

  const auto [rel_g, tr_g, nm_g] = sweep("spread_growing", "growing_spreads", 1);
  r.check("bound_approaches_crlb_monotonically_as_spread_grows", "exact", 0.0, nm_g, "<=");
  r.check("bound_reaches_crlb_as_spread_grows", "crlb_rel", spec.tolerances.at("crlb_rel"), rel_g.back(), "<=");
  return r;
}

// ------------------------------------------------------------------------ SIM

namespace {

// Fisher information of the one-angle submodel beta(a) = (cos a, sin a) at
// a0 for X uniform on [-1, 1]^2, by tensor Gauss-Legendre quadrature.
double angle_information(double a0, double sigma2, const std::function<double(double)>& g_prime) {
  const auto rule = gauss_legendre(-1.0, 1.0, 8);
  const Eigen::Vector2d beta(std::cos(a0), std::sin(a0)), dbeta(-std::sin(a0), std::cos(a0));
  double acc = 0.0;
  for (const auto& [x1, w1] : rule)
    for (const auto& [x2, w2] : rule) {
      const Eigen::Vector2d x(x1, x2);
      const double s = g_prime(beta.dot(x)) * dbeta.dot(x);
      acc += 0.25 * w1 * w2 * s * s;
    }
  return acc / sigma2;
}

SimData make_sim_data(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta, std::function<double(double)> g,
                      std::function<double(double)> gp, double sigma, Rng& rng) {
  SimData d;
  d.x = x;
  d.beta = beta;
  d.g = std::move(g);
  d.g_prime = std::move(gp);
  d.sigma2 = sigma * sigma;
  d.y.resize(x.rows());
  for (long i = 0; i < x.rows(); ++i) d.y[i] = d.g(x.row(i).dot(beta)) + sigma * rng.normal();
  d.zeta = [beta](double u) { return Eigen::VectorXd(beta * u); };
  return d;
}

}  // namespace

ExperimentReport run_sim(const ExperimentSpec& spec, const RunOptions&) {
  ExperimentReport r = start_report(spec);
  const double sigma = spec.sigma;
  const auto kid = kind_id(spec.kind);

  // Hemisphere exponential map.
  {
    Rng rng(stream_seed(spec.seed, {kid, 1}));
    const int cases = spec.params.at("exp_cases").get<int>();
    double worst = 0.0;
    for (int c = 0; c < cases; ++c) {
      const int d = 2 + c % 4;
      Eigen::VectorXd beta(d), h(d);
      for (int i = 0; i < d; ++i) beta[i] = rng.normal();
      beta /= beta.norm();
      if (beta[0] < 0.0) beta = -beta;
      for (int i = 0; i < d; ++i) h[i] = rng.normal();
      h -= h.dot(beta) * beta;
      worst = std::max(worst, std::abs(sim_exp(beta, h, rng.uniform(-3.0, 3.0)).norm() - 1.0));
    }
    ReportRow row{0, {}, "sim_exp", {}, {}};
    row.add("max_norm_error", worst);
    const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(3, 0), e2 = Eigen::VectorXd::Unit(3, 1);
    const double quarter = (sim_exp(e1, (std::numbers::pi / 2.0) * e2, 1.0) - e2).lpNorm<Eigen::Infinity>();
    const double zero = (sim_exp(e1, e2, 0.0) - e1).lpNorm<Eigen::Infinity>();
    // Half circle and a general angle against the closed form cos/sin.
    const double half = (sim_exp(e1, e2, std::numbers::pi) + e1).lpNorm<Eigen::Infinity>();
    Eigen::VectorXd b(3), hh(3);
    b << 0.6, 0.8, 0.0;
    hh << -0.8 * 0.5, 0.6 * 0.5, 0.0;
    Eigen::VectorXd expect(3);
    expect << 0.6 * std::cos(0.35) - 0.8 * std::sin(0.35), 0.8 * std::cos(0.35) + 0.6 * std::sin(0.35), 0.0;
    const double general = (sim_exp(b, hh, 0.7) - expect).lpNorm<Eigen::Infinity>();
    const double symbolic = std::max({quarter, zero, half, general});
    const double eps = 1e-5;
    const double deriv = ((sim_exp(b, hh, eps) - sim_exp(b, hh, -eps)) / (2.0 * eps) - hh).lpNorm<Eigen::Infinity>();
    row.add("symbolic_case_error", symbolic);
    row.add("derivative_error", deriv);
    r.rows.push_back(row);
    const int idx = static_cast<int>(r.rows.size()) - 1;
    r.check("sim_exp_unit_norm", "norm_err_max", spec.tolerances.at("norm_err_max"), worst, "<=", idx);
    r.check("sim_exp_closed_form_cases", "symbolic_err_max", spec.tolerances.at("symbolic_err_max"), symbolic, "<=", idx);
    r.check("sim_exp_derivative_at_zero", "derivative_err_max", spec.tolerances.at("derivative_err_max"), deriv, "<=",
            idx);
  }

  // Orthogonality of the efficient score to nuisance scores a(u) eps.
  {
    const int d = spec.params.at("orthogonality_dim").get<int>();
    const int n = spec.params.at("orthogonality_n").get<int>();
    Rng rng(stream_seed(spec.seed, {kid, 2}));
    Eigen::MatrixXd x(n, d);
    for (long i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) x(i, j) = rng.normal();
    const Eigen::VectorXd beta = Eigen::VectorXd::Ones(d) / std::sqrt(static_cast<double>(d));
    SimData data = make_sim_data(x, beta, [](double u) { return std::sin(u) + u; },
                                 [](double u) { return std::cos(u) + 1.0; }, sigma, rng);
    const std::string nuisance = spec.params.at("nuisance").get<std::string>();
    if (nuisance == "nadaraya_watson") {
      data.zeta = nadaraya_watson_zeta(x, beta, spec.estimator.bandwidth);
    } else if (nuisance != "oracle") {
      fail(ErrorCode::Config, "params.nuisance must be oracle or nadaraya_watson");
    }
    const Eigen::MatrixXd basis = sim_tangent_basis(beta);
    const Eigen::VectorXd u = x * beta;
    const std::vector<std::pair<std::string, std::function<double(double)>>> tests = {
        {"a1", [](double) { return 1.0; }},
        {"a_u", [](double t) { return t; }},
        {"a_sin", [](double t) { return std::sin(t); }}};
    double worst = 0.0;
    for (long k = 0; k < basis.cols(); ++k) {
      const Eigen::VectorXd s = sim_efficient_score(data, basis.col(k));
      for (const auto& [tname, a] : tests) {
        std::vector<double> prod(static_cast<size_t>(n));
        Eigen::VectorXd nuis(n);
        for (long i = 0; i < n; ++i) {
          nuis[i] = a(u[i]) * (data.y[i] - data.g(u[i]));
          prod[static_cast<size_t>(i)] = s[i] * nuis[i];
        }
        const double z = std::abs(mean(prod)) / mc_se(prod);
        const double corr = (s.array() - s.mean()).matrix().dot((nuis.array() - nuis.mean()).matrix()) /
                            std::sqrt((s.array() - s.mean()).square().sum() * (nuis.array() - nuis.mean()).square().sum());
        ReportRow row{n, {}, "orthogonality_h" + std::to_string(k) + "_" + tname, {}, {}};
        row.add("correlation", corr);
        row.add("mean_product_in_se", z);
        r.rows.push_back(row);
        worst = std::max(worst, z);
      }
    }
    r.check("efficient_score_orthogonal_to_nuisance", "corr_se_multiple", spec.tolerances.at("corr_se_multiple"), worst,
            "<");
  }

  // d = 2 efficiency bound against the one-angle model.
  {
    const int n = spec.params.at("bound_n").get<int>();
    Rng rng(stream_seed(spec.seed, {kid, 3}));
    Eigen::MatrixXd x(n, 2);
    for (long i = 0; i < n; ++i) x.row(i) << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
    const double a0 = std::numbers::pi / 4.0;
    const Eigen::VectorXd beta = Eigen::Vector2d(std::cos(a0), std::sin(a0));
    const SimData data = make_sim_data(x, beta, [](double t) { return t; }, [](double) { return 1.0; }, sigma, rng);
    const double bound = sim_efficiency_bound(data)(0, 0);
    const double brute = 1.0 / angle_information(a0, sigma * sigma, data.g_prime);
    ReportRow row{n, {}, "efficiency_bound_d2", {}, {}};
    row.add("bound", bound);
    row.add("angle_model_bound", brute);
    r.rows.push_back(row);
    r.check("efficiency_bound_matches_angle_model", "bound_rel", spec.tolerances.at("bound_rel"),
            std::abs(bound / brute - 1.0), "<=", static_cast<int>(r.rows.size()) - 1);
  }
  return r;
}

// ----------------------------------------------------------------------- AIPW

ExperimentReport run_aipw(const ExperimentSpec& spec, const RunOptions& opt) {
  ExperimentReport r = start_report(spec);
  const Setup s = make_setup(spec, false);
  const Manifold& m = *s.manifold;
  const int d = m.dim();
  const auto kid = kind_id(spec.kind);
  const double zw = spec.params.at("z_half_width").get<double>();
  const double a = spec.params.at("pi_intercept").get<double>(), b = spec.params.at("pi_slope").get<double>();
  const double shift = spec.params.at("shift").get<double>();
  const PropensityFn true_pi = [a, b](const Eigen::VectorXd& z) { return 1.0 / (1.0 + std::exp(-(a + b * z[0]))); };
  const Vec e1 = from_frame(m, s.center, Vec::Unit(d, 0));

  // X | Z is the Riemannian Gaussian centered at exp(mu0, shift Z e1); the
  // law is symmetric about mu0, which is therefore its Frechet mean.
  const auto draw = [&](Rng& rng, int n, bool complete) {
    std::vector<MarObservation> obs(static_cast<size_t>(n));
    for (auto& o : obs) {
      o.z = Eigen::VectorXd::Constant(1, rng.uniform(-zw, zw));
      const Vec c = exp_map(m, s.center, shift * o.z[0] * e1);
      std::vector<Vec> x;
      s.family->with_center(c).sample_into(rng, 1, x);
      o.observed = complete || rng.bernoulli(true_pi(o.z));
      if (o.observed) o.x = x.front();
    }
    return obs;
  };

  AipwOptions ao;
  ao.step = spec.estimator.step;
  ao.tol = spec.estimator.tol;
  ao.max_iter = spec.estimator.max_iter;
  ao.pi_floor = spec.estimator.positivity_floor;

  // Complete-data reduction.
  {
    Rng rng(stream_seed(spec.seed, {kid, 1}));
    const auto obs = draw(rng, spec.n.front(), true);
    std::vector<Vec> xs;
    for (const auto& o : obs) xs.push_back(*o.x);
    FrechetOptions fo = frechet_options(spec);
    fo.compute_influence = true;
    const FrechetResult fr = frechet_mean(m, xs, fo);
    const AipwResult ar = aipw_frechet(m, obs, ao);
    const double est_diff = (fr.estimate - ar.estimate).lpNorm<Eigen::Infinity>();
    const double if_diff = (fr.per_obs_if.rows - ar.if_sample.rows).lpNorm<Eigen::Infinity>();
    ReportRow row{spec.n.front(), {}, "complete_data", {}, {}};
    row.add("estimate_difference", est_diff);
    row.add("influence_difference", if_diff);
    r.rows.push_back(row);
    const int idx = static_cast<int>(r.rows.size()) - 1;
    r.check("complete_data_estimate_equal", "exact", 0.0, est_diff, "<=", idx);
    r.check("complete_data_influence_equal", "reduction_err_max", spec.tolerances.at("reduction_err_max"), if_diff, "<=",
            idx);
  }

  const OutcomeFn wrong_m = [](const Vec& mu, const Eigen::VectorXd&) { return Vec(Vec::Zero(mu.size())); };
  for (size_t ni = 0; ni < spec.n.size(); ++ni) {
    const int n = spec.n[ni];
    struct Rep {
      Eigen::VectorXd moment_sum;
      Eigen::VectorXd moment_sumsq;
      Vec residual;
      Mat if_cov;
    };
    std::vector<std::optional<Rep>> reps(static_cast<size_t>(spec.reps));
    parallel_for(spec.reps, opt.workers, [&](int rep) {
      try {
        Rng rng(stream_seed(spec.seed, {kid, 2, ni, static_cast<std::uint64_t>(rep)}));
        const auto obs = draw(rng, n, false);
        const Eigen::MatrixXd terms = aipw_terms(m, obs, s.center, true_pi, wrong_m);
        const AipwResult ar = aipw_frechet(m, obs, ao);
        Rep out;
        out.moment_sum = terms.colwise().sum().transpose();
        out.moment_sumsq = terms.array().square().colwise().sum().transpose();
        out.residual = std::sqrt(static_cast<double>(n)) * to_frame(m, s.center, log_map(m, s.center, ar.estimate));
        out.if_cov = covariance(ar.if_sample.rows);
        reps[static_cast<size_t>(rep)] = std::move(out);
      } catch (const Error&) {
      }
    });
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(d), sumsq = Eigen::VectorXd::Zero(d);
    Mat if_cov = Mat::Zero(d, d);
    std::vector<Vec> res;
    for (const auto& rp : reps) {
      if (!rp) continue;
      sum += rp->moment_sum;
      sumsq += rp->moment_sumsq;
      if_cov += rp->if_cov;
      res.push_back(rp->residual);
    }
    r.replicates_total += spec.reps;
    r.replicates_failed += spec.reps - static_cast<long>(res.size());
    if (res.size() < 2) fail(ErrorCode::NotConverged, "aipw: too few successful replicates");
    if_cov /= static_cast<double>(res.size());
    const double total = static_cast<double>(res.size()) * n;
    const Eigen::VectorXd mom = sum / total;
    const Eigen::VectorXd se = ((sumsq / total - mom.cwiseProduct(mom)) / total).cwiseSqrt();
    Eigen::MatrixXd rows(static_cast<long>(res.size()), d);
    for (size_t i = 0; i < res.size(); ++i) rows.row(static_cast<long>(i)) = res[i].transpose();
    const Mat cov = covariance(rows);

    ReportRow row{n, {}, "aipw", {}, {}};
    const double moment_z = mom.cwiseQuotient(se).lpNorm<Eigen::Infinity>();
    row.add("moment_mean_in_se", moment_z);
    row.add("cov_frobenius_rel", frobenius_relative(cov, if_cov));
    row.add("estimator_covariance", Eigen::MatrixXd(cov));
    row.add("influence_covariance", Eigen::MatrixXd(if_cov));
    row.add("moment_mean", Eigen::MatrixXd(mom.transpose()));
    r.rows.push_back(row);
    const int idx = static_cast<int>(r.rows.size()) - 1;
    const std::string tag = "_n" + std::to_string(n);
    r.check("moment_unbiased_true_pi_wrong_m" + tag, "mean_se_multiple", spec.tolerances.at("mean_se_multiple"),
            moment_z, "<=", idx);
    r.check("covariance_matches_influence" + tag, "cov_frobenius_rel", spec.tolerances.at("cov_frobenius_rel"),
            frobenius_relative(cov, if_cov), "<=", idx);
  }
  failure_check(r, spec);
  return r;
}

ExperimentReport run_experiment(const ExperimentSpec& spec, const RunOptions& opt) {
  const auto t0 = Clock::now();
  ExperimentReport r;
  if (spec.kind == "lan") {
    r = run_lan(spec, opt);
  } else if (spec.kind == "regularity") {
    r = run_regularity(spec, opt);
  } else if (spec.kind == "superefficiency") {
    r = run_superefficiency(spec, opt);
  } else if (spec.kind == "crlb") {
    r = run_crlb(spec, opt);
  } else if (spec.kind == "convolution") {
    r = run_convolution(spec, opt);
  } else if (spec.kind == "van_trees") {
    r = run_van_trees(spec, opt);
  } else if (spec.kind == "sim") {
    r = run_sim(spec, opt);
  } else if (spec.kind == "aipw") {
    r = run_aipw(spec, opt);
  } else {
    fail(ErrorCode::Config, "unknown experiment kind '" + spec.kind + "'");
  }
  r.runtime_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

}  // namespace mfe
