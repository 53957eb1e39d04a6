#pragma once

#include "mfe/geometry/manifold.hpp"
#include "mfe/harness/report.hpp"
#include "mfe/harness/spec.hpp"
#include "mfe/types.hpp"

namespace mfe {

struct RunOptions {
  int workers = 1;
};

/// theta_{n,h} = exp(theta, h / sqrt(n)); h in chart components at theta.
Vec local_alternative(const Manifold& m, const Vec& theta, const Vec& h, int n);

/// Pi_{perturbed -> truth} sqrt(n) log(perturbed, estimate), chart components
/// at `truth`. Throws CutLocus.
Vec transported_residual(const Manifold& m, const Vec& perturbed, const Vec& truth, const Vec& estimate, int n);

ExperimentReport run_lan(const ExperimentSpec& spec, const RunOptions& opt = {});
ExperimentReport run_regularity(const ExperimentSpec& spec, const RunOptions& opt = {});
ExperimentReport run_superefficiency(const ExperimentSpec& spec, const RunOptions& opt = {});
ExperimentReport run_crlb(const ExperimentSpec& spec, const RunOptions& opt = {});
ExperimentReport run_convolution(const ExperimentSpec& spec, const RunOptions& opt = {});
ExperimentReport run_van_trees(const ExperimentSpec& spec, const RunOptions& opt = {});
ExperimentReport run_sim(const ExperimentSpec& spec, const RunOptions& opt = {});
ExperimentReport run_aipw(const ExperimentSpec& spec, const RunOptions& opt = {});

/// Dispatches on spec.kind and fills in the runtime.
ExperimentReport run_experiment(const ExperimentSpec& spec, const RunOptions& opt = {});

}  // namespace mfe
