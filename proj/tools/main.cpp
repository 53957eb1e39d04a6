#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mfe/errors.hpp"
#include "mfe/geometry/builtin.hpp"
#include "mfe/geometry/check.hpp"
#include "mfe/harness/presets.hpp"
#include "mfe/harness/report.hpp"
#include "mfe/harness/runners.hpp"
#include "mfe/harness/spec.hpp"

namespace {

// A spec argument is a path if it exists, otherwise a preset name.
std::string resolve_spec(const std::string& arg) {
  if (std::filesystem::exists(arg)) return arg;
  return mfe::preset_path(arg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic efficiency experiments for manifold-valued parameters"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out_dir;
  std::string format = "json";
  app.add_option("--seed", seed, "Override the master seed of the experiment");
  app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Directory for report.json and summary.csv");
  app.add_option("--format", format, "Format printed to stdout")->check(CLI::IsMember({"json", "csv"}));

  auto* run = app.add_subcommand("run", "Run one experiment from a spec file or preset name");
  std::string spec_arg;
  run->add_option("spec", spec_arg, "Spec file or preset name")->required();

  auto* geometry = app.add_subcommand("geometry", "Geometry kernel diagnostics");
  geometry->require_subcommand(1);
  auto* check = geometry->add_subcommand("check", "Oracle and series-order checks for one manifold");
  std::string manifold;
  int cases = 100;
  check->add_option("--manifold", manifold, "Manifold name")
      ->required()
      ->check(CLI::IsMember(mfe::builtin_manifold_names()));
  check->add_option("--cases", cases, "Random cases per check")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list-presets", "List shipped experiment presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      mfe::ExperimentSpec spec = mfe::load_spec(resolve_spec(spec_arg));
      if (seed) spec.seed = *seed;
      if (!out_dir.empty()) spec.out_dir = out_dir;
      if (app.count("--format") == 0 && !spec.format.empty()) format = spec.format;
      const mfe::ExperimentReport report = mfe::run_experiment(spec, {workers});
      if (!spec.out_dir.empty()) mfe::write_report(report, spec.out_dir);
      std::cout << (format == "csv" ? mfe::report_to_csv(report) : mfe::report_to_json(report));
      for (const auto& c : report.checks) {
        std::fprintf(stderr, "%-4s %s (%s: measured %s %s %s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                     c.tolerance_key.c_str(), mfe::format_double(c.measured).c_str(), c.relation.c_str(),
                     mfe::format_double(c.tolerance).c_str());
      }
      return report.pass() ? 0 : 1;
    }
    if (*check) {
      mfe::CheckOptions opt;
      if (seed) opt.seed = *seed;
      opt.cases = cases;
      const auto report = mfe::geometry_check(*mfe::make_manifold(manifold), opt);
      std::cout << report.table();
      return report.all_pass() ? 0 : 1;
    }
    if (*list) {
      for (const auto& p : mfe::list_presets()) {
        std::printf("%-28s %-16s %s\n", p.name.c_str(), p.kind.c_str(), p.description.c_str());
      }
      return 0;
    }
  } catch (const mfe::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
