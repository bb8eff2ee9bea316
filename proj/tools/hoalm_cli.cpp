// Command-line driver: run BP / MC / VI experiments and sweeps, rerun
// manifests and regenerate plot scripts.

#include "hoalm/bench.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

using hoalm::ExperimentConfig;
using hoalm::ProblemKind;

// Flags shared by every run-type subcommand. Lists are only applied when given
// so per-kind defaults survive.
struct RunFlags {
  std::string kind = "bp";
  std::vector<double> p, beta, eps_sub;
  std::vector<std::uint64_t> seeds;
  std::optional<double> eps, density;
  std::optional<int> max_outer, max_inner;
  std::optional<long> m, n;
  std::string out;
  int jobs = 1;
  bool dump_instance = false;
  bool warm_start = false;
  bool timing = false;
  bool no_plot = false;

  void attach(CLI::App* app, bool with_kind) {
    if (with_kind)
      app->add_option("--kind", kind, "Problem family")
          ->check(CLI::IsMember({"bp", "mc", "vi", "vi-affine"}))
          ->required();
    app->add_option("--p", p, "Orders p (comma separated)")->delimiter(',');
    app->add_option("--beta", beta, "Penalty parameters beta (the step size lambda for vi)")
        ->delimiter(',');
    app->add_option("--eps-sub", eps_sub, "Subproblem tolerances")->delimiter(',');
    app->add_option("--seed", seeds, "Instance seeds")->delimiter(',');
    app->add_option("--eps", eps, "Outer stopping tolerance on |Ax - b|");
    app->add_option("--max-outer", max_outer, "Outer iteration cap (vi: iteration count)");
    app->add_option("--max-inner", max_inner, "Subsolver iteration cap");
    app->add_option("--m", m, "Rows");
    app->add_option("--n", n, "Columns (vi: dimension)");
    app->add_option("--density", density, "Support density");
    app->add_option("--out", out, "Output directory");
    app->add_option("--jobs", jobs, "Cells run in parallel")->check(CLI::PositiveNumber);
    app->add_flag("--dump-instance", dump_instance, "Write each generated instance as text");
    app->add_flag("--warm-start", warm_start, "Start each x-update at the previous iterate");
    app->add_flag("--timing", timing, "Record measured wall_ms in the CSVs");
    app->add_flag("--no-plot", no_plot, "Skip writing the plot script");
  }

  ExperimentConfig resolve(ProblemKind k) const {
    ExperimentConfig cfg = ExperimentConfig::defaults_for(k);
    if (!p.empty()) cfg.p_list = p;
    if (!beta.empty()) cfg.beta_list = beta;
    if (!eps_sub.empty()) cfg.eps_sub_list = eps_sub;
    if (!seeds.empty()) cfg.seeds = seeds;
    if (eps) cfg.eps = *eps;
    if (max_outer) cfg.max_outer = *max_outer;
    if (max_inner) cfg.max_inner = *max_inner;
    if (m) cfg.m = *m;
    if (n) cfg.n = *n;
    if (density) cfg.density = *density;
    cfg.out_dir = out.empty() ? "hoalm_" + hoalm::to_string(k) : out;
    cfg.jobs = jobs;
    cfg.dump_instances = dump_instance;
    cfg.warm_start = warm_start;
    cfg.timing = timing;
    return cfg;
  }
};

int report(const hoalm::RunManifest& manifest, bool plot) {
  for (const auto& run : manifest.runs) {
    std::printf("%-40s %-10s outer %5d  r %.3e", run.id.c_str(), run.status.c_str(),
                run.outer_iterations, run.final_r);
    if (!run.error.empty()) std::printf("  (%s)", run.error.c_str());
    std::printf("\n");
  }
  std::printf("manifest: %s\n", (manifest.config.out_dir / "manifest.json").string().c_str());
  if (plot) {
    try {
      std::printf("plot script: %s\n", hoalm::emit_plots(manifest).string().c_str());
    } catch (const std::exception& e) {
      std::fprintf(stderr, "plot: %s\n", e.what());
    }
  }
  return manifest.all_succeeded() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order augmented Lagrangian and proximal point experiments"};
  app.require_subcommand(1);

  struct Entry {
    CLI::App* cmd;
    RunFlags flags;
    std::optional<ProblemKind> fixed;
  };
  std::vector<Entry> entries;
  entries.reserve(4);
  entries.push_back({app.add_subcommand("bp", "Basis pursuit: min |x|_1 s.t. Ax = b"), {},
                     ProblemKind::bp});
  entries.push_back({app.add_subcommand("mc", "Matrix completion: min |X|_* s.t. observed entries"),
                     {}, ProblemKind::mc});
  entries.push_back({app.add_subcommand("vi", "Proximal point method on an affine monotone VI"), {},
                     ProblemKind::vi_affine});
  entries.push_back({app.add_subcommand("sweep", "Sweep of any problem kind"), {}, std::nullopt});
  for (auto& e : entries) e.flags.attach(e.cmd, !e.fixed);

  auto* rerun = app.add_subcommand("rerun", "Run a manifest's configuration again");
  std::string rerun_path, rerun_out;
  rerun->add_option("manifest", rerun_path, "manifest.json")->required()->check(CLI::ExistingFile);
  rerun->add_option("--out", rerun_out, "Output directory (default: the manifest's directory)");

  auto* plot = app.add_subcommand("plot", "Write the plot script for a manifest");
  std::string plot_path;
  plot->add_option("manifest", plot_path, "manifest.json")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto& e : entries) {
      if (!e.cmd->parsed()) continue;
      const ProblemKind kind = e.fixed ? *e.fixed : hoalm::parse_problem_kind(e.flags.kind);
      ExperimentConfig cfg = e.flags.resolve(kind);
      try {
        cfg.validate();
      } catch (const std::invalid_argument& err) {
        std::fprintf(stderr, "usage error: %s\n", err.what());
        return 2;
      }
      return report(hoalm::run_sweep(cfg), !e.flags.no_plot);
    }
    if (rerun->parsed()) {
      const auto manifest = hoalm::read_manifest(rerun_path);
      std::optional<std::filesystem::path> out;
      if (!rerun_out.empty()) out = rerun_out;
      return report(hoalm::rerun_manifest(manifest, out), true);
    }
    if (plot->parsed()) {
      std::printf("%s\n", hoalm::emit_plots(hoalm::read_manifest(plot_path)).string().c_str());
      return 0;
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
