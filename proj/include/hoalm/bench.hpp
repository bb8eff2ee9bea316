#pragma once

#include "hoalm/alm.hpp"
#include "hoalm/vi.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hoalm {

enum class ProblemKind { bp, mc, vi_affine };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem_kind(const std::string& text);

/// One sweep over seed x p x beta x eps_sub. For vi-affine the beta axis is the
/// PPA step size lambda, max_outer is the iteration count and eps_sub is unused.
struct ExperimentConfig {
  ProblemKind kind = ProblemKind::bp;
  Eigen::Index m = 100;
  Eigen::Index n = 500;
  double density = 0.2;
  std::vector<std::uint64_t> seeds{0};
  std::vector<double> p_list{1.0, 2.0, 3.0};
  std::vector<double> beta_list{2.0};
  std::vector<double> eps_sub_list{0.1};
  double eps = 1e-4;
  int max_outer = 500;
  int max_inner = 10000;
  bool warm_start = false;
  bool timing = false;  // write measured wall_ms into the CSVs (breaks byte reproducibility)
  bool dump_instances = false;
  std::filesystem::path out_dir = "hoalm_out";
  int jobs = 1;

  static ExperimentConfig defaults_for(ProblemKind kind);
  void validate() const;
};

struct RunRecord {
  std::string id;
  std::uint64_t seed = 0;
  double p = 1.0;
  double beta = 1.0;
  double eps_sub = 0.1;
  std::string csv;     // relative to the output directory, empty if the run failed
  std::string status;  // converged | max_outer | completed | failed
  std::string error;
  int outer_iterations = 0;
  double final_r = 0.0;
  double wall_ms = 0.0;
};

struct RunManifest {
  ExperimentConfig config;
  std::string rng_algorithm;
  std::vector<RunRecord> runs;
  std::vector<std::string> instance_files;
  std::string started_utc;
  double total_wall_ms = 0.0;

  bool all_succeeded() const;
};

RunManifest run_sweep(const ExperimentConfig& cfg);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

/// Runs the manifest's configuration again, optionally into another directory.
RunManifest rerun_manifest(const RunManifest& manifest,
                           std::optional<std::filesystem::path> out_dir = std::nullopt);

inline constexpr const char* kCsvHeader =
    "iter,r_k,dual_step_norm,inner_iters,cum_inner,objective,wall_ms";

/// One CSV row, the serialized form of an outer iteration.
struct CsvRow {
  int iter = 0;
  double r_k = 0.0;
  double dual_step_norm = 0.0;
  long long inner_iters = 0;
  long long cum_inner = 0;
  double objective = 0.0;
  double wall_ms = 0.0;

  bool operator==(const CsvRow&) const = default;
};

std::vector<CsvRow> csv_rows(const AlmTrace& trace, bool timing = true);
/// r_k is lambda |F(x^k)|, dual_step_norm the step length, inner_iters the
/// scalar root-finding iterations and objective the distance to x* (nan if unknown).
std::vector<CsvRow> csv_rows(const PpaTrace& trace, bool timing = true);

void write_csv(const std::vector<CsvRow>& rows, const std::filesystem::path& path);
void write_csv(const AlmTrace& trace, const std::filesystem::path& path, bool timing = true);
void write_csv(const PpaTrace& trace, const std::filesystem::path& path, bool timing = true);
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

/// Writes a matplotlib script next to the manifest and returns its path.
std::filesystem::path emit_plots(const RunManifest& manifest);

}  // namespace hoalm
