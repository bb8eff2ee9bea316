#include "hoalm/bench.hpp"

#include "hoalm/problems.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <variant>

namespace hoalm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::bp: return "bp";
    case ProblemKind::mc: return "mc";
    case ProblemKind::vi_affine: return "vi-affine";
  }
  return "unknown";
}

ProblemKind parse_problem_kind(const std::string& text) {
  if (text == "bp") return ProblemKind::bp;
  if (text == "mc") return ProblemKind::mc;
  if (text == "vi" || text == "vi-affine") return ProblemKind::vi_affine;
  throw std::invalid_argument("unknown problem kind '" + text + "'");
}

ExperimentConfig ExperimentConfig::defaults_for(ProblemKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case ProblemKind::bp:
      break;
    case ProblemKind::mc:
      cfg.m = 50;
      cfg.n = 50;
      cfg.density = 0.1;
      cfg.beta_list = {5.0};
      break;
    case ProblemKind::vi_affine:
      cfg.m = 20;
      cfg.n = 20;
      cfg.density = 1.0;
      cfg.beta_list = {1.0};
      cfg.max_outer = 200;
      break;
  }
  return cfg;
}

namespace {

template <class T>
void check_list(const std::vector<T>& values, const char* name) {
  if (values.empty()) throw std::invalid_argument(std::string("config: empty ") + name + " list");
  if (std::set<T>(values.begin(), values.end()).size() != values.size())
    throw std::invalid_argument(std::string("config: duplicate entries in ") + name + " list");
}

}  // namespace

void ExperimentConfig::validate() const {
  check_list(seeds, "seed");
  check_list(p_list, "p");
  check_list(beta_list, "beta");
  check_list(eps_sub_list, "eps_sub");
  for (double p : p_list)
    if (!std::isfinite(p) || p < 1.0) throw std::invalid_argument("config: p must be >= 1");
  for (double beta : beta_list)
    if (!std::isfinite(beta) || !(beta > 0.0)) throw std::invalid_argument("config: beta must be > 0");
  for (double e : eps_sub_list)
    if (!std::isfinite(e) || !(e > 0.0)) throw std::invalid_argument("config: eps_sub must be > 0");
  if (!(eps > 0.0)) throw std::invalid_argument("config: eps must be > 0");
  if (max_outer <= 0 || max_inner <= 0) throw std::invalid_argument("config: iteration caps must be > 0");
  if (n <= 0 || (kind != ProblemKind::vi_affine && m <= 0))
    throw std::invalid_argument("config: dimensions must be positive");
  if (kind != ProblemKind::vi_affine && !(density > 0.0 && density <= 1.0))
    throw std::invalid_argument("config: density must lie in (0, 1]");
  if (jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
  if (dump_instances && kind == ProblemKind::vi_affine)
    throw std::invalid_argument("config: instance dumps exist only for bp and mc");
}

bool RunManifest::all_succeeded() const {
  return std::none_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.status == "failed"; });
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::vector<CsvRow> csv_rows(const AlmTrace& trace, bool timing) {
  std::vector<CsvRow> rows;
  for (const auto& rec : trace.records) {
    if (rec.iter == 0) continue;
    rows.push_back({rec.iter, rec.r, rec.dual_step_norm, rec.inner_iters, rec.cum_inner,
                    rec.objective, timing ? rec.wall_ms : 0.0});
  }
  return rows;
}

std::vector<CsvRow> csv_rows(const PpaTrace& trace, bool timing) {
  std::vector<CsvRow> rows;
  long long cum = 0;
  const bool known = trace.distances_to_solution.size() == trace.steps() + 1;
  for (std::size_t k = 0; k < trace.steps(); ++k) {
    cum += trace.root_iterations[k];
    rows.push_back({static_cast<int>(k + 1), trace.residual_norms[k], trace.step_norms[k],
                    trace.root_iterations[k], cum,
                    known ? trace.distances_to_solution[k + 1] : std::nan(""),
                    timing ? trace.wall_ms[k] : 0.0});
  }
  return rows;
}

void write_csv(const std::vector<CsvRow>& rows, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
  out << kCsvHeader << '\n';
  for (const auto& row : rows) {
    out << row.iter << ',' << format_double(row.r_k) << ',' << format_double(row.dual_step_norm)
        << ',' << row.inner_iters << ',' << row.cum_inner << ',' << format_double(row.objective)
        << ',' << format_double(row.wall_ms) << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

void write_csv(const AlmTrace& trace, const fs::path& path, bool timing) {
  write_csv(csv_rows(trace, timing), path);
}

void write_csv(const PpaTrace& trace, const fs::path& path, bool timing) {
  write_csv(csv_rows(trace, timing), path);
}

std::vector<CsvRow> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error("read_csv: unexpected header in " + path.string());

  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 7) throw std::runtime_error("read_csv: malformed row '" + line + "'");
    try {
      CsvRow row;
      row.iter = std::stoi(cells[0]);
      row.r_k = std::stod(cells[1]);
      row.dual_step_norm = std::stod(cells[2]);
      row.inner_iters = std::stoll(cells[3]);
      row.cum_inner = std::stoll(cells[4]);
      row.objective = std::stod(cells[5]);
      row.wall_ms = std::stod(cells[6]);
      rows.push_back(row);
    } catch (const std::logic_error&) {
      throw std::runtime_error("read_csv: unparsable row '" + line + "'");
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

json config_to_json(const ExperimentConfig& cfg) {
  return {{"kind", to_string(cfg.kind)},
          {"m", cfg.m},
          {"n", cfg.n},
          {"density", cfg.density},
          {"seeds", cfg.seeds},
          {"p", cfg.p_list},
          {"beta", cfg.beta_list},
          {"eps_sub", cfg.eps_sub_list},
          {"eps", cfg.eps},
          {"max_outer", cfg.max_outer},
          {"max_inner", cfg.max_inner},
          {"warm_start", cfg.warm_start},
          {"timing", cfg.timing},
          {"dump_instances", cfg.dump_instances},
          {"out_dir", cfg.out_dir.string()},
          {"jobs", cfg.jobs}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.kind = parse_problem_kind(j.at("kind").get<std::string>());
  cfg.m = j.at("m").get<Eigen::Index>();
  cfg.n = j.at("n").get<Eigen::Index>();
  cfg.density = j.at("density").get<double>();
  cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  cfg.p_list = j.at("p").get<std::vector<double>>();
  cfg.beta_list = j.at("beta").get<std::vector<double>>();
  cfg.eps_sub_list = j.at("eps_sub").get<std::vector<double>>();
  cfg.eps = j.at("eps").get<double>();
  cfg.max_outer = j.at("max_outer").get<int>();
  cfg.max_inner = j.at("max_inner").get<int>();
  cfg.warm_start = j.at("warm_start").get<bool>();
  cfg.timing = j.at("timing").get<bool>();
  cfg.dump_instances = j.at("dump_instances").get<bool>();
  cfg.out_dir = j.at("out_dir").get<std::string>();
  cfg.jobs = j.at("jobs").get<int>();
  return cfg;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void write_manifest(const RunManifest& manifest, const fs::path& path) {
  json runs = json::array();
  for (const auto& r : manifest.runs) {
    runs.push_back({{"id", r.id},
                    {"seed", r.seed},
                    {"p", r.p},
                    {"beta", r.beta},
                    {"eps_sub", r.eps_sub},
                    {"csv", r.csv},
                    {"status", r.status},
                    {"error", r.error},
                    {"outer_iterations", r.outer_iterations},
                    {"final_r", r.final_r},
                    {"wall_ms", r.wall_ms}});
  }
  const json j = {{"config", config_to_json(manifest.config)},
                  {"rng_algorithm", manifest.rng_algorithm},
                  {"started_utc", manifest.started_utc},
                  {"total_wall_ms", manifest.total_wall_ms},
                  {"instance_files", manifest.instance_files},
                  {"runs", runs}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_manifest: cannot open " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write_manifest: write failed for " + path.string());
}

RunManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_manifest: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("read_manifest: " + std::string(e.what()));
  }
  RunManifest manifest;
  try {
    manifest.config = config_from_json(j.at("config"));
    manifest.rng_algorithm = j.at("rng_algorithm").get<std::string>();
    manifest.started_utc = j.value("started_utc", "");
    manifest.total_wall_ms = j.value("total_wall_ms", 0.0);
    manifest.instance_files = j.value("instance_files", std::vector<std::string>{});
    for (const auto& r : j.at("runs")) {
      RunRecord rec;
      rec.id = r.at("id").get<std::string>();
      rec.seed = r.at("seed").get<std::uint64_t>();
      rec.p = r.at("p").get<double>();
      rec.beta = r.at("beta").get<double>();
      rec.eps_sub = r.at("eps_sub").get<double>();
      rec.csv = r.at("csv").get<std::string>();
      rec.status = r.at("status").get<std::string>();
      rec.error = r.value("error", "");
      rec.outer_iterations = r.value("outer_iterations", 0);
      rec.final_r = r.value("final_r", 0.0);
      rec.wall_ms = r.value("wall_ms", 0.0);
      manifest.runs.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("read_manifest: " + std::string(e.what()));
  }
  // CSV paths are relative to the manifest, wherever it has been moved.
  manifest.config.out_dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  return manifest;
}

// ---------------------------------------------------------------------------
// Sweep

namespace {

using Instance = std::variant<BpInstance, McInstance, ViInstance>;

struct Cell {
  std::size_t seed_index;
  RunRecord record;
};

void run_cell(const ExperimentConfig& cfg, const Instance& instance, RunRecord& rec) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path csv = rec.id + ".csv";
  if (cfg.kind == ProblemKind::vi_affine) {
    const auto& inst = std::get<ViInstance>(instance);
    PpaConfig pcfg;
    pcfg.p = Order(rec.p);
    pcfg.lambda = rec.beta;
    pcfg.max_iters = cfg.max_outer;
    const PpaTrace trace = run_ppa(inst.op, inst.x0, pcfg);
    write_csv(trace, cfg.out_dir / csv, cfg.timing);
    rec.status = "completed";
    rec.outer_iterations = static_cast<int>(trace.steps());
    rec.final_r = trace.residual_norms.empty() ? 0.0 : trace.residual_norms.back();
  } else {
    const CompositeProblem prob = cfg.kind == ProblemKind::bp
                                      ? make_bp_problem(std::get<BpInstance>(instance))
                                      : make_mc_problem(std::get<McInstance>(instance));
    AlmConfig acfg;
    acfg.p = Order(rec.p);
    acfg.beta = rec.beta;
    acfg.eps = cfg.eps;
    acfg.eps_sub = rec.eps_sub;
    acfg.max_outer = cfg.max_outer;
    acfg.max_inner = cfg.max_inner;
    acfg.warm_start = cfg.warm_start;
    const AlmTrace trace = run_alm(prob, Vector::Zero(prob.a->cols()),
                                   Vector::Zero(prob.a->rows()), acfg);
    write_csv(trace, cfg.out_dir / csv, cfg.timing);
    rec.status = to_string(trace.status);
    rec.outer_iterations = trace.records.back().iter;
    rec.final_r = trace.records.back().r;
  }
  rec.csv = csv.string();
  rec.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

RunManifest run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(cfg.out_dir);

  RunManifest manifest;
  manifest.config = cfg;
  manifest.rng_algorithm = SeededRng::kAlgorithm;
  manifest.started_utc = utc_now();

  // One instance per seed, shared by every (p, beta, eps_sub) cell.
  std::vector<std::optional<Instance>> instances(cfg.seeds.size());
  std::vector<std::string> instance_errors(cfg.seeds.size());
  for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
    const std::uint64_t seed = cfg.seeds[s];
    try {
      switch (cfg.kind) {
        case ProblemKind::bp: instances[s] = gen_bp(cfg.m, cfg.n, cfg.density, seed); break;
        case ProblemKind::mc: instances[s] = gen_mc(cfg.m, cfg.n, cfg.density, seed); break;
        case ProblemKind::vi_affine: instances[s] = gen_vi_affine(cfg.n, seed); break;
      }
      if (cfg.dump_instances) {
        const std::string name = to_string(cfg.kind) + "_s" + std::to_string(seed) + ".txt";
        std::ofstream out(cfg.out_dir / name);
        if (!out) throw std::runtime_error("cannot write instance dump " + name);
        std::visit(
            [&](const auto& inst) {
              if constexpr (!std::is_same_v<std::decay_t<decltype(inst)>, ViInstance>)
                write_instance(out, inst);
            },
            *instances[s]);
        manifest.instance_files.push_back(name);
      }
    } catch (const std::exception& e) {
      instances[s].reset();
      instance_errors[s] = e.what();
    }
  }

  const std::vector<double> eps_axis =
      cfg.kind == ProblemKind::vi_affine ? std::vector<double>{0.0} : cfg.eps_sub_list;
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < cfg.seeds.size(); ++s)
    for (double p : cfg.p_list)
      for (double beta : cfg.beta_list)
        for (double eps_sub : eps_axis) {
          RunRecord rec;
          rec.seed = cfg.seeds[s];
          rec.p = p;
          rec.beta = beta;
          rec.eps_sub = eps_sub;
          rec.id = to_string(cfg.kind) + "_s" + std::to_string(rec.seed) + "_p" + format_tag(p) +
                   (cfg.kind == ProblemKind::vi_affine ? "_l" : "_b") + format_tag(beta);
          if (cfg.kind != ProblemKind::vi_affine) rec.id += "_e" + format_tag(eps_sub);
          cells.push_back({s, std::move(rec)});
        }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      Cell& cell = cells[i];
      if (!instances[cell.seed_index]) {
        cell.record.status = "failed";
        cell.record.error = "instance generation: " + instance_errors[cell.seed_index];
        continue;
      }
      try {
        run_cell(cfg, *instances[cell.seed_index], cell.record);
      } catch (const std::exception& e) {
        cell.record.status = "failed";
        cell.record.error = e.what();
        cell.record.csv.clear();
      }
    }
  };
  const int workers = std::min<int>(cfg.jobs, static_cast<int>(cells.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (auto& cell : cells) manifest.runs.push_back(std::move(cell.record));
  manifest.total_wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  write_manifest(manifest, cfg.out_dir / "manifest.json");
  return manifest;
}

RunManifest rerun_manifest(const RunManifest& manifest, std::optional<fs::path> out_dir) {
  ExperimentConfig cfg = manifest.config;
  if (out_dir) cfg.out_dir = *out_dir;
  return run_sweep(cfg);
}

// ---------------------------------------------------------------------------
// Plots

fs::path emit_plots(const RunManifest& manifest) {
  const ExperimentConfig& cfg = manifest.config;
  const bool vi = cfg.kind == ProblemKind::vi_affine;
  const bool many_beta = cfg.beta_list.size() > 1;
  const bool many_eps = !vi && cfg.eps_sub_list.size() > 1;
  const bool many_seeds = cfg.seeds.size() > 1;
  const std::string beta_name = vi ? "lambda" : "beta";

  auto panel_title = [&](const RunRecord& r) {
    std::string title;
    if (many_beta || !many_eps) title = beta_name + " = " + format_tag(r.beta);
    if (many_eps || (!vi && !many_beta)) {
      if (!title.empty()) title += ", ";
      title += "eps_sub = " + format_tag(r.eps_sub);
    }
    return title;
  };

  // Panels keyed by (beta, eps_sub) in sweep order.
  std::vector<std::pair<double, double>> order;
  std::map<std::pair<double, double>, json> panels;
  for (const auto& r : manifest.runs) {
    if (r.csv.empty()) continue;
    if (!fs::exists(cfg.out_dir / r.csv))
      throw std::runtime_error("emit_plots: missing CSV " + (cfg.out_dir / r.csv).string());
    const auto key = std::make_pair(r.beta, r.eps_sub);
    if (!panels.count(key)) {
      order.push_back(key);
      panels[key] = {{"title", panel_title(r)}, {"lines", json::array()}};
    }
    std::string label = "p = " + format_tag(r.p);
    if (many_seeds) label += ", seed " + std::to_string(r.seed);
    panels[key]["lines"].push_back({{"label", label}, {"csv", r.csv}});
  }
  if (order.empty()) throw std::runtime_error("emit_plots: manifest has no successful runs");

  json layout = json::array();
  for (const auto& key : order) layout.push_back(panels[key]);

  const fs::path script = cfg.out_dir / "plot_residuals.py";
  std::ofstream out(script);
  if (!out) throw std::runtime_error("emit_plots: cannot write " + script.string());
  const std::string ylabel = vi ? "lambda |F(x_k)|" : "r_k = |A x_k - b|";
  out << "import csv\n"
         "import math\n"
         "import os\n"
         "import matplotlib\n"
         "matplotlib.use(\"Agg\")\n"
         "import matplotlib.pyplot as plt\n\n"
         "HERE = os.path.dirname(os.path.abspath(__file__))\n"
      << "PANELS = " << layout.dump(1) << "\n\n"
      << "YLABEL = \"" << ylabel << "\"\n\n"
         "def load(name):\n"
         "    xs, ys = [], []\n"
         "    with open(os.path.join(HERE, name)) as fh:\n"
         "        for row in csv.DictReader(fh):\n"
         "            xs.append(int(row[\"iter\"]))\n"
         "            ys.append(float(row[\"r_k\"]))\n"
         "    return xs, ys\n\n"
         "count = len(PANELS)\n"
         "cols = 2 if count == 4 else min(count, 3)\n"
         "rows = math.ceil(count / cols)\n"
         "fig, axes = plt.subplots(rows, cols, figsize=(5 * cols, 4 * rows), squeeze=False)\n"
         "for ax, panel in zip(axes.flat, PANELS):\n"
         "    for line in panel[\"lines\"]:\n"
         "        xs, ys = load(line[\"csv\"])\n"
         "        ax.semilogy(xs, ys, label=line[\"label\"])\n"
         "    ax.set_title(panel[\"title\"])\n"
         "    ax.set_xlabel(\"iteration\")\n"
         "    ax.set_ylabel(YLABEL)\n"
         "    ax.legend()\n"
         "for ax in list(axes.flat)[count:]:\n"
         "    ax.set_visible(False)\n"
         "fig.tight_layout()\n"
         "fig.savefig(os.path.join(HERE, \"residuals.png\"), dpi=150)\n";
  if (!out) throw std::runtime_error("emit_plots: write failed for " + script.string());
  return script;
}

}  // namespace hoalm
