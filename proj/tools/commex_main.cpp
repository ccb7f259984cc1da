// commex: command-line driver for exploratory community detection runs.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "commex/alloc.hpp"
#include "commex/dataset.hpp"
#include "commex/errors.hpp"
#include "commex/gradcheck.hpp"
#include "commex/pipeline.hpp"

namespace {

using commex::RunConfig;

struct CliOptions {
  RunConfig cfg;
  std::string format = "canonical";
  std::string strategy = "metacode";
  std::string init = "mac-agm";
  std::optional<std::size_t> budget;
  std::optional<double> budget_pct;
  std::optional<double> delta;
  bool agm_threshold = false;
};

void add_run_flags(CLI::App* app, CliOptions& o) {
  app->add_option("--dataset", o.cfg.dataset, "Dataset directory, or ego file prefix such as facebook/0")
      ->required();
  app->add_option("--format", o.format, "Dataset layout")
      ->check(CLI::IsMember({"ego", "canonical"}))
      ->capture_default_str();
  app->add_option("--communities", o.cfg.communities, "Community count C (0: ground-truth count)")
      ->capture_default_str();
  auto* budget = app->add_option("--budget", o.budget, "Absolute query budget T");
  auto* pct = app->add_option("--budget-pct", o.budget_pct, "Query budget as a percentage of N");
  budget->excludes(pct);
  app->add_option("--eta", o.cfg.eta, "Metadata loss weight")->capture_default_str();
  app->add_option("--lambda", o.cfg.lambda, "Diversity weight of the query score")
      ->capture_default_str();
  app->add_option("--hidden-dim", o.cfg.hidden_dim)->capture_default_str();
  app->add_option("--epochs-init", o.cfg.epochs_init)->capture_default_str();
  app->add_option("--epochs-step", o.cfg.epochs_step)->capture_default_str();
  app->add_option("--lr", o.cfg.lr)->capture_default_str();
  app->add_option("--seed", o.cfg.seed)->capture_default_str();
  app->add_option("--query-strategy", o.strategy)
      ->check(CLI::IsMember({"metacode", "rs", "dfs"}))
      ->capture_default_str();
  app->add_option("--init", o.init)->check(CLI::IsMember({"mac-agm", "knn"}))->capture_default_str();
  app->add_option("--knn-k", o.cfg.knn_k)->capture_default_str();
  app->add_option("--queries-per-round", o.cfg.queries_per_round)->capture_default_str();
  app->add_option("--delta", o.delta, "Membership threshold (default from edge density)");
  app->add_option("--inferred-weight", o.cfg.inferred_weight,
                  "Adjacency weight of inferred edges")
      ->capture_default_str();
  app->add_flag("--covered-only", o.cfg.covered_only,
                "Score only nodes that belong to a ground-truth community");
  app->add_flag("--agm-threshold", o.agm_threshold,
                "Keep pairs with AGM probability >= 0.5 instead of sampling");
  app->add_flag("--retrain-from-scratch", o.cfg.retrain_from_scratch,
                "Restart training from the initial weights every round");
  app->add_flag("--exploration-only", o.cfg.exploration_only,
                "Track N_ex only; skip training when the strategy ignores F");
  app->add_flag("--timing", o.cfg.record_timing, "Add wall_ms to step records");
}

RunConfig finish(CliOptions o) {
  RunConfig cfg = std::move(o.cfg);
  cfg.format = commex::parse_dataset_format(o.format);
  cfg.query_strategy = commex::parse_query_strategy(o.strategy);
  cfg.init_strategy = commex::parse_init_strategy(o.init);
  cfg.budget = o.budget;
  cfg.budget_pct = o.budget_pct;
  cfg.delta = o.delta;
  cfg.agm_mode = o.agm_threshold ? commex::AgmMode::kThreshold : commex::AgmMode::kSample;
  return cfg;
}

/// "name=v1,v2,v3" -> axis.
commex::SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw commex::PreconditionError("grid axis must look like name=v1,v2: '" + spec + "'");
  }
  commex::SweepAxis axis{spec.substr(0, eq), {}};
  std::stringstream rest(spec.substr(eq + 1));
  for (std::string v; std::getline(rest, v, ',');) {
    if (!v.empty()) axis.values.push_back(v);
  }
  return axis;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw commex::Error("cannot open " + path + " for writing");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  commex::tune_allocator();
  CLI::App app{"Exploratory overlapping community detection on partially observed networks"};
  app.require_subcommand(1);

  CliOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Run one exploration and write JSON lines");
  add_run_flags(run_cmd, run_opts);
  run_cmd->add_option("--out", run_opts.cfg.out, "Output JSON-lines file")->required();

  CliOptions sweep_opts;
  std::vector<std::string> grid_specs;
  std::size_t n_seeds = 1;
  std::size_t jobs = 1;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid of runs aggregated over seeds (CSV)");
  add_run_flags(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--grid", grid_specs, "Axis name=v1,v2 (repeatable)")->required();
  sweep_cmd->add_option("--seeds", n_seeds, "Seeds per cell, starting at --seed")
      ->capture_default_str();
  sweep_cmd->add_option("--jobs", jobs, "Cells run in parallel")->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "Output CSV (default stdout)");

  std::vector<std::string> curve_inputs;
  std::string curve_out;
  auto* curve_cmd = app.add_subcommand("curve", "Exploration curve CSV from run outputs");
  curve_cmd->add_option("inputs", curve_inputs, "JSON-lines files written by `run`")
      ->check(CLI::ExistingFile);
  curve_cmd->add_option("--out", curve_out, "Output CSV (default stdout)");

  std::string convert_in;
  std::string convert_out;
  auto* convert_cmd = app.add_subcommand("convert", "Ego-network files to the canonical layout");
  convert_cmd->add_option("--input", convert_in, "Ego file prefix, e.g. facebook/0")->required();
  convert_cmd->add_option("--out", convert_out, "Output directory")->required();

  commex::SyntheticSpec synth_spec;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic AGM dataset");
  synth_cmd->add_option("--nodes", synth_spec.n_nodes)->capture_default_str();
  synth_cmd->add_option("--communities", synth_spec.n_communities)->capture_default_str();
  synth_cmd->add_option("--dim", synth_spec.dim)->capture_default_str();
  synth_cmd->add_option("--overlap", synth_spec.overlap_prob)->capture_default_str();
  synth_cmd->add_option("--affiliation", synth_spec.affiliation)->capture_default_str();
  synth_cmd->add_option("--bits-per-community", synth_spec.bits_per_community)
      ->capture_default_str();
  synth_cmd->add_option("--feature-drop", synth_spec.feature_drop)->capture_default_str();
  synth_cmd->add_option("--feature-noise", synth_spec.feature_noise)->capture_default_str();
  synth_cmd->add_option("--seed", synth_spec.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();

  std::size_t gc_instances = 50;
  std::uint64_t gc_seed = 0;
  double gc_step = 1e-5;
  double gc_tol = 1e-4;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Analytic vs finite-difference gradients");
  gc_cmd->add_option("--instances", gc_instances)->capture_default_str();
  gc_cmd->add_option("--seed", gc_seed)->capture_default_str();
  gc_cmd->add_option("--step", gc_step)->capture_default_str();
  gc_cmd->add_option("--tolerance", gc_tol)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const RunConfig cfg = finish(run_opts);
      const commex::RunResult r = commex::run_to_file(cfg);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      std::cerr << "nmi " << r.report.nmi << " f1 " << r.report.f1 << " n_explored "
                << r.report.n_explored << " queries " << r.queries << '\n';
    } else if (*sweep_cmd) {
      std::vector<commex::SweepAxis> grid;
      for (const auto& s : grid_specs) grid.push_back(parse_axis(s));
      const auto cells = commex::sweep(finish(sweep_opts), grid, n_seeds, jobs);
      write_text(sweep_out, commex::sweep_to_csv(cells));
      for (const auto& c : cells) {
        if (c.failed) return 1;
      }
    } else if (*curve_cmd) {
      std::vector<commex::RunTrace> traces;
      for (const auto& f : curve_inputs) traces.push_back(commex::read_run_file(f));
      write_text(curve_out, commex::emit_exploration_curve(traces));
    } else if (*convert_cmd) {
      const commex::Dataset d = commex::load_dataset(convert_in, commex::DatasetFormat::kEgo);
      for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
      commex::write_canonical(d, convert_out);
    } else if (*synth_cmd) {
      commex::write_canonical(commex::synth_dataset(synth_spec), synth_out);
    } else if (*gc_cmd) {
      const double etas[] = {0.0, 1.0, 2.0};
      double worst = 0.0;
      for (std::size_t i = 0; i < gc_instances; ++i) {
        const auto inst = commex::random_gradcheck_instance(gc_seed + i, etas[i % 3]);
        const auto rep = commex::gradient_check(inst, gc_step);
        worst = std::max(worst, rep.max_relative_error);
        std::cout << "instance " << i << " eta " << etas[i % 3] << " max_rel "
                  << rep.max_relative_error << " worst " << rep.worst_entry << '\n';
      }
      std::cout << "max relative error " << worst << (worst <= gc_tol ? " ok" : " FAILED") << '\n';
      return worst <= gc_tol ? 0 : 1;
    }
  } catch (const commex::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
