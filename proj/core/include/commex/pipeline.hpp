#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "commex/dataset.hpp"
#include "commex/embed.hpp"
#include "commex/explore.hpp"
#include "commex/graph.hpp"
#include "commex/init.hpp"
#include "commex/metrics.hpp"

namespace commex {

enum class InitStrategy { kMacAgm, kKnn };

InitStrategy parse_init_strategy(const std::string& name);
std::string to_string(InitStrategy s);

struct RunConfig {
  std::filesystem::path dataset;
  DatasetFormat format = DatasetFormat::kCanonical;
  /// 0 selects the ground-truth community count.
  std::size_t communities = 0;
  /// Absolute query budget T; takes precedence over budget_pct.
  std::optional<std::size_t> budget;
  /// Budget as a percentage of N, rounded to the nearest node.
  std::optional<double> budget_pct;
  double eta = 1.0;
  double lambda = 1.0;
  std::size_t hidden_dim = 128;
  std::size_t epochs_init = 500;
  std::size_t epochs_step = 100;
  double lr = 0.001;
  std::uint64_t seed = 0;
  QueryStrategy query_strategy = QueryStrategy::kMetacode;
  InitStrategy init_strategy = InitStrategy::kMacAgm;
  std::size_t knn_k = 10;
  std::size_t queries_per_round = 1;
  std::optional<double> delta;
  bool covered_only = false;
  /// Sample E_0 (default) or keep pairs with AGM probability >= 0.5.
  AgmMode agm_mode = AgmMode::kSample;
  double inferred_weight = 1.0;
  /// Retrain from the initial parameters with epochs_init every round
  /// instead of warm-starting for epochs_step.
  bool retrain_from_scratch = false;
  /// Skip training and scoring when the query strategy does not read F;
  /// only N_ex is tracked.
  bool exploration_only = false;
  bool record_timing = false;
  std::filesystem::path out;
};

/// Resolved budget: min(T, N).
std::size_t resolve_budget(const RunConfig& cfg, std::size_t n_nodes);

struct StepRecord {
  std::size_t t = 0;
  NodeId queried_node = 0;
  std::size_t n_explored = 0;
  double loss_final = 0.0;
  double nmi = 0.0;
  double f1 = 0.0;
  double wall_ms = 0.0;
};

struct RunResult {
  std::vector<StepRecord> steps;
  EvalReport report;
  double loss_final = 0.0;
  std::size_t n_nodes = 0;
  std::size_t communities = 0;
  std::size_t queries = 0;
  ObservedNetwork observed;
  AffiliationMatrix f;
  std::vector<std::string> warnings;
};

using StepCallback = std::function<void(const StepRecord&)>;

/// f_init (or knn_init), initial training, then rounds of
/// select -> query -> update -> retrain -> evaluate until the budget is spent.
RunResult run(const RunConfig& cfg, const Dataset& data, const StepCallback& on_step = {});

/// Loads cfg.dataset and runs.
RunResult run(const RunConfig& cfg);

/// Runs and writes JSON lines to cfg.out: one object per StepRecord, then a
/// summary object. Step lines are flushed as they are produced; on failure an
/// error object is appended before rethrowing.
RunResult run_to_file(const RunConfig& cfg, const Dataset& data);
RunResult run_to_file(const RunConfig& cfg);

/// JSON echo of every RunConfig field.
std::string config_to_json(const RunConfig& cfg);

/// Sets a RunConfig field from its CLI-style name (`eta`, `lambda`,
/// `budget_pct`, `query_strategy`, ...). Throws PreconditionError for unknown
/// names or unparsable values.
void apply_param(RunConfig& cfg, const std::string& name, const std::string& value);

struct SweepAxis {
  std::string name;
  std::vector<std::string> values;
};

struct SweepCell {
  std::vector<std::pair<std::string, std::string>> params;
  std::size_t runs_ok = 0;
  std::size_t runs_failed = 0;
  double nmi_mean = 0.0;
  double nmi_std = 0.0;
  double f1_mean = 0.0;
  double f1_std = 0.0;
  bool failed = false;
  std::string error;
};

/// Runs the cross product of `grid` over seeds cfg.seed .. cfg.seed +
/// n_seeds - 1 and aggregates NMI and F1 (mean, population std) per cell.
/// Cells run on up to `jobs` threads; results are ordered by grid position.
std::vector<SweepCell> sweep(const RunConfig& tmpl, const std::vector<SweepAxis>& grid,
                             std::size_t n_seeds, std::size_t jobs = 1);

std::string sweep_to_csv(const std::vector<SweepCell>& cells);

/// Step records of one run plus what is needed to align them.
struct RunTrace {
  std::string strategy;
  std::size_t n_nodes = 0;
  std::vector<StepRecord> steps;
};

/// Parses a JSON-lines file written by run_to_file.
RunTrace read_run_file(const std::filesystem::path& file);

/// CSV with header `budget_pct,strategy,mean_n_explored,std_n_explored,runs`,
/// one row per (strategy, step) averaged across traces.
std::string emit_exploration_curve(const std::vector<RunTrace>& traces);

double mean(const std::vector<double>& v);
double population_std(const std::vector<double>& v);

}  // namespace commex
