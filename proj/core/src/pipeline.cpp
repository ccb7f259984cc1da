#include "commex/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <type_traits>
#include <nlohmann/json.hpp>

#include "commex/errors.hpp"

namespace commex {

using nlohmann::json;

InitStrategy parse_init_strategy(const std::string& name) {
  if (name == "mac-agm") return InitStrategy::kMacAgm;
  if (name == "knn") return InitStrategy::kKnn;
  throw PreconditionError("unknown init strategy '" + name + "'");
}

std::string to_string(InitStrategy s) {
  return s == InitStrategy::kKnn ? "knn" : "mac-agm";
}

namespace {

void validate(const RunConfig& cfg) {
  auto finite_nonneg = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw PreconditionError(std::string(name) + " must be finite and >= 0");
    }
  };
  finite_nonneg(cfg.eta, "eta");
  finite_nonneg(cfg.lambda, "lambda");
  finite_nonneg(cfg.inferred_weight, "inferred_weight");
  if (!std::isfinite(cfg.lr) || cfg.lr <= 0.0) throw PreconditionError("lr must be > 0");
  if (cfg.budget_pct) finite_nonneg(*cfg.budget_pct, "budget_pct");
  if (cfg.delta && !std::isfinite(*cfg.delta)) throw PreconditionError("delta must be finite");
  if (cfg.hidden_dim == 0) throw PreconditionError("hidden_dim must be > 0");
  if (cfg.epochs_init == 0) throw PreconditionError("epochs_init must be > 0");
  if (cfg.epochs_step == 0) throw PreconditionError("epochs_step must be > 0");
  if (cfg.queries_per_round == 0) throw PreconditionError("queries_per_round must be > 0");
}

bool needs_model(const RunConfig& cfg) {
  return !cfg.exploration_only || cfg.query_strategy == QueryStrategy::kMetacode;
}

json step_json(const StepRecord& r, bool timing) {
  json j = {{"schema", 1},         {"type", "step"},   {"t", r.t},
            {"queried_node", r.queried_node},          {"n_explored", r.n_explored},
            {"loss_final", r.loss_final},              {"nmi", r.nmi},
            {"f1", r.f1}};
  if (timing) j["wall_ms"] = r.wall_ms;
  return j;
}

json config_json(const RunConfig& cfg) {
  return {
      {"dataset", cfg.dataset.generic_string()},
      {"format", cfg.format == DatasetFormat::kEgo ? "ego" : "canonical"},
      {"communities", cfg.communities},
      {"budget", cfg.budget ? json(*cfg.budget) : json(nullptr)},
      {"budget_pct", cfg.budget_pct ? json(*cfg.budget_pct) : json(nullptr)},
      {"eta", cfg.eta},
      {"lambda", cfg.lambda},
      {"hidden_dim", cfg.hidden_dim},
      {"epochs_init", cfg.epochs_init},
      {"epochs_step", cfg.epochs_step},
      {"lr", cfg.lr},
      {"seed", cfg.seed},
      {"query_strategy", to_string(cfg.query_strategy)},
      {"init", to_string(cfg.init_strategy)},
      {"knn_k", cfg.knn_k},
      {"queries_per_round", cfg.queries_per_round},
      {"delta", cfg.delta ? json(*cfg.delta) : json(nullptr)},
      {"covered_only", cfg.covered_only},
      {"agm_mode", cfg.agm_mode == AgmMode::kThreshold ? "threshold" : "sample"},
      {"inferred_weight", cfg.inferred_weight},
      {"retrain_from_scratch", cfg.retrain_from_scratch},
      {"exploration_only", cfg.exploration_only},
  };
}

}  // namespace

std::string config_to_json(const RunConfig& cfg) { return config_json(cfg).dump(); }

std::size_t resolve_budget(const RunConfig& cfg, std::size_t n_nodes) {
  std::size_t t = 0;
  if (cfg.budget) {
    t = *cfg.budget;
  } else if (cfg.budget_pct) {
    if (!std::isfinite(*cfg.budget_pct) || *cfg.budget_pct < 0.0) {
      throw PreconditionError("budget_pct must be finite and >= 0");
    }
    t = static_cast<std::size_t>(std::lround(*cfg.budget_pct / 100.0 * static_cast<double>(n_nodes)));
  }
  return std::min(t, n_nodes);
}

RunResult run(const RunConfig& cfg, const Dataset& data, const StepCallback& on_step) {
  validate(cfg);
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  const HiddenNetwork& hidden = data.network;
  const NodeFeatures& x = data.features;
  const std::size_t n = hidden.n_nodes();
  if (x.n_nodes() != n) throw InconsistentDims("feature rows do not match node count");

  RunResult result;
  result.n_nodes = n;
  result.warnings = data.warnings;
  result.communities = cfg.communities != 0 ? cfg.communities : hidden.truth().size();
  if (result.communities == 0) throw DegenerateInput("community count resolves to 0");
  const std::size_t budget = resolve_budget(cfg, n);

  ObservedNetwork g = cfg.init_strategy == InitStrategy::kKnn
                          ? knn_init(x, cfg.knn_k)
                          : f_init(x, result.communities, cfg.seed, MacOptions{}, cfg.agm_mode);

  const EvalOptions eval_opts{cfg.delta, cfg.covered_only};
  const bool model = needs_model(cfg);
  const ModelParams p0 = init_params(x.dim(), cfg.hidden_dim, result.communities, cfg.seed);

  TrainOptions init_opts;
  init_opts.epochs = cfg.epochs_init;
  init_opts.eta = cfg.eta;
  init_opts.adam.lr = cfg.lr;
  init_opts.inferred_weight = cfg.inferred_weight;
  TrainOptions step_opts = init_opts;
  if (!cfg.retrain_from_scratch) step_opts.epochs = cfg.epochs_step;

  ModelParams params = p0;
  AffiliationMatrix f{Matrix::Zero(static_cast<Eigen::Index>(n),
                                   static_cast<Eigen::Index>(result.communities))};
  if (model) {
    TrainResult tr = train(g, x, p0, init_opts);
    params = std::move(tr.params);
    f = std::move(tr.f);
    result.loss_final = tr.loss_final;
  }

  QueryOracle oracle(hidden, budget);
  QueryState state(n, cfg.lambda, cfg.seed);
  std::size_t t = 0;
  while (t < budget) {
    const std::size_t round = std::min(cfg.queries_per_round, budget - t);
    std::vector<StepRecord> pending;
    for (std::size_t q = 0; q < round; ++q) {
      const NodeId u = select_next(cfg.query_strategy, f, state);
      const std::vector<NodeId> nbrs = oracle.query(u);
      g.apply_query(u, nbrs);
      state.record(u, nbrs);
      StepRecord rec;
      rec.t = ++t;
      rec.queried_node = u;
      rec.n_explored = explored_count(g);
      pending.push_back(rec);
    }
    EvalReport rep;
    if (model) {
      TrainResult tr = train(g, x, cfg.retrain_from_scratch ? p0 : params, step_opts);
      params = std::move(tr.params);
      f = std::move(tr.f);
      result.loss_final = tr.loss_final;
      if (!cfg.exploration_only) rep = evaluate(f, g, hidden.truth(), eval_opts);
    }
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    for (StepRecord& rec : pending) {
      rec.loss_final = result.loss_final;
      rec.nmi = rep.nmi;
      rec.f1 = rep.f1;
      rec.wall_ms = ms;
      result.steps.push_back(rec);
      if (on_step) on_step(rec);
    }
  }

  if (model && !cfg.exploration_only) {
    result.report = evaluate(f, g, hidden.truth(), eval_opts);
  } else {
    result.report.n_explored = explored_count(g);
  }
  result.queries = oracle.queried().size();
  result.observed = std::move(g);
  result.f = std::move(f);
  return result;
}

RunResult run(const RunConfig& cfg) { return run(cfg, load_dataset(cfg.dataset, cfg.format)); }

RunResult run_to_file(const RunConfig& cfg, const Dataset& data) {
  if (cfg.out.empty()) throw PreconditionError("output path is empty");
  if (cfg.out.has_parent_path()) std::filesystem::create_directories(cfg.out.parent_path());
  std::ofstream out(cfg.out, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + cfg.out.string() + " for writing");

  try {
    RunResult result = run(cfg, data, [&](const StepRecord& r) {
      out << step_json(r, cfg.record_timing).dump() << '\n';
      out.flush();
    });
    json summary = {{"schema", 1},
                    {"type", "summary"},
                    {"nmi", result.report.nmi},
                    {"f1", result.report.f1},
                    {"n_explored", result.report.n_explored},
                    {"n_detected", result.report.n_detected},
                    {"n_nodes", result.n_nodes},
                    {"communities", result.communities},
                    {"queries", result.queries},
                    {"loss_final", result.loss_final},
                    {"warnings", result.warnings},
                    {"config", config_json(cfg)}};
    out << summary.dump() << '\n';
    out.flush();
    return result;
  } catch (const std::exception& e) {
    out << json{{"schema", 1}, {"type", "error"}, {"message", e.what()}}.dump() << '\n';
    out.flush();
    throw;
  }
}

RunResult run_to_file(const RunConfig& cfg) {
  return run_to_file(cfg, load_dataset(cfg.dataset, cfg.format));
}

namespace {

template <typename T>
T parse_number(const std::string& name, const std::string& value) {
  try {
    std::size_t used = 0;
    T out{};
    if constexpr (std::is_floating_point_v<T>) {
      out = static_cast<T>(std::stod(value, &used));
    } else {
      if (!value.empty() && value.front() == '-') throw std::invalid_argument(value);
      out = static_cast<T>(std::stoull(value, &used));
    }
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::logic_error&) {
    throw PreconditionError("bad value '" + value + "' for " + name);
  }
}

}  // namespace

void apply_param(RunConfig& cfg, const std::string& name, const std::string& value) {
  // Accept both CLI spelling (budget-pct) and field spelling (budget_pct).
  std::string key = name;
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "dataset") {
    cfg.dataset = value;
  } else if (key == "format") {
    cfg.format = parse_dataset_format(value);
  } else if (key == "communities") {
    cfg.communities = parse_number<std::size_t>(key, value);
  } else if (key == "budget") {
    cfg.budget = parse_number<std::size_t>(key, value);
    cfg.budget_pct.reset();
  } else if (key == "budget_pct") {
    cfg.budget_pct = parse_number<double>(key, value);
    cfg.budget.reset();
  } else if (key == "eta") {
    cfg.eta = parse_number<double>(key, value);
  } else if (key == "lambda") {
    cfg.lambda = parse_number<double>(key, value);
  } else if (key == "hidden_dim") {
    cfg.hidden_dim = parse_number<std::size_t>(key, value);
  } else if (key == "epochs_init") {
    cfg.epochs_init = parse_number<std::size_t>(key, value);
  } else if (key == "epochs_step") {
    cfg.epochs_step = parse_number<std::size_t>(key, value);
  } else if (key == "lr") {
    cfg.lr = parse_number<double>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "query_strategy") {
    cfg.query_strategy = parse_query_strategy(value);
  } else if (key == "init") {
    cfg.init_strategy = parse_init_strategy(value);
  } else if (key == "knn_k") {
    cfg.knn_k = parse_number<std::size_t>(key, value);
  } else if (key == "queries_per_round") {
    cfg.queries_per_round = parse_number<std::size_t>(key, value);
  } else if (key == "delta") {
    cfg.delta = parse_number<double>(key, value);
  } else if (key == "inferred_weight") {
    cfg.inferred_weight = parse_number<double>(key, value);
  } else {
    throw PreconditionError("unknown parameter '" + name + "'");
  }
}

}  // namespace commex
