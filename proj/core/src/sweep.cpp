#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>
#include <tuple>

#include "commex/errors.hpp"
#include "commex/pipeline.hpp"

namespace commex {

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

namespace {

std::vector<std::vector<std::pair<std::string, std::string>>> cross_product(
    const std::vector<SweepAxis>& grid) {
  std::vector<std::vector<std::pair<std::string, std::string>>> cells(1);
  for (const SweepAxis& axis : grid) {
    if (axis.values.empty()) throw PreconditionError("sweep axis '" + axis.name + "' is empty");
    std::vector<std::vector<std::pair<std::string, std::string>>> next;
    for (const auto& prefix : cells) {
      for (const std::string& v : axis.values) {
        auto cell = prefix;
        cell.emplace_back(axis.name, v);
        next.push_back(std::move(cell));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

/// Datasets shared by all cells, loaded once per (path, format).
class DatasetCache {
 public:
  const Dataset& get(const RunConfig& cfg) {
    const auto key = std::make_pair(cfg.dataset.string(), static_cast<int>(cfg.format));
    std::shared_ptr<Entry> entry;
    {
      std::lock_guard lock(mu_);
      auto& slot = entries_[key];
      if (!slot) slot = std::make_shared<Entry>();
      entry = slot;
    }
    std::call_once(entry->once, [&] {
      try {
        entry->data = load_dataset(cfg.dataset, cfg.format);
      } catch (...) {
        entry->error = std::current_exception();
      }
    });
    if (entry->error) std::rethrow_exception(entry->error);
    return entry->data;
  }

 private:
  struct Entry {
    std::once_flag once;
    Dataset data;
    std::exception_ptr error;
  };
  std::mutex mu_;
  std::map<std::pair<std::string, int>, std::shared_ptr<Entry>> entries_;
};

SweepCell run_cell(const RunConfig& tmpl, std::vector<std::pair<std::string, std::string>> params,
                   std::size_t n_seeds, DatasetCache& cache) {
  SweepCell cell;
  cell.params = std::move(params);
  std::vector<double> nmi;
  std::vector<double> f1;
  try {
    RunConfig cfg = tmpl;
    for (const auto& [name, value] : cell.params) apply_param(cfg, name, value);
    const Dataset& data = cache.get(cfg);
    for (std::size_t s = 0; s < n_seeds; ++s) {
      RunConfig seeded = cfg;
      seeded.seed = tmpl.seed + s;
      try {
        const RunResult r = run(seeded, data);
        nmi.push_back(r.report.nmi);
        f1.push_back(r.report.f1);
        ++cell.runs_ok;
      } catch (const std::exception& e) {
        ++cell.runs_failed;
        if (cell.error.empty()) cell.error = e.what();
      }
    }
  } catch (const std::exception& e) {
    cell.runs_failed = n_seeds;
    cell.error = e.what();
  }
  cell.failed = cell.runs_failed > 0;
  cell.nmi_mean = mean(nmi);
  cell.nmi_std = population_std(nmi);
  cell.f1_mean = mean(f1);
  cell.f1_std = population_std(f1);
  return cell;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

std::vector<SweepCell> sweep(const RunConfig& tmpl, const std::vector<SweepAxis>& grid,
                             std::size_t n_seeds, std::size_t jobs) {
  if (grid.empty()) throw PreconditionError("sweep grid is empty");
  if (n_seeds == 0) throw PreconditionError("n_seeds must be > 0");
  const auto combos = cross_product(grid);
  std::vector<SweepCell> cells(combos.size());
  DatasetCache cache;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < combos.size(); i = next++) {
      cells[i] = run_cell(tmpl, combos[i], n_seeds, cache);
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, combos.size());
  std::vector<std::jthread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  return cells;
}

std::string sweep_to_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream os;
  std::vector<std::string> names;
  if (!cells.empty()) {
    for (const auto& [name, value] : cells.front().params) names.push_back(name);
  }
  for (const auto& n : names) os << csv_escape(n) << ',';
  os << "runs_ok,runs_failed,nmi_mean,nmi_std,f1_mean,f1_std,status,error\n";
  for (const SweepCell& c : cells) {
    for (const auto& [name, value] : c.params) os << csv_escape(value) << ',';
    os << c.runs_ok << ',' << c.runs_failed << ',' << fmt(c.nmi_mean) << ',' << fmt(c.nmi_std)
       << ',' << fmt(c.f1_mean) << ',' << fmt(c.f1_std) << ',' << (c.failed ? "failed" : "ok")
       << ',' << csv_escape(c.error) << '\n';
  }
  return os.str();
}

RunTrace read_run_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw MissingFile(file);
  RunTrace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "step") {
        StepRecord r;
        r.t = j.at("t").get<std::size_t>();
        r.queried_node = j.at("queried_node").get<NodeId>();
        r.n_explored = j.at("n_explored").get<std::size_t>();
        r.loss_final = j.at("loss_final").get<double>();
        r.nmi = j.at("nmi").get<double>();
        r.f1 = j.at("f1").get<double>();
        if (j.contains("wall_ms")) r.wall_ms = j.at("wall_ms").get<double>();
        trace.steps.push_back(r);
      } else if (type == "summary") {
        trace.n_nodes = j.at("n_nodes").get<std::size_t>();
        trace.strategy = j.at("config").at("query_strategy").get<std::string>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(file.string(), line_no, e.what());
    }
  }
  if (trace.n_nodes == 0 && !trace.steps.empty()) {
    throw ParseError(file.string(), line_no, "missing summary record");
  }
  return trace;
}

std::string emit_exploration_curve(const std::vector<RunTrace>& traces) {
  std::ostringstream os;
  os << "budget_pct,strategy,mean_n_explored,std_n_explored,runs\n";
  // (strategy, n_nodes, t) -> N_ex samples; n_nodes keeps traces over
  // different graphs apart.
  std::map<std::tuple<std::string, std::size_t, std::size_t>, std::vector<double>> groups;
  for (const RunTrace& tr : traces) {
    for (const StepRecord& r : tr.steps) {
      groups[{tr.strategy, tr.n_nodes, r.t}].push_back(static_cast<double>(r.n_explored));
    }
  }
  for (const auto& [key, values] : groups) {
    const auto& [strategy, n, t] = key;
    const double pct = n == 0 ? 0.0 : 100.0 * static_cast<double>(t) / static_cast<double>(n);
    os << fmt(pct) << ',' << csv_escape(strategy) << ',' << fmt(mean(values)) << ','
       << fmt(population_std(values)) << ',' << values.size() << '\n';
  }
  return os.str();
}

}  // namespace commex
