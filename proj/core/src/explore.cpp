#include "commex/explore.hpp"

#include <algorithm>
#include <cmath>

#include "commex/errors.hpp"

namespace commex {

QueryStrategy parse_query_strategy(const std::string& name) {
  if (name == "metacode") return QueryStrategy::kMetacode;
  if (name == "rs") return QueryStrategy::kRandom;
  if (name == "dfs") return QueryStrategy::kDfs;
  throw PreconditionError("unknown query strategy '" + name + "'");
}

std::string to_string(QueryStrategy s) {
  switch (s) {
    case QueryStrategy::kMetacode:
      return "metacode";
    case QueryStrategy::kRandom:
      return "rs";
    case QueryStrategy::kDfs:
      return "dfs";
  }
  return "unknown";
}

QueryState::QueryState(std::size_t n_nodes, double lambda, std::uint64_t seed)
    : lambda_(lambda), queried_mask_(n_nodes), rng_(make_rng(seed, Stream::kRandomQuery)) {
  if (!(lambda >= 0.0)) throw PreconditionError("lambda must be >= 0");
}

void QueryState::record(NodeId u, std::span<const NodeId> revealed_neighbors) {
  if (u >= queried_mask_.size()) throw UnknownNode(u, queried_mask_.size());
  if (queried_mask_[u]) throw DuplicateQuery(u);
  queried_mask_[u] = true;
  queried_.push_back(u);
  std::vector<NodeId> fresh;
  for (NodeId v : revealed_neighbors) {
    if (v < queried_mask_.size() && !queried_mask_[v]) fresh.push_back(v);
  }
  std::sort(fresh.begin(), fresh.end());
  dfs_stack_.insert(dfs_stack_.end(), fresh.begin(), fresh.end());
}

double cosine_similarity(const RowVector& a, const RowVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

double metacode_score(const Matrix& f, NodeId u, const std::vector<NodeId>& queried,
                      double lambda) {
  const RowVector fu = f.row(u);
  double mean_sim = 0.0;
  if (!queried.empty()) {
    for (NodeId v : queried) mean_sim += cosine_similarity(fu, f.row(v));
    mean_sim /= static_cast<double>(queried.size());
  }
  return fu.lpNorm<1>() + lambda * (1.0 - mean_sim);
}

NodeId select_metacode(const AffiliationMatrix& f, const QueryState& st) {
  if (f.n_nodes() != static_cast<Eigen::Index>(st.n_nodes())) {
    throw ShapeMismatch("affiliation rows do not match node count");
  }
  if (st.exhausted()) throw NoCandidates();

  // Normalized rows of queried nodes, summed once: the mean similarity of u
  // is then (F_u / |F_u|) . sum_v (F_v / |F_v|) / |P_t|.
  const Matrix& f_mat = f.values;
  RowVector unit_sum = RowVector::Zero(f_mat.cols());
  for (NodeId v : st.queried()) {
    const double nv = f_mat.row(v).norm();
    if (nv > 0.0) unit_sum += f_mat.row(v) / nv;
  }
  const double p_size = static_cast<double>(st.queried().size());

  NodeId best = 0;
  double best_score = 0.0;
  bool have = false;
  for (NodeId u = 0; u < st.n_nodes(); ++u) {
    if (st.is_queried(u)) continue;
    const RowVector fu = f_mat.row(u);
    double mean_sim = 0.0;
    if (p_size > 0.0) {
      const double nu = fu.norm();
      if (nu > 0.0) mean_sim = fu.dot(unit_sum) / nu / p_size;
    }
    const double score = fu.lpNorm<1>() + st.lambda() * (1.0 - mean_sim);
    if (!have || score > best_score) {
      best = u;
      best_score = score;
      have = true;
    }
  }
  return best;
}

NodeId select_random(QueryState& st) {
  std::vector<NodeId> open;
  for (NodeId u = 0; u < st.n_nodes(); ++u) {
    if (!st.is_queried(u)) open.push_back(u);
  }
  if (open.empty()) throw NoCandidates();
  std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
  return open[pick(st.rng())];
}

NodeId select_dfs(QueryState& st) {
  if (st.exhausted()) throw NoCandidates();
  auto& stack = st.dfs_stack();
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    if (!st.is_queried(u)) return u;
  }
  for (NodeId u = 0; u < st.n_nodes(); ++u) {
    if (!st.is_queried(u)) return u;
  }
  throw NoCandidates();
}

NodeId select_next(QueryStrategy strategy, const AffiliationMatrix& f, QueryState& st) {
  switch (strategy) {
    case QueryStrategy::kMetacode:
      return select_metacode(f, st);
    case QueryStrategy::kRandom:
      return select_random(st);
    case QueryStrategy::kDfs:
      return select_dfs(st);
  }
  throw PreconditionError("unknown query strategy");
}

}  // namespace commex
