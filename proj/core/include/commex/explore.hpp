#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "commex/embed.hpp"
#include "commex/graph.hpp"
#include "commex/rng.hpp"

namespace commex {

enum class QueryStrategy { kMetacode, kRandom, kDfs };

QueryStrategy parse_query_strategy(const std::string& name);
std::string to_string(QueryStrategy s);

/// Exploration bookkeeping owned by the pipeline loop.
class QueryState {
 public:
  QueryState(std::size_t n_nodes, double lambda, std::uint64_t seed);

  std::size_t n_nodes() const { return queried_mask_.size(); }
  double lambda() const { return lambda_; }
  const std::vector<NodeId>& queried() const { return queried_; }
  bool is_queried(NodeId u) const { return queried_mask_.at(u); }
  bool exhausted() const { return queried_.size() == queried_mask_.size(); }

  /// Appends `u` to P_t and, for DFS, pushes its unqueried neighbors in
  /// ascending id order.
  void record(NodeId u, std::span<const NodeId> revealed_neighbors);

  std::vector<NodeId>& dfs_stack() { return dfs_stack_; }
  const std::vector<NodeId>& dfs_stack() const { return dfs_stack_; }
  Rng& rng() { return rng_; }

 private:
  double lambda_;
  std::vector<NodeId> queried_;
  std::vector<bool> queried_mask_;
  std::vector<NodeId> dfs_stack_;
  Rng rng_;
};

/// Cosine similarity, defined as 0 when either vector is all-zero.
double cosine_similarity(const RowVector& a, const RowVector& b);

/// Score of `u`: |F_u|_1 + lambda (1 - mean_{v in P_t} sim(F_u, F_v)); the
/// mean is taken as 0 when P_t is empty.
double metacode_score(const Matrix& f, NodeId u, const std::vector<NodeId>& queried,
                      double lambda);

/// Argmax of metacode_score over unqueried nodes, ties to the lowest id.
NodeId select_metacode(const AffiliationMatrix& f, const QueryState& st);

/// Uniform draw over unqueried nodes from the state's RNG.
NodeId select_random(QueryState& st);

/// Pops the most recent unqueried node from the DFS stack, restarting from
/// the lowest-id unqueried node when the stack runs dry.
NodeId select_dfs(QueryState& st);

NodeId select_next(QueryStrategy strategy, const AffiliationMatrix& f, QueryState& st);

}  // namespace commex
