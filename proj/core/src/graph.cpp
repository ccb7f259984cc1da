#include "commex/graph.hpp"

#include <algorithm>
#include <string>

#include "commex/errors.hpp"

namespace commex {

Edge make_edge(NodeId a, NodeId b) {
  if (a == b) {
    throw InvariantViolation("self-loop on node " + std::to_string(a));
  }
  return a < b ? Edge{a, b} : Edge{b, a};
}

void normalize(CommunityCover& cover) {
  for (auto& members : cover.communities) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
  }
}

HiddenNetwork::HiddenNetwork(std::size_t n_nodes, std::span<const Edge> edges,
                             CommunityCover truth)
    : adjacency_(n_nodes), truth_(std::move(truth)) {
  for (const Edge& e : edges) {
    if (e.lo >= e.hi) throw InvariantViolation("edge is not normalized");
    if (e.hi >= n_nodes) throw UnknownNode(e.hi, n_nodes);
    adjacency_[e.lo].push_back(e.hi);
    adjacency_[e.hi].push_back(e.lo);
  }
  for (auto& nbrs : adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    n_edges_ += nbrs.size();
  }
  n_edges_ /= 2;
  normalize(truth_);
  for (const auto& members : truth_.communities) {
    for (NodeId u : members) {
      if (u >= n_nodes) throw UnknownNode(u, n_nodes);
    }
  }
}

std::span<const NodeId> HiddenNetwork::neighbors(NodeId u) const {
  if (u >= adjacency_.size()) throw UnknownNode(u, adjacency_.size());
  return adjacency_[u];
}

bool HiddenNetwork::has_edge(NodeId a, NodeId b) const {
  if (a >= adjacency_.size() || b >= adjacency_.size()) return false;
  return std::binary_search(adjacency_[a].begin(), adjacency_[a].end(), b);
}

std::vector<Edge> HiddenNetwork::edges() const {
  std::vector<Edge> out;
  out.reserve(n_edges_);
  for (NodeId u = 0; u < adjacency_.size(); ++u) {
    for (NodeId v : adjacency_[u]) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

QueryOracle::QueryOracle(const HiddenNetwork& hidden, std::size_t budget)
    : hidden_(&hidden), budget_(budget), queried_mask_(hidden.n_nodes()) {
  if (budget > hidden.n_nodes()) {
    throw PreconditionError("budget " + std::to_string(budget) + " exceeds node count " +
                            std::to_string(hidden.n_nodes()));
  }
}

std::vector<NodeId> QueryOracle::query(NodeId u) {
  if (u >= hidden_->n_nodes()) throw UnknownNode(u, hidden_->n_nodes());
  if (queried_mask_[u]) throw DuplicateQuery(u);
  if (queried_.size() >= budget_) throw BudgetExhausted(budget_);
  queried_mask_[u] = true;
  queried_.push_back(u);
  auto nbrs = hidden_->neighbors(u);
  return {nbrs.begin(), nbrs.end()};
}

bool QueryOracle::was_queried(NodeId u) const {
  return u < queried_mask_.size() && queried_mask_[u];
}

ObservedNetwork::ObservedNetwork(std::size_t n_nodes)
    : n_nodes_(n_nodes), inferred_adj_(n_nodes), queried_mask_(n_nodes) {}

ObservedNetwork::ObservedNetwork(std::size_t n_nodes,
                                 std::span<const Edge> inferred)
    : ObservedNetwork(n_nodes) {
  for (const Edge& e : inferred) {
    if (e.lo >= e.hi) throw InvariantViolation("edge is not normalized");
    check_node(e.hi);
    inferred_.insert(e);
    inferred_adj_[e.lo].insert(e.hi);
    inferred_adj_[e.hi].insert(e.lo);
  }
}

ObservedNetwork ObservedNetwork::from_parts(std::size_t n_nodes,
                                            std::span<const Edge> revealed,
                                            std::span<const Edge> inferred,
                                            std::span<const NodeId> queried) {
  ObservedNetwork g(n_nodes, inferred);
  for (NodeId u : queried) {
    g.check_node(u);
    if (g.queried_mask_[u]) throw DuplicateQuery(u);
    g.queried_mask_[u] = true;
    g.queried_order_.push_back(u);
  }
  for (const Edge& e : revealed) {
    if (e.lo >= e.hi) throw InvariantViolation("edge is not normalized");
    g.check_node(e.hi);
    if (g.inferred_.contains(e)) {
      throw InvariantViolation("edge (" + std::to_string(e.lo) + "," +
                               std::to_string(e.hi) +
                               ") is both revealed and inferred");
    }
    if (!g.queried_mask_[e.lo] && !g.queried_mask_[e.hi]) {
      throw InvariantViolation("revealed edge touches no queried node");
    }
    g.revealed_.insert(e);
  }
  for (NodeId u : queried) {
    if (!g.inferred_adj_[u].empty()) {
      throw InvariantViolation("inferred edge touches queried node " +
                               std::to_string(u));
    }
  }
  return g;
}

void ObservedNetwork::check_node(NodeId u) const {
  if (u >= n_nodes_) throw UnknownNode(u, n_nodes_);
}

void ObservedNetwork::apply_query(NodeId u,
                                  std::span<const NodeId> neighbors) {
  check_node(u);
  for (NodeId v : neighbors) check_node(v);
  if (queried_mask_[u]) throw DuplicateQuery(u);

  for (NodeId v : inferred_adj_[u]) {
    inferred_.erase(make_edge(u, v));
    inferred_adj_[v].erase(u);
  }
  inferred_adj_[u].clear();

  for (NodeId v : neighbors) {
    revealed_.insert(make_edge(u, v));
  }
  queried_mask_[u] = true;
  queried_order_.push_back(u);
}

bool ObservedNetwork::is_queried(NodeId u) const {
  return u < n_nodes_ && queried_mask_[u];
}

bool ObservedNetwork::has_edge(NodeId a, NodeId b) const {
  if (a == b || a >= n_nodes_ || b >= n_nodes_) return false;
  const Edge e = make_edge(a, b);
  return revealed_.contains(e) || inferred_.contains(e);
}

std::vector<Edge> ObservedNetwork::edge_list() const {
  std::vector<Edge> out;
  out.reserve(n_edges());
  std::merge(revealed_.begin(), revealed_.end(), inferred_.begin(),
             inferred_.end(), std::back_inserter(out));
  return out;
}

ObservedNetwork observed_update(ObservedNetwork g, NodeId u,
                                std::span<const NodeId> neighbors) {
  g.apply_query(u, neighbors);
  return g;
}

}  // namespace commex
