#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

namespace commex {

using NodeId = std::uint32_t;

/// Unordered node pair stored as (lo, hi) with lo < hi.
struct Edge {
  NodeId lo = 0;
  NodeId hi = 0;

  auto operator<=>(const Edge&) const = default;
};

/// Normalizes {a, b} into an Edge. Throws InvariantViolation on a self-loop.
Edge make_edge(NodeId a, NodeId b);

/// Overlapping assignment of nodes to communities. Member lists are sorted
/// and duplicate-free.
struct CommunityCover {
  std::vector<std::vector<NodeId>> communities;
  /// Number of empty communities dropped while building a detected cover.
  std::size_t dropped_empty = 0;

  std::size_t size() const { return communities.size(); }
  bool empty() const { return communities.empty(); }

  bool operator==(const CommunityCover&) const = default;
};

/// Sorts and deduplicates every member list in place.
void normalize(CommunityCover& cover);

/// The ground-truth graph. Reachable from the exploration loop only through
/// a QueryOracle.
class HiddenNetwork {
 public:
  HiddenNetwork() = default;
  HiddenNetwork(std::size_t n_nodes, std::span<const Edge> edges,
                CommunityCover truth = {});

  std::size_t n_nodes() const { return adjacency_.size(); }
  std::size_t n_edges() const { return n_edges_; }
  std::span<const NodeId> neighbors(NodeId u) const;
  bool has_edge(NodeId a, NodeId b) const;
  /// Sorted list of all edges.
  std::vector<Edge> edges() const;
  const CommunityCover& truth() const { return truth_; }

  bool operator==(const HiddenNetwork&) const = default;

 private:
  std::vector<std::vector<NodeId>> adjacency_;
  std::size_t n_edges_ = 0;
  CommunityCover truth_;
};

class QueryOracle {
 public:
  QueryOracle(const HiddenNetwork& hidden, std::size_t budget);

  /// Reveals the true neighbor set of `u` and consumes one unit of budget.
  std::vector<NodeId> query(NodeId u);

  std::size_t budget() const { return budget_; }
  std::size_t remaining() const { return budget_ - queried_.size(); }
  const std::vector<NodeId>& queried() const { return queried_; }
  bool was_queried(NodeId u) const;

 private:
  const HiddenNetwork* hidden_;
  std::size_t budget_;
  std::vector<NodeId> queried_;
  std::vector<bool> queried_mask_;
};

/// G_t: edges revealed by queries plus edges inferred before exploration.
///
/// Invariants: the two edge sets are disjoint; each revealed edge touches a
/// queried node; no inferred edge touches a queried node.
class ObservedNetwork {
 public:
  ObservedNetwork() = default;
  explicit ObservedNetwork(std::size_t n_nodes);
  ObservedNetwork(std::size_t n_nodes, std::span<const Edge> inferred);

  /// Builds a network from explicit parts, validating every invariant.
  static ObservedNetwork from_parts(std::size_t n_nodes,
                                    std::span<const Edge> revealed,
                                    std::span<const Edge> inferred,
                                    std::span<const NodeId> queried);

  /// Records the query answer for `u`: drops inferred edges at `u` and adds
  /// {u, v} for every v in `neighbors` to the revealed set.
  void apply_query(NodeId u, std::span<const NodeId> neighbors);

  std::size_t n_nodes() const { return n_nodes_; }
  const std::set<Edge>& revealed() const { return revealed_; }
  const std::set<Edge>& inferred() const { return inferred_; }
  bool is_queried(NodeId u) const;
  const std::vector<NodeId>& queried() const { return queried_order_; }

  std::size_t n_edges() const { return revealed_.size() + inferred_.size(); }
  bool has_edge(NodeId a, NodeId b) const;
  /// Sorted union of revealed and inferred edges (the adjacency A_t).
  std::vector<Edge> edge_list() const;

 private:
  void check_node(NodeId u) const;

  std::size_t n_nodes_ = 0;
  std::set<Edge> revealed_;
  std::set<Edge> inferred_;
  std::vector<std::set<NodeId>> inferred_adj_;
  std::vector<bool> queried_mask_;
  std::vector<NodeId> queried_order_;
};

/// Returns a copy of `g` with the query answer applied.
ObservedNetwork observed_update(ObservedNetwork g, NodeId u,
                                std::span<const NodeId> neighbors);

}  // namespace commex
