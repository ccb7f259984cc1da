#pragma once

#include <cstddef>
#include <optional>

#include "commex/embed.hpp"
#include "commex/graph.hpp"

namespace commex {

/// Background edge probability threshold sqrt(-log(1 - eps)) with
/// eps = 2|E| / (N (N - 1)).
double affiliation_threshold(std::size_t n_nodes, std::size_t n_edges);

/// Node u joins community c iff F_uc >= delta and F_uc > 0; a node that joins
/// nothing falls back to argmax_c F_uc (lowest index on ties). Empty
/// communities are dropped and counted in `dropped_empty`.
CommunityCover cover_from_affiliations(const AffiliationMatrix& f, const ObservedNetwork& g,
                                       std::optional<double> delta = std::nullopt);

/// Overlapping NMI of Lancichinetti, Fortunato and Kertesz over a universe of
/// `n_nodes` nodes. Symmetric, in [0, 1]; 1 for two empty covers and 0 when
/// exactly one cover is empty.
double overlapping_nmi(const CommunityCover& a, const CommunityCover& b, std::size_t n_nodes);

/// Mean of the two directed best-match averages of pairwise F1.
double best_match_f1(const CommunityCover& a, const CommunityCover& b);

/// Nodes that were queried or touch a revealed edge.
std::size_t explored_count(const ObservedNetwork& g);

struct EvalOptions {
  std::optional<double> delta;
  /// Restrict scoring to nodes in at least one ground-truth community.
  bool covered_only = false;
};

struct EvalReport {
  double nmi = 0.0;
  double f1 = 0.0;
  std::size_t n_detected = 0;
  std::size_t n_explored = 0;
};

EvalReport evaluate(const AffiliationMatrix& f, const ObservedNetwork& g,
                    const CommunityCover& truth, const EvalOptions& options = {});

}  // namespace commex
