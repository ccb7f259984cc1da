#include "commex/agm.hpp"

#include <cmath>

#include "commex/errors.hpp"

namespace commex {

double agm_edge_probability(double dot) { return -std::expm1(-dot); }

std::vector<Edge> sample_agm_edges(const Matrix& affiliations, Rng& rng,
                                   AgmMode mode) {
  if ((affiliations.array() < 0.0).any()) {
    throw PreconditionError("AGM affiliations must be non-negative");
  }
  const auto n = static_cast<NodeId>(affiliations.rows());
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      const double dot = affiliations.row(u).dot(affiliations.row(v));
      const double p = agm_edge_probability(dot);
      const bool keep = mode == AgmMode::kSample ? uniform01(rng) < p : p >= 0.5;
      if (keep) edges.push_back({u, v});
    }
  }
  return edges;
}

}  // namespace commex
