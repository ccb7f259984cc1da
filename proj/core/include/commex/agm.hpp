#pragma once

#include <vector>

#include "commex/graph.hpp"
#include "commex/rng.hpp"
#include "commex/tensor.hpp"

namespace commex {

/// AGM link probability 1 - exp(-dot) for a non-negative affiliation dot
/// product.
double agm_edge_probability(double dot);

enum class AgmMode {
  kSample,     // include each pair independently with its AGM probability
  kThreshold,  // include a pair iff its AGM probability is >= 0.5
};

/// Visits pairs (u, v), u < v, in lexicographic order. In sampling mode one
/// uniform draw is consumed per pair, including pairs with probability 0, so
/// the stream position depends only on the node count.
std::vector<Edge> sample_agm_edges(const Matrix& affiliations, Rng& rng,
                                   AgmMode mode = AgmMode::kSample);

}  // namespace commex
