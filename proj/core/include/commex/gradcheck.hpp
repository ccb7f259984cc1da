#pragma once

#include <cstdint>
#include <string>

#include "commex/dataset.hpp"
#include "commex/embed.hpp"
#include "commex/graph.hpp"

namespace commex {

struct GradCheckInstance {
  ObservedNetwork graph;
  NodeFeatures features;
  ModelParams params;
  double eta = 1.0;
};

struct GradCheckShape {
  std::size_t max_nodes = 6;
  std::size_t max_dim = 4;
  std::size_t communities = 2;
  std::size_t hidden = 3;
};

/// Random small instance: node count in [2, max_nodes], feature dim in
/// [1, max_dim], edges and feature bits with probability 1/2.
GradCheckInstance random_gradcheck_instance(std::uint64_t seed, double eta,
                                            const GradCheckShape& shape = {});

/// |a - b| / max(|a|, |b|, floor). The floor keeps entries whose true value
/// is zero (dead rectifier paths) from dividing finite-difference noise by 0.
double relative_error(double analytic, double numeric, double floor = 1e-3);

struct GradCheckReport {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::string worst_entry;
  std::size_t entries_checked = 0;
};

/// Compares loss_gradients against central finite differences of
/// loss(gcn_forward(.)) over every entry of w1, w2 and w_attr.
GradCheckReport gradient_check(const GradCheckInstance& instance, double step = 1e-5);

}  // namespace commex
