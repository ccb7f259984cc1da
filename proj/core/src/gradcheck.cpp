#include "commex/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "commex/rng.hpp"

namespace commex {

GradCheckInstance random_gradcheck_instance(std::uint64_t seed, double eta,
                                            const GradCheckShape& shape) {
  Rng rng = make_rng(seed, Stream::kSynthetic);
  std::uniform_int_distribution<std::size_t> pick_n(2, shape.max_nodes);
  std::uniform_int_distribution<std::size_t> pick_d(1, shape.max_dim);
  const std::size_t n = pick_n(rng);
  const std::size_t d = pick_d(rng);

  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (uniform01(rng) < 0.5) edges.push_back({u, v});
    }
  }
  std::vector<std::vector<std::uint32_t>> rows(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t k = 0; k < d; ++k) {
      if (uniform01(rng) < 0.5) rows[u].push_back(static_cast<std::uint32_t>(k));
    }
  }

  GradCheckInstance inst;
  inst.graph = ObservedNetwork(n, edges);
  inst.features = NodeFeatures::from_indices(d, std::move(rows));
  inst.params = init_params(d, shape.hidden, shape.communities, seed);
  // Larger weights keep affiliations away from the dot-product clamp.
  inst.params.w1 *= 2.0;
  inst.params.w2 *= 2.0;
  inst.eta = eta;
  return inst;
}

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport gradient_check(const GradCheckInstance& inst, double step) {
  const NormalizedAdjacency adj = normalize_adjacency(inst.graph);
  const Gradients analytic = loss_gradients(inst.params, inst.graph, inst.features, inst.eta);

  auto eval = [&](const ModelParams& p) {
    return loss(gcn_forward(adj, inst.features, p), p.w_attr, inst.graph, inst.features, inst.eta)
        .total;
  };

  GradCheckReport report;
  ModelParams probe = inst.params;
  auto check = [&](Matrix ModelParams::*member, const Matrix& grad, const char* name) {
    Matrix& theta = probe.*member;
    for (Eigen::Index i = 0; i < theta.rows(); ++i) {
      for (Eigen::Index j = 0; j < theta.cols(); ++j) {
        const double saved = theta(i, j);
        theta(i, j) = saved + step;
        const double up = eval(probe);
        theta(i, j) = saved - step;
        const double down = eval(probe);
        theta(i, j) = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double rel = relative_error(grad(i, j), numeric);
        report.max_absolute_error =
            std::max(report.max_absolute_error, std::abs(grad(i, j) - numeric));
        ++report.entries_checked;
        if (rel > report.max_relative_error || report.worst_entry.empty()) {
          report.max_relative_error = std::max(report.max_relative_error, rel);
          report.worst_entry =
              std::string(name) + "(" + std::to_string(i) + "," + std::to_string(j) + ")";
        }
      }
    }
  };
  check(&ModelParams::w1, analytic.w1, "w1");
  check(&ModelParams::w2, analytic.w2, "w2");
  check(&ModelParams::w_attr, analytic.w_attr, "w_attr");
  return report;
}

}  // namespace commex
