#include "commex/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace commex {

double affiliation_threshold(std::size_t n_nodes, std::size_t n_edges) {
  if (n_nodes < 2) return 0.0;
  const double pairs = static_cast<double>(n_nodes) * static_cast<double>(n_nodes - 1);
  const double eps = 2.0 * static_cast<double>(n_edges) / pairs;
  if (eps >= 1.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(-std::log1p(-eps));
}

CommunityCover cover_from_affiliations(const AffiliationMatrix& f, const ObservedNetwork& g,
                                       std::optional<double> delta) {
  const double threshold = delta ? *delta : affiliation_threshold(g.n_nodes(), g.n_edges());
  const Matrix& m = f.values;
  CommunityCover cover;
  cover.communities.resize(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index u = 0; u < m.rows(); ++u) {
    bool placed = false;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (m(u, c) > 0.0 && m(u, c) >= threshold) {
        cover.communities[static_cast<std::size_t>(c)].push_back(static_cast<NodeId>(u));
        placed = true;
      }
    }
    if (!placed && m.cols() > 0) {
      Eigen::Index best = 0;
      for (Eigen::Index c = 1; c < m.cols(); ++c) {
        if (m(u, c) > m(u, best)) best = c;
      }
      cover.communities[static_cast<std::size_t>(best)].push_back(static_cast<NodeId>(u));
    }
  }
  const auto before = cover.communities.size();
  std::erase_if(cover.communities, [](const auto& members) { return members.empty(); });
  cover.dropped_empty = before - cover.communities.size();
  return cover;
}

namespace {

std::size_t intersection_size(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  std::size_t n = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

double h(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

// Both halves come from counts so that identical sets cancel exactly against
// the joint entropy.
double binary_entropy(double count, double n) { return h(count / n) + h((n - count) / n); }

/// Normalized conditional entropy H(X | Y)_norm averaged over X's
/// communities.
double conditional_entropy(const CommunityCover& x, const CommunityCover& y, std::size_t n) {
  const double nn = static_cast<double>(n);
  double total = 0.0;
  for (const auto& xs : x.communities) {
    const double hx = binary_entropy(static_cast<double>(xs.size()), nn);
    if (hx == 0.0) {
      // Empty or universal community: zero entropy, matched only by itself.
      const bool found = std::any_of(y.communities.begin(), y.communities.end(),
                                     [&](const auto& ys) { return ys == xs; });
      total += found ? 0.0 : 1.0;
      continue;
    }
    double best = hx;
    for (const auto& ys : y.communities) {
      const auto inter = static_cast<double>(intersection_size(xs, ys));
      const auto sx = static_cast<double>(xs.size());
      const auto sy = static_cast<double>(ys.size());
      const double p11 = inter / nn;
      const double p10 = (sx - inter) / nn;
      const double p01 = (sy - inter) / nn;
      const double p00 = (nn - sx - sy + inter) / nn;
      if (h(p11) + h(p00) < h(p01) + h(p10)) continue;
      const double joint = h(p11) + h(p10) + h(p01) + h(p00);
      best = std::min(best, joint - binary_entropy(sy, nn));
    }
    total += best / hx;
  }
  return total / static_cast<double>(x.size());
}

}  // namespace

double overlapping_nmi(const CommunityCover& a, const CommunityCover& b, std::size_t n_nodes) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty() || n_nodes == 0) return 0.0;
  const double nmi =
      1.0 - 0.5 * (conditional_entropy(a, b, n_nodes) + conditional_entropy(b, a, n_nodes));
  return std::clamp(nmi, 0.0, 1.0);
}

double best_match_f1(const CommunityCover& a, const CommunityCover& b) {
  if (a.empty() || b.empty()) return 0.0;
  auto pair_f1 = [](const std::vector<NodeId>& x, const std::vector<NodeId>& y) {
    const std::size_t denom = x.size() + y.size();
    if (denom == 0) return 0.0;
    return 2.0 * static_cast<double>(intersection_size(x, y)) / static_cast<double>(denom);
  };
  std::vector<double> best_a(a.size(), 0.0);
  std::vector<double> best_b(b.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double f = pair_f1(a.communities[i], b.communities[j]);
      best_a[i] = std::max(best_a[i], f);
      best_b[j] = std::max(best_b[j], f);
    }
  }
  double mean_a = 0.0;
  for (double v : best_a) mean_a += v;
  double mean_b = 0.0;
  for (double v : best_b) mean_b += v;
  return 0.5 * (mean_a / static_cast<double>(a.size()) + mean_b / static_cast<double>(b.size()));
}

std::size_t explored_count(const ObservedNetwork& g) {
  std::vector<bool> seen(g.n_nodes(), false);
  for (NodeId u : g.queried()) seen[u] = true;
  for (const Edge& e : g.revealed()) {
    seen[e.lo] = true;
    seen[e.hi] = true;
  }
  return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
}

namespace {

CommunityCover restrict_cover(const CommunityCover& cover, const std::vector<NodeId>& new_id) {
  constexpr NodeId kDropped = std::numeric_limits<NodeId>::max();
  CommunityCover out;
  for (const auto& members : cover.communities) {
    std::vector<NodeId> kept;
    for (NodeId u : members) {
      if (new_id[u] != kDropped) kept.push_back(new_id[u]);
    }
    if (!kept.empty()) out.communities.push_back(std::move(kept));
  }
  return out;
}

}  // namespace

EvalReport evaluate(const AffiliationMatrix& f, const ObservedNetwork& g,
                    const CommunityCover& truth, const EvalOptions& options) {
  EvalReport report;
  const CommunityCover detected = cover_from_affiliations(f, g, options.delta);
  report.n_detected = detected.size();
  report.n_explored = explored_count(g);
  if (!options.covered_only) {
    report.nmi = overlapping_nmi(detected, truth, g.n_nodes());
    report.f1 = best_match_f1(detected, truth);
    return report;
  }
  constexpr NodeId kDropped = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> new_id(g.n_nodes(), kDropped);
  for (const auto& members : truth.communities) {
    for (NodeId u : members) new_id[u] = 0;
  }
  NodeId next = 0;
  for (auto& id : new_id) {
    if (id != kDropped) id = next++;
  }
  const CommunityCover d = restrict_cover(detected, new_id);
  const CommunityCover t = restrict_cover(truth, new_id);
  report.nmi = overlapping_nmi(d, t, next);
  report.f1 = best_match_f1(d, t);
  return report;
}

}  // namespace commex
