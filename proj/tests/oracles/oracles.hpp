#pragma once

// Slow, direct reference implementations used only by tests. None of these
// call into the library code they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Cover = std::vector<std::vector<std::uint32_t>>;

// ---------------------------------------------------------------------------
// LFK overlapping NMI, per-node formulation.
//
// Each community becomes an indicator over nodes 0..n-1 and every joint count
// is obtained by walking all nodes. Natural logs (the normalization makes the
// base irrelevant).

namespace detail {

inline std::vector<std::vector<bool>> indicators(const Cover& c, std::size_t n) {
  std::vector<std::vector<bool>> out;
  for (const auto& members : c) {
    std::vector<bool> row(n, false);
    for (auto u : members) row[u] = true;
    out.push_back(std::move(row));
  }
  return out;
}

inline double eta(double p) { return p <= 0.0 ? 0.0 : -p * std::log(p); }

// H(X_k | Y)_norm for one indicator of X.
inline double h_norm_one(const std::vector<bool>& xk, const std::vector<std::vector<bool>>& ys,
                         std::size_t n) {
  const double nn = static_cast<double>(n);
  double cx = 0;
  for (bool b : xk) cx += b;
  const double hx = eta(cx / nn) + eta((nn - cx) / nn);
  if (hx == 0.0) {
    for (const auto& yl : ys) {
      if (yl == xk) return 0.0;
    }
    return 1.0;
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& yl : ys) {
    double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
    for (std::size_t u = 0; u < n; ++u) {
      if (xk[u] && yl[u]) ++n11;
      else if (xk[u]) ++n10;
      else if (yl[u]) ++n01;
      else ++n00;
    }
    const double a = eta(n11 / nn), b = eta(n10 / nn), c = eta(n01 / nn), d = eta(n00 / nn);
    // LFK admissibility: the pair must carry more agreement than
    // disagreement information.
    if (a + d < b + c) continue;
    const double hy = eta((n11 + n01) / nn) + eta((n10 + n00) / nn);
    best = std::min(best, a + b + c + d - hy);
  }
  if (best == std::numeric_limits<double>::infinity()) best = hx;
  return best / hx;
}

inline double h_norm(const Cover& x, const Cover& y, std::size_t n) {
  const auto xs = indicators(x, n);
  const auto ys = indicators(y, n);
  double s = 0;
  for (const auto& xk : xs) s += h_norm_one(xk, ys, n);
  return s / static_cast<double>(xs.size());
}

}  // namespace detail

inline double lfk_nmi(const Cover& a, const Cover& b, std::size_t n) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const double v = 1.0 - 0.5 * (detail::h_norm(a, b, n) + detail::h_norm(b, a, n));
  return std::clamp(v, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Best-match F1 by exhaustive double loop over std::set intersections.

inline double pair_f1(const std::vector<std::uint32_t>& x, const std::vector<std::uint32_t>& y) {
  const std::set<std::uint32_t> sx(x.begin(), x.end());
  std::size_t inter = 0;
  for (auto v : std::set<std::uint32_t>(y.begin(), y.end())) inter += sx.count(v);
  if (inter == 0) return 0.0;
  // 2PR / (P + R) with P = i/|x|, R = i/|y|, simplified so the value is
  // reproducible to the last bit.
  return 2.0 * static_cast<double>(inter) / static_cast<double>(x.size() + y.size());
}

inline double best_match_f1(const Cover& a, const Cover& b) {
  if (a.empty() || b.empty()) return 0.0;
  double sa = 0;
  for (const auto& x : a) {
    double best = 0;
    for (const auto& y : b) best = std::max(best, pair_f1(x, y));
    sa += best;
  }
  double sb = 0;
  for (const auto& y : b) {
    double best = 0;
    for (const auto& x : a) best = std::max(best, pair_f1(y, x));
    sb += best;
  }
  return 0.5 * (sa / static_cast<double>(a.size()) + sb / static_cast<double>(b.size()));
}

// ---------------------------------------------------------------------------
// Non-edge term: sum over u < v with {u, v} not an edge of F_u . F_v.

template <typename Mat>
double non_edge_naive(const Mat& f, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> e;
  for (auto [a, b] : edges) e.insert({std::min(a, b), std::max(a, b)});
  double s = 0;
  const auto n = static_cast<std::uint32_t>(f.rows());
  for (std::uint32_t u = 0; u < n; ++u) {
    for (std::uint32_t v = u + 1; v < n; ++v) {
      if (e.count({u, v})) continue;
      double dot = 0;
      for (int c = 0; c < static_cast<int>(f.cols()); ++c) dot += f(u, c) * f(v, c);
      s += dot;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Boolean factorization by exhaustive search.

using Bits = std::vector<std::vector<int>>;

inline std::size_t boolean_error(const Bits& x, const Bits& assign, const Bits& proto) {
  std::size_t err = 0;
  for (std::size_t u = 0; u < x.size(); ++u) {
    for (std::size_t d = 0; d < x[u].size(); ++d) {
      int r = 0;
      for (std::size_t c = 0; c < proto.size(); ++c) r |= assign[u][c] & proto[c][d];
      err += r != x[u][d];
    }
  }
  return err;
}

inline Bits unpack(std::uint64_t code, std::size_t rows, std::size_t cols) {
  Bits b(rows, std::vector<int>(cols, 0));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) b[r][c] = static_cast<int>((code >> (r * cols + c)) & 1U);
  }
  return b;
}

struct Factorization {
  Bits assignment;
  Bits prototypes;
  std::size_t error = 0;
};

/// Minimum error over every assignment in which each node joins exactly one
/// of `c` communities, and every prototype matrix.
inline std::size_t best_single_assignment_error(const Bits& x, std::size_t c) {
  const std::size_t n = x.size();
  const std::size_t d = n ? x[0].size() : 0;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::size_t combos = 1;
  for (std::size_t i = 0; i < n; ++i) combos *= c;
  for (std::size_t code = 0; code < combos; ++code) {
    Bits assign(n, std::vector<int>(c, 0));
    std::size_t rest = code;
    for (std::size_t u = 0; u < n; ++u) {
      assign[u][rest % c] = 1;
      rest /= c;
    }
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << (c * d)); ++p) {
      best = std::min(best, boolean_error(x, assign, unpack(p, c, d)));
    }
  }
  return best;
}

/// Every minimum-error (assignment, prototypes) pair over all 2^(N C)
/// assignments and 2^(C D) prototype matrices.
inline std::vector<Factorization> all_optimal_factorizations(const Bits& x, std::size_t c) {
  const std::size_t n = x.size();
  const std::size_t d = n ? x[0].size() : 0;
  std::vector<Factorization> best;
  std::size_t best_err = std::numeric_limits<std::size_t>::max();
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << (n * c)); ++a) {
    const Bits assign = unpack(a, n, c);
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << (c * d)); ++p) {
      Bits proto = unpack(p, c, d);
      const std::size_t e = boolean_error(x, assign, proto);
      if (e < best_err) {
        best_err = e;
        best.clear();
      }
      if (e == best_err) best.push_back({assign, std::move(proto), e});
    }
  }
  return best;
}

}  // namespace oracle
