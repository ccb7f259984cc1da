#include "commex/init.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "commex/errors.hpp"
#include "commex/rng.hpp"

namespace commex {

std::size_t BitMatrix::row_count(std::size_t r) const {
  std::size_t n = 0;
  for (std::size_t c = 0; c < cols_; ++c) n += (*this)(r, c);
  return n;
}

std::size_t BitMatrix::col_count(std::size_t c) const {
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows_; ++r) n += (*this)(r, c);
  return n;
}

Matrix BitMatrix::to_matrix() const {
  Matrix m(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (*this)(r, c);
    }
  }
  return m;
}

namespace {

using Word = std::uint64_t;

/// Feature rows packed into 64-bit words.
class PackedRows {
 public:
  PackedRows(std::size_t rows, std::size_t dim)
      : words_((dim + 63) / 64), dim_(dim), data_(rows * words_, 0) {}

  std::size_t words() const { return words_; }
  std::size_t dim() const { return dim_; }
  Word* row(std::size_t r) { return data_.data() + r * words_; }
  const Word* row(std::size_t r) const { return data_.data() + r * words_; }
  void set(std::size_t r, std::size_t d) { row(r)[d / 64] |= Word{1} << (d % 64); }
  bool get(std::size_t r, std::size_t d) const { return (row(r)[d / 64] >> (d % 64)) & 1U; }

 private:
  std::size_t words_;
  std::size_t dim_;
  std::vector<Word> data_;
};

std::size_t hamming(const Word* a, const Word* b, std::size_t words) {
  std::size_t n = 0;
  for (std::size_t w = 0; w < words; ++w) n += static_cast<std::size_t>(std::popcount(a[w] ^ b[w]));
  return n;
}

struct State {
  std::vector<std::vector<std::size_t>> member_of;  // per node, ascending
  PackedRows prototypes;
};

class MacSolver {
 public:
  MacSolver(const NodeFeatures& x, std::size_t c, const MacOptions& options)
      : n_(x.n_nodes()), c_(c), options_(options), x_(x.n_nodes(), x.dim()) {
    for (std::size_t u = 0; u < n_; ++u) {
      for (auto d : x.row(u)) x_.set(u, d);
    }
  }

  MacResult solve(Rng& rng) {
    MacResult best;
    bool have_best = false;
    const std::size_t restarts = std::max<std::size_t>(1, options_.restarts);
    for (std::size_t r = 0; r < restarts; ++r) {
      State st = seed(rng);
      std::size_t iters = 0;
      bool converged = alternate(st, /*multi=*/false, iters);
      converged = alternate(st, /*multi=*/true, iters) && converged;
      repair_empty(st);
      MacResult res = to_result(st);
      res.iterations = iters;
      res.converged = converged;
      if (!have_best || res.error < best.error) {
        best = std::move(res);
        have_best = true;
      }
    }
    return best;
  }

 private:
  std::size_t words() const { return x_.words(); }

  State seed(Rng& rng) {
    State st{std::vector<std::vector<std::size_t>>(n_), PackedRows(c_, x_.dim())};
    std::vector<std::size_t> centers;
    std::vector<double> dist2(n_, std::numeric_limits<double>::infinity());
    std::vector<bool> chosen(n_, false);
    for (std::size_t k = 0; k < c_; ++k) {
      std::size_t pick = 0;
      if (k == 0) {
        pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n_));
      } else {
        double total = 0.0;
        for (std::size_t u = 0; u < n_; ++u) total += dist2[u];
        if (total > 0.0) {
          double target = uniform01(rng) * total;
          pick = n_ - 1;
          for (std::size_t u = 0; u < n_; ++u) {
            if (dist2[u] <= 0.0) continue;
            if (target < dist2[u]) {
              pick = u;
              break;
            }
            target -= dist2[u];
          }
        } else {
          // All rows coincide with a center: fall back to an unused row.
          std::vector<std::size_t> unused;
          for (std::size_t u = 0; u < n_; ++u) {
            if (!chosen[u]) unused.push_back(u);
          }
          pick = unused[static_cast<std::size_t>(uniform01(rng) *
                                                 static_cast<double>(unused.size()))];
        }
      }
      pick = std::min(pick, n_ - 1);
      chosen[pick] = true;
      std::copy_n(x_.row(pick), words(), st.prototypes.row(k));
      for (std::size_t u = 0; u < n_; ++u) {
        const double d = static_cast<double>(hamming(x_.row(u), x_.row(pick), words()));
        dist2[u] = std::min(dist2[u], d * d);
      }
    }
    return st;
  }

  std::size_t row_error(std::size_t u, const std::vector<std::size_t>& comms,
                        const PackedRows& protos, std::vector<Word>& scratch) const {
    std::fill(scratch.begin(), scratch.end(), Word{0});
    for (auto k : comms) {
      const Word* p = protos.row(k);
      for (std::size_t w = 0; w < words(); ++w) scratch[w] |= p[w];
    }
    return hamming(x_.row(u), scratch.data(), words());
  }

  /// Best single community, then greedy strict-improvement additions.
  std::vector<std::size_t> assign_node(std::size_t u, const PackedRows& protos,
                                       bool multi) const {
    const Word* xu = x_.row(u);
    std::size_t best_k = 0;
    std::size_t best_err = std::numeric_limits<std::size_t>::max();
    for (std::size_t k = 0; k < c_; ++k) {
      const std::size_t e = hamming(xu, protos.row(k), words());
      if (e < best_err) {
        best_err = e;
        best_k = k;
      }
    }
    std::vector<std::size_t> comms{best_k};
    if (!multi) return comms;

    std::vector<Word> recon(protos.row(best_k), protos.row(best_k) + words());
    std::vector<bool> in(c_, false);
    in[best_k] = true;
    std::vector<Word> trial(words());
    while (true) {
      std::size_t add = c_;
      std::size_t add_err = best_err;
      for (std::size_t k = 0; k < c_; ++k) {
        if (in[k]) continue;
        const Word* p = protos.row(k);
        for (std::size_t w = 0; w < words(); ++w) trial[w] = recon[w] | p[w];
        const std::size_t e = hamming(xu, trial.data(), words());
        if (e < add_err) {
          add_err = e;
          add = k;
        }
      }
      if (add == c_) break;
      in[add] = true;
      const Word* p = protos.row(add);
      for (std::size_t w = 0; w < words(); ++w) recon[w] |= p[w];
      best_err = add_err;
    }
    comms.clear();
    for (std::size_t k = 0; k < c_; ++k) {
      if (in[k]) comms.push_back(k);
    }
    return comms;
  }

  /// Coordinate update of each prototype given all others; returns whether
  /// any bit changed.
  bool update_prototypes(State& st) const {
    bool changed = false;
    std::vector<std::vector<std::size_t>> members(c_);
    for (std::size_t u = 0; u < n_; ++u) {
      for (auto k : st.member_of[u]) members[k].push_back(u);
    }
    const std::size_t dim = x_.dim();
    std::vector<std::size_t> err_if_one(dim);
    std::vector<std::size_t> err_if_zero(dim);
    std::vector<Word> others(words());
    for (std::size_t k = 0; k < c_; ++k) {
      if (members[k].empty()) continue;
      std::fill(err_if_one.begin(), err_if_one.end(), 0);
      std::fill(err_if_zero.begin(), err_if_zero.end(), 0);
      for (auto u : members[k]) {
        std::fill(others.begin(), others.end(), Word{0});
        for (auto j : st.member_of[u]) {
          if (j == k) continue;
          const Word* p = st.prototypes.row(j);
          for (std::size_t w = 0; w < words(); ++w) others[w] |= p[w];
        }
        const Word* xu = x_.row(u);
        for (std::size_t w = 0; w < words(); ++w) {
          Word free_bits = ~others[w];
          if (w == words() - 1 && dim % 64 != 0) free_bits &= (Word{1} << (dim % 64)) - 1;
          Word ones = xu[w] & free_bits;
          Word zeros = ~xu[w] & free_bits;
          while (ones) {
            ++err_if_zero[w * 64 + static_cast<std::size_t>(std::countr_zero(ones))];
            ones &= ones - 1;
          }
          while (zeros) {
            ++err_if_one[w * 64 + static_cast<std::size_t>(std::countr_zero(zeros))];
            zeros &= zeros - 1;
          }
        }
      }
      Word* proto = st.prototypes.row(k);
      for (std::size_t d = 0; d < dim; ++d) {
        const bool want = err_if_one[d] < err_if_zero[d];
        const bool have = (proto[d / 64] >> (d % 64)) & 1U;
        if (want != have) {
          proto[d / 64] ^= Word{1} << (d % 64);
          changed = true;
        }
      }
    }
    return changed;
  }

  /// Re-seeds empty communities from the worst-reconstructed rows. Prototype
  /// rows of empty communities do not contribute to the error, so this never
  /// increases it.
  void reseed_empty(State& st, std::size_t& reseeds) const {
    std::vector<std::size_t> sizes(c_, 0);
    for (const auto& comms : st.member_of) {
      for (auto k : comms) ++sizes[k];
    }
    std::vector<Word> scratch(words());
    std::vector<bool> used(n_, false);
    for (std::size_t k = 0; k < c_; ++k) {
      if (sizes[k] > 0 || reseeds >= options_.reseed_cap) continue;
      std::size_t worst = n_;
      std::size_t worst_err = 0;
      for (std::size_t u = 0; u < n_; ++u) {
        if (used[u]) continue;
        const std::size_t e = row_error(u, st.member_of[u], st.prototypes, scratch);
        if (worst == n_ || e > worst_err) {
          worst = u;
          worst_err = e;
        }
      }
      if (worst == n_) break;
      used[worst] = true;
      std::copy_n(x_.row(worst), words(), st.prototypes.row(k));
      ++reseeds;
    }
  }

  bool alternate(State& st, bool multi, std::size_t& iters) const {
    std::size_t reseeds = 0;
    bool first = true;
    for (std::size_t it = 0; it < options_.max_iters; ++it) {
      ++iters;
      bool assign_changed = false;
      for (std::size_t u = 0; u < n_; ++u) {
        auto comms = assign_node(u, st.prototypes, multi);
        if (comms != st.member_of[u]) {
          // Keep the incumbent when the candidate is not strictly better, so
          // that error never increases and ties cannot cycle.
          std::vector<Word> scratch(words());
          const std::size_t old_err =
              st.member_of[u].empty()
                  ? std::numeric_limits<std::size_t>::max()
                  : row_error(u, st.member_of[u], st.prototypes, scratch);
          const std::size_t new_err = row_error(u, comms, st.prototypes, scratch);
          if (new_err < old_err) {
            st.member_of[u] = std::move(comms);
            assign_changed = true;
          }
        }
      }
      const bool proto_changed = update_prototypes(st);
      const std::size_t before = reseeds;
      reseed_empty(st, reseeds);
      const bool reseeded = reseeds != before;
      if (!assign_changed && !proto_changed && !reseeded && !first) return true;
      first = false;
    }
    return false;
  }

  /// Gives every empty community a member without raising the error. Picks a
  /// node all of whose communities have another member (one always exists
  /// when N >= C and a community is empty), moves it alone into the empty
  /// community and copies its row into that prototype, making its row error 0.
  void repair_empty(State& st) const {
    std::vector<Word> scratch(words());
    for (std::size_t k = 0; k < c_; ++k) {
      std::vector<std::size_t> sizes(c_, 0);
      for (const auto& comms : st.member_of) {
        for (auto j : comms) ++sizes[j];
      }
      if (sizes[k] > 0) continue;
      std::size_t pick = n_;
      std::size_t pick_err = 0;
      for (std::size_t u = 0; u < n_; ++u) {
        const auto& comms = st.member_of[u];
        const bool movable = std::all_of(comms.begin(), comms.end(),
                                         [&](std::size_t j) { return sizes[j] >= 2; });
        if (!movable) continue;
        const std::size_t e = row_error(u, comms, st.prototypes, scratch);
        if (pick == n_ || e > pick_err) {
          pick = u;
          pick_err = e;
        }
      }
      if (pick == n_) throw DegenerateInput("cannot populate every community");
      st.member_of[pick] = {k};
      std::copy_n(x_.row(pick), words(), st.prototypes.row(k));
    }
  }

  MacResult to_result(const State& st) const {
    MacResult res;
    res.assignment = BitMatrix(n_, c_);
    res.prototypes = BitMatrix(c_, x_.dim());
    for (std::size_t u = 0; u < n_; ++u) {
      for (auto k : st.member_of[u]) res.assignment(u, k) = 1;
    }
    for (std::size_t k = 0; k < c_; ++k) {
      for (std::size_t d = 0; d < x_.dim(); ++d) {
        res.prototypes(k, d) = st.prototypes.get(k, d) ? 1 : 0;
      }
    }
    std::vector<Word> scratch(words());
    for (std::size_t u = 0; u < n_; ++u) {
      res.error += row_error(u, st.member_of[u], st.prototypes, scratch);
    }
    return res;
  }

  std::size_t n_;
  std::size_t c_;
  MacOptions options_;
  PackedRows x_;
};

}  // namespace

std::size_t boolean_reconstruction_error(const NodeFeatures& x,
                                         const BitMatrix& assignment,
                                         const BitMatrix& prototypes) {
  if (assignment.rows() != x.n_nodes() || prototypes.cols() != x.dim() ||
      assignment.cols() != prototypes.rows()) {
    throw ShapeMismatch("Boolean factor shapes do not match features");
  }
  std::size_t err = 0;
  for (std::size_t u = 0; u < x.n_nodes(); ++u) {
    for (std::size_t d = 0; d < x.dim(); ++d) {
      bool recon = false;
      for (std::size_t k = 0; k < assignment.cols() && !recon; ++k) {
        recon = assignment(u, k) && prototypes(k, d);
      }
      err += recon != x.at(u, d);
    }
  }
  return err;
}

MacResult mac_cluster(const NodeFeatures& x, std::size_t c, std::uint64_t seed,
                      const MacOptions& options) {
  if (c == 0) throw DegenerateInput("community count must be >= 1");
  if (x.n_nodes() < c) {
    throw DegenerateInput("need at least as many nodes (" + std::to_string(x.n_nodes()) +
                          ") as communities (" + std::to_string(c) + ")");
  }
  Rng rng = make_rng(seed, Stream::kMacSeeding);
  MacSolver solver(x, c, options);
  return solver.solve(rng);
}

std::vector<Edge> agm_infer(const BitMatrix& f0, std::uint64_t seed, AgmMode mode) {
  Rng rng = make_rng(seed, Stream::kAgmInference);
  return sample_agm_edges(f0.to_matrix(), rng, mode);
}

ObservedNetwork f_init(const NodeFeatures& x, std::size_t c, std::uint64_t seed,
                       const MacOptions& options, AgmMode mode) {
  if (x.n_nodes() <= 1) return ObservedNetwork(x.n_nodes());
  const MacResult mac = mac_cluster(x, c, seed, options);
  const auto edges = agm_infer(mac.assignment, seed, mode);
  return ObservedNetwork(x.n_nodes(), edges);
}

ObservedNetwork knn_init(const NodeFeatures& x, std::size_t k) {
  const std::size_t n = x.n_nodes();
  if (k < 1 || k >= n) {
    throw PreconditionError("knn_init needs 1 <= k < N (k=" + std::to_string(k) +
                            ", N=" + std::to_string(n) + ")");
  }
  std::vector<NodeId> nonzero;
  for (std::size_t u = 0; u < n; ++u) {
    if (!x.row(u).empty()) nonzero.push_back(static_cast<NodeId>(u));
  }

  auto cosine = [&](NodeId a, NodeId b) {
    const auto ra = x.row(a);
    const auto rb = x.row(b);
    std::size_t common = 0;
    auto ia = ra.begin();
    auto ib = rb.begin();
    while (ia != ra.end() && ib != rb.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        ++common;
        ++ia;
        ++ib;
      }
    }
    return static_cast<double>(common) /
           std::sqrt(static_cast<double>(ra.size()) * static_cast<double>(rb.size()));
  };

  std::set<Edge> edges;
  std::vector<std::pair<double, NodeId>> cand;
  for (NodeId u : nonzero) {
    cand.clear();
    for (NodeId v : nonzero) {
      if (v != u) cand.emplace_back(-cosine(u, v), v);
    }
    const std::size_t take = std::min(k, cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take),
                      cand.end());
    for (std::size_t i = 0; i < take; ++i) edges.insert(make_edge(u, cand[i].second));
  }
  const std::vector<Edge> edge_vec(edges.begin(), edges.end());
  return ObservedNetwork(n, edge_vec);
}

}  // namespace commex
