#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "commex/agm.hpp"
#include "commex/dataset.hpp"
#include "commex/graph.hpp"

namespace commex {

/// Dense row-major 0/1 matrix.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint8_t operator()(std::size_t r, std::size_t c) const { return bits_[r * cols_ + c]; }
  std::uint8_t& operator()(std::size_t r, std::size_t c) { return bits_[r * cols_ + c]; }
  std::size_t row_count(std::size_t r) const;
  std::size_t col_count(std::size_t c) const;
  Matrix to_matrix() const;

  bool operator==(const BitMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct MacOptions {
  std::size_t max_iters = 100;
  /// Independent k-means++ seedings; the lowest-error solution wins.
  std::size_t restarts = 8;
  /// Cap on prototype re-seeds for communities that empty out.
  std::size_t reseed_cap = 16;
};

/// Multi-assignment clustering output. `assignment` is the N x C binary
/// InitialAffiliation; `prototypes` is the C x D binary basis.
struct MacResult {
  BitMatrix assignment;
  BitMatrix prototypes;
  /// Hamming distance between X and the Boolean product of the factors.
  std::size_t error = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Hamming error of the Boolean product assignment o prototypes against `x`.
std::size_t boolean_reconstruction_error(const NodeFeatures& x,
                                         const BitMatrix& assignment,
                                         const BitMatrix& prototypes);

/// Multi-assignment clustering of binary metadata by Boolean matrix
/// factorization.
///
/// Each restart seeds C prototypes from feature rows (k-means++ with squared
/// Hamming distance), runs single-assignment alternation to a fixed point,
/// and then alternates:
///   - per node (ascending id): best single community, then greedily add any
///     further community that strictly lowers the row's Hamming error;
///   - per prototype entry: the bit value with lower total error (ties 0).
/// Every step is non-increasing in total error. Communities left empty are
/// re-seeded, and a final repair guarantees every column is non-empty.
///
/// Throws DegenerateInput if N < c or c == 0.
MacResult mac_cluster(const NodeFeatures& x, std::size_t c, std::uint64_t seed,
                      const MacOptions& options = {});

/// Samples E_0 from the AGM over a binary affiliation matrix.
std::vector<Edge> agm_infer(const BitMatrix& f0, std::uint64_t seed,
                            AgmMode mode = AgmMode::kSample);

/// G_0 = mac_cluster followed by agm_infer; all edges are marked inferred.
ObservedNetwork f_init(const NodeFeatures& x, std::size_t c, std::uint64_t seed,
                       const MacOptions& options = {},
                       AgmMode mode = AgmMode::kSample);

/// Cosine kNN graph over feature rows. Node u links to its k most similar
/// non-zero rows (ties to the lower id); the union over both directions is
/// returned as inferred edges. Zero rows get no edges.
ObservedNetwork knn_init(const NodeFeatures& x, std::size_t k);

}  // namespace commex
