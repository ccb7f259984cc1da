#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "commex/graph.hpp"
#include "commex/tensor.hpp"

namespace commex {

/// Binary node metadata X (N x D), stored as the sorted one-bit indices of
/// each row.
class NodeFeatures {
 public:
  NodeFeatures() = default;
  NodeFeatures(std::size_t n_nodes, std::size_t dim);

  /// Builds from per-row one-bit indices; indices must be < dim.
  static NodeFeatures from_indices(std::size_t dim,
                                   std::vector<std::vector<std::uint32_t>> rows);
  /// Builds from a dense 0/1 table; every row must have the same length.
  static NodeFeatures from_dense(const std::vector<std::vector<int>>& rows);

  std::size_t n_nodes() const { return rows_.size(); }
  std::size_t dim() const { return dim_; }
  std::size_t nnz() const;
  std::span<const std::uint32_t> row(std::size_t u) const { return rows_[u]; }
  bool at(std::size_t u, std::size_t d) const;
  void set(std::size_t u, std::size_t d);

  /// Dense N x D copy with entries in {0, 1}.
  Matrix dense() const;
  /// Sparse N x D copy with unit entries.
  SparseMatrix sparse() const;

  bool operator==(const NodeFeatures&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::vector<std::uint32_t>> rows_;
};

struct Dataset {
  HiddenNetwork network;  // carries the ground-truth cover
  NodeFeatures features;
  /// Non-fatal issues found while loading.
  std::vector<std::string> warnings;
};

/// Reads `<ego>.edges`, `<ego>.feat`, `<ego>.egofeat` and `<ego>.circles`
/// from `dir`. Alters are renumbered 0..N-2 by ascending original id and the
/// ego becomes node N-1, linked to every alter.
Dataset load_ego_network(const std::filesystem::path& dir,
                         const std::string& ego_id);

/// Reads `edges.tsv`, `features.tsv`, `communities.tsv` and `meta.json`.
Dataset load_canonical(const std::filesystem::path& dir);

/// Writes `data` in the layout read by load_canonical, creating `dir`.
void write_canonical(const Dataset& data, const std::filesystem::path& dir);

enum class DatasetFormat { kEgo, kCanonical };

DatasetFormat parse_dataset_format(const std::string& name);

/// For kEgo, `path` names the file prefix, e.g. `facebook/0`; for
/// kCanonical it names the directory.
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format);

/// Samples a graph from the AGM: each pair {u, v} is an edge with
/// probability 1 - exp(-F0_u . F0_v). The truth cover is the column support
/// of `f0`.
HiddenNetwork synth_agm(const Matrix& f0, std::uint64_t seed);

struct SyntheticSpec {
  std::size_t n_nodes = 50;
  std::size_t n_communities = 3;
  std::size_t dim = 24;
  /// Probability that a node joins a second community.
  double overlap_prob = 0.2;
  /// Affiliation strength; same-community pairs link with 1 - exp(-w^2).
  double affiliation = 1.0;
  std::size_t bits_per_community = 4;
  /// Probability of dropping a prototype bit and of flipping on a random bit.
  double feature_drop = 0.1;
  double feature_noise = 0.02;
  std::uint64_t seed = 1;
};

/// AGM graph plus community-correlated binary features.
Dataset synth_dataset(const SyntheticSpec& spec);

/// Expands categorical columns into one-hot binary features. Column j gets one
/// bit per distinct value, ordered by value.
NodeFeatures one_hot_encode(const std::vector<std::vector<std::int64_t>>& table);

}  // namespace commex
