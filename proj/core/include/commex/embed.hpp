#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "commex/dataset.hpp"
#include "commex/graph.hpp"
#include "commex/tensor.hpp"

namespace commex {

/// Lower clamp applied to edge dot products before log(1 - exp(-x)).
inline constexpr double kEdgeDotFloor = 1e-8;

/// Non-negative N x C node-community affiliations F.
struct AffiliationMatrix {
  Matrix values;

  Eigen::Index n_nodes() const { return values.rows(); }
  Eigen::Index n_communities() const { return values.cols(); }
};

struct AdamState {
  Matrix m_w1, v_w1;
  Matrix m_w2, v_w2;
  Matrix m_attr, v_attr;
  std::uint64_t step = 0;
};

/// Two-layer GCN weights plus the attribute relevance matrix W of the
/// metadata model.
struct ModelParams {
  Matrix w1;      // D x H
  Matrix w2;      // H x C
  Matrix w_attr;  // D x C
  AdamState adam;

  Eigen::Index feature_dim() const { return w1.rows(); }
  Eigen::Index hidden_dim() const { return w1.cols(); }
  Eigen::Index n_communities() const { return w2.cols(); }
};

/// Glorot-uniform weights and zeroed optimizer state.
ModelParams init_params(std::size_t feature_dim, std::size_t hidden_dim,
                        std::size_t n_communities, std::uint64_t seed);

/// D^-1/2 (A + I) D^-1/2 with D the degree of A + I. Inferred edges enter A
/// with `inferred_weight`, revealed edges with weight 1.
struct NormalizedAdjacency {
  SparseMatrix matrix;
};

NormalizedAdjacency normalize_adjacency(const ObservedNetwork& g,
                                        double inferred_weight = 1.0);

/// Intermediate activations of one forward pass, kept for backprop.
struct ForwardCache {
  Matrix xw1;  // X w1
  Matrix z1;   // A xw1
  Matrix h1;   // relu(z1)
  Matrix z2;   // A h1 w2
  AffiliationMatrix f;
};

/// F = relu(A relu(A X w1) w2).
ForwardCache gcn_forward_cached(const NormalizedAdjacency& adj, const SparseMatrix& x,
                                const ModelParams& p);
AffiliationMatrix gcn_forward(const NormalizedAdjacency& adj, const NodeFeatures& x,
                              const ModelParams& p);

/// 1 - exp(-fu . fv).
double edge_prob(const RowVector& fu, const RowVector& fv);

/// Q_ud = sigmoid(sum_c W_dc F_uc).
double attr_prob(const RowVector& fu, const Matrix& w_attr, Eigen::Index d);

struct LossParts {
  double edge = 0.0;      // -sum_{E_t} log(1 - exp(-dot))
  double non_edge = 0.0;  // sum over unordered non-edges u<v of dot
  double attr = 0.0;      // binary cross-entropy of Q against X (unscaled)
  double total = 0.0;     // edge + non_edge + eta * attr
};

/// Sum over unordered pairs u < v not in `edges` of F_u . F_v, computed in
/// O((N + |E|) C) as (|s|^2 - sum_u |F_u|^2) / 2 - sum_E F_u . F_v.
double non_edge_term(const Matrix& f, const std::vector<Edge>& edges);

/// Reconstruction loss L = L1 + eta L2 with the edge dot products clamped
/// below at kEdgeDotFloor. When eta == 0 the attribute term is skipped, so
/// the result does not depend on `w_attr` or `x`.
LossParts loss(const AffiliationMatrix& f, const Matrix& w_attr,
               const ObservedNetwork& g, const NodeFeatures& x, double eta);

struct Gradients {
  Matrix w1;
  Matrix w2;
  Matrix w_attr;
  LossParts loss;
};

/// Precomputed inputs shared by every epoch on a fixed G_t.
struct TrainingProblem {
  NormalizedAdjacency adj;
  SparseMatrix x;
  Matrix x_dense;
  std::vector<Edge> edges;
  double eta = 1.0;

  TrainingProblem(const ObservedNetwork& g, const NodeFeatures& features, double eta,
                  double inferred_weight = 1.0);
};

/// Analytic gradients of loss(gcn_forward(p)) with respect to w1, w2 and
/// w_attr.
Gradients loss_gradients(const ModelParams& p, const TrainingProblem& problem);
Gradients loss_gradients(const ModelParams& p, const ObservedNetwork& g,
                         const NodeFeatures& x, double eta);

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One bias-corrected Adam update of every parameter matrix.
void adam_step(ModelParams& p, const Gradients& grads, const AdamConfig& config);

struct TrainOptions {
  std::size_t epochs = 500;
  double eta = 1.0;
  AdamConfig adam;
  double inferred_weight = 1.0;
};

struct TrainResult {
  ModelParams params;
  AffiliationMatrix f;
  double loss_initial = 0.0;  // loss at p0
  double loss_final = 0.0;    // loss at the returned params
};

/// Full-batch Adam on the reconstruction loss. Deterministic in its inputs.
/// Throws PreconditionError when epochs == 0 and NonFiniteLoss if the loss
/// stops being finite.
TrainResult train(const ObservedNetwork& g, const NodeFeatures& x, ModelParams p0,
                  const TrainOptions& options);

/// JSON checkpoint of ModelParams (weights and optimizer state).
void save_checkpoint(const ModelParams& p, const std::filesystem::path& file);
ModelParams load_checkpoint(const std::filesystem::path& file);

}  // namespace commex
