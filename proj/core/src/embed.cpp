#include "commex/embed.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "commex/agm.hpp"
#include "commex/errors.hpp"
#include "commex/rng.hpp"

namespace commex {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Matrix relu(const Matrix& m) { return m.cwiseMax(0.0); }

Matrix relu_mask(const Matrix& pre, const Matrix& grad) {
  return (pre.array() > 0.0).select(grad, 0.0);
}

void check_shapes(const ModelParams& p, Eigen::Index n_nodes, Eigen::Index dim,
                  Eigen::Index adj_size) {
  if (p.w1.rows() != dim) {
    throw ShapeMismatch("w1 has " + std::to_string(p.w1.rows()) + " rows, features have dim " +
                        std::to_string(dim));
  }
  if (p.w2.rows() != p.w1.cols()) throw ShapeMismatch("w2 rows must equal hidden width");
  if (p.w_attr.rows() != dim || p.w_attr.cols() != p.w2.cols()) {
    throw ShapeMismatch("w_attr must be D x C");
  }
  if (adj_size != n_nodes) throw ShapeMismatch("adjacency size does not match node count");
}

}  // namespace

ModelParams init_params(std::size_t feature_dim, std::size_t hidden_dim,
                        std::size_t n_communities, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kParamInit);
  const auto d = static_cast<Eigen::Index>(feature_dim);
  const auto h = static_cast<Eigen::Index>(hidden_dim);
  const auto c = static_cast<Eigen::Index>(n_communities);
  ModelParams p;
  p.w1 = glorot_uniform(d, h, rng);
  p.w2 = glorot_uniform(h, c, rng);
  p.w_attr = glorot_uniform(d, c, rng);
  p.adam.m_w1 = p.adam.v_w1 = Matrix::Zero(d, h);
  p.adam.m_w2 = p.adam.v_w2 = Matrix::Zero(h, c);
  p.adam.m_attr = p.adam.v_attr = Matrix::Zero(d, c);
  return p;
}

NormalizedAdjacency normalize_adjacency(const ObservedNetwork& g, double inferred_weight) {
  const auto n = static_cast<Eigen::Index>(g.n_nodes());
  Vector degree = Vector::Ones(n);
  for (const Edge& e : g.revealed()) {
    degree(e.lo) += 1.0;
    degree(e.hi) += 1.0;
  }
  for (const Edge& e : g.inferred()) {
    degree(e.lo) += inferred_weight;
    degree(e.hi) += inferred_weight;
  }
  const Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) + 2 * g.n_edges());
  for (Eigen::Index u = 0; u < n; ++u) {
    trips.emplace_back(u, u, inv_sqrt(u) * inv_sqrt(u));
  }
  auto add = [&](const Edge& e, double w) {
    const double v = w * inv_sqrt(e.lo) * inv_sqrt(e.hi);
    trips.emplace_back(e.lo, e.hi, v);
    trips.emplace_back(e.hi, e.lo, v);
  };
  for (const Edge& e : g.revealed()) add(e, 1.0);
  for (const Edge& e : g.inferred()) add(e, inferred_weight);

  NormalizedAdjacency adj;
  adj.matrix.resize(n, n);
  adj.matrix.setFromTriplets(trips.begin(), trips.end());
  return adj;
}

ForwardCache gcn_forward_cached(const NormalizedAdjacency& adj, const SparseMatrix& x,
                                const ModelParams& p) {
  check_shapes(p, x.rows(), x.cols(), adj.matrix.rows());
  ForwardCache c;
  c.xw1 = x * p.w1;
  c.z1 = adj.matrix * c.xw1;
  c.h1 = relu(c.z1);
  const Matrix hw2 = c.h1 * p.w2;
  c.z2 = adj.matrix * hw2;
  c.f.values = relu(c.z2);
  return c;
}

AffiliationMatrix gcn_forward(const NormalizedAdjacency& adj, const NodeFeatures& x,
                              const ModelParams& p) {
  return gcn_forward_cached(adj, x.sparse(), p).f;
}

double edge_prob(const RowVector& fu, const RowVector& fv) {
  return agm_edge_probability(fu.dot(fv));
}

double attr_prob(const RowVector& fu, const Matrix& w_attr, Eigen::Index d) {
  return sigmoid(fu.dot(w_attr.row(d)));
}

double non_edge_term(const Matrix& f, const std::vector<Edge>& edges) {
  const RowVector s = f.colwise().sum();
  const double all_pairs = 0.5 * (s.squaredNorm() - f.squaredNorm());
  double on_edges = 0.0;
  for (const Edge& e : edges) on_edges += f.row(e.lo).dot(f.row(e.hi));
  return all_pairs - on_edges;
}

namespace {

/// Loss on F and its gradient dL/dF. `x_dense` is only read when eta > 0.
LossParts loss_and_grad(const Matrix& f, const Matrix& w_attr, const std::vector<Edge>& edges,
                        const Matrix& x_dense, double eta, Matrix* grad_f,
                        Matrix* grad_attr) {
  LossParts parts;
  parts.non_edge = non_edge_term(f, edges);
  if (grad_f) {
    const RowVector s = f.colwise().sum();
    *grad_f = (-f).rowwise() + s;
  }
  for (const Edge& e : edges) {
    const double dot = f.row(e.lo).dot(f.row(e.hi));
    const double clamped = std::max(dot, kEdgeDotFloor);
    parts.edge -= std::log(-std::expm1(-clamped));
    if (grad_f) {
      const double d_edge = dot > kEdgeDotFloor ? -1.0 / std::expm1(dot) : 0.0;
      const double coef = d_edge - 1.0;
      const RowVector fu = f.row(e.lo);
      grad_f->row(e.lo) += coef * f.row(e.hi);
      grad_f->row(e.hi) += coef * fu;
    }
  }
  if (eta != 0.0) {
    const Matrix logits = f * w_attr.transpose();  // N x D
    Matrix d_logits;
    if (grad_f) d_logits.resize(logits.rows(), logits.cols());
    double attr = 0.0;
    // Column-major walk; softplus and sigmoid share one exp(-|z|).
    for (Eigen::Index d = 0; d < logits.cols(); ++d) {
      for (Eigen::Index u = 0; u < logits.rows(); ++u) {
        const double z = logits(u, d);
        const double xv = x_dense(u, d);
        const double e = std::exp(-std::abs(z));
        attr += std::max(z, 0.0) + std::log1p(e) - xv * z;
        if (grad_f) {
          const double sig = z >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
          d_logits(u, d) = eta * (sig - xv);
        }
      }
    }
    parts.attr = attr;
    if (grad_f) {
      *grad_f += d_logits * w_attr;
      if (grad_attr) *grad_attr = d_logits.transpose() * f;
    }
  } else if (grad_attr) {
    *grad_attr = Matrix::Zero(w_attr.rows(), w_attr.cols());
  }
  parts.total = parts.edge + parts.non_edge + eta * parts.attr;
  return parts;
}

}  // namespace

LossParts loss(const AffiliationMatrix& f, const Matrix& w_attr, const ObservedNetwork& g,
               const NodeFeatures& x, double eta) {
  if (eta < 0.0) throw PreconditionError("eta must be >= 0");
  const Matrix x_dense = eta != 0.0 ? x.dense() : Matrix();
  if (eta != 0.0 && (x_dense.rows() != f.values.rows() || w_attr.rows() != x_dense.cols() ||
                     w_attr.cols() != f.values.cols())) {
    throw ShapeMismatch("loss: F, W and X shapes disagree");
  }
  return loss_and_grad(f.values, w_attr, g.edge_list(), x_dense, eta, nullptr, nullptr);
}

TrainingProblem::TrainingProblem(const ObservedNetwork& g, const NodeFeatures& features,
                                 double eta_, double inferred_weight)
    : adj(normalize_adjacency(g, inferred_weight)),
      x(features.sparse()),
      x_dense(features.dense()),
      edges(g.edge_list()),
      eta(eta_) {
  if (eta < 0.0) throw PreconditionError("eta must be >= 0");
  if (features.n_nodes() != g.n_nodes()) {
    throw ShapeMismatch("feature rows do not match node count");
  }
}

Gradients loss_gradients(const ModelParams& p, const TrainingProblem& problem) {
  const ForwardCache fw = gcn_forward_cached(problem.adj, problem.x, p);
  Gradients g;
  Matrix d_f;
  g.loss = loss_and_grad(fw.f.values, p.w_attr, problem.edges, problem.x_dense, problem.eta,
                         &d_f, &g.w_attr);
  const SparseMatrix& a = problem.adj.matrix;
  const Matrix d_z2 = relu_mask(fw.z2, d_f);
  const Matrix d_hw2 = a * d_z2;  // A is symmetric
  g.w2 = fw.h1.transpose() * d_hw2;
  const Matrix d_z1 = relu_mask(fw.z1, d_hw2 * p.w2.transpose());
  const Matrix d_xw1 = a * d_z1;
  g.w1 = problem.x.transpose() * d_xw1;
  return g;
}

Gradients loss_gradients(const ModelParams& p, const ObservedNetwork& g, const NodeFeatures& x,
                         double eta) {
  return loss_gradients(p, TrainingProblem(g, x, eta));
}

namespace {

void adam_update(Matrix& theta, const Matrix& grad, Matrix& m, Matrix& v, const AdamConfig& c,
                 double bias1, double bias2) {
  m = c.beta1 * m + (1.0 - c.beta1) * grad;
  v = c.beta2 * v + (1.0 - c.beta2) * grad.cwiseAbs2();
  theta.array() -= c.lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + c.epsilon);
}

}  // namespace

void adam_step(ModelParams& p, const Gradients& grads, const AdamConfig& config) {
  if (!(config.lr > 0.0)) throw PreconditionError("learning rate must be > 0");
  auto& s = p.adam;
  if (s.m_w1.size() == 0) {
    s.m_w1 = s.v_w1 = Matrix::Zero(p.w1.rows(), p.w1.cols());
    s.m_w2 = s.v_w2 = Matrix::Zero(p.w2.rows(), p.w2.cols());
    s.m_attr = s.v_attr = Matrix::Zero(p.w_attr.rows(), p.w_attr.cols());
  }
  ++s.step;
  const double t = static_cast<double>(s.step);
  const double bias1 = 1.0 - std::pow(config.beta1, t);
  const double bias2 = 1.0 - std::pow(config.beta2, t);
  adam_update(p.w1, grads.w1, s.m_w1, s.v_w1, config, bias1, bias2);
  adam_update(p.w2, grads.w2, s.m_w2, s.v_w2, config, bias1, bias2);
  adam_update(p.w_attr, grads.w_attr, s.m_attr, s.v_attr, config, bias1, bias2);
}

TrainResult train(const ObservedNetwork& g, const NodeFeatures& x, ModelParams p0,
                  const TrainOptions& options) {
  if (options.epochs == 0) throw PreconditionError("train needs epochs >= 1");
  const TrainingProblem problem(g, x, options.eta, options.inferred_weight);
  TrainResult out;
  out.params = std::move(p0);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const Gradients grads = loss_gradients(out.params, problem);
    if (!std::isfinite(grads.loss.total)) throw NonFiniteLoss(epoch, grads.loss.total);
    if (epoch == 0) out.loss_initial = grads.loss.total;
    adam_step(out.params, grads, options.adam);
  }
  const ForwardCache fw = gcn_forward_cached(problem.adj, problem.x, out.params);
  out.loss_final = loss_and_grad(fw.f.values, out.params.w_attr, problem.edges, problem.x_dense,
                                 problem.eta, nullptr, nullptr)
                       .total;
  if (!std::isfinite(out.loss_final)) throw NonFiniteLoss(options.epochs, out.loss_final);
  out.f = fw.f;
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw ShapeMismatch("checkpoint matrix data has the wrong length");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = data[static_cast<std::size_t>(i * cols + k)];
  }
  return m;
}

}  // namespace

void save_checkpoint(const ModelParams& p, const std::filesystem::path& file) {
  nlohmann::json j;
  j["schema"] = 1;
  j["w1"] = matrix_to_json(p.w1);
  j["w2"] = matrix_to_json(p.w2);
  j["w_attr"] = matrix_to_json(p.w_attr);
  j["adam"] = {{"step", p.adam.step},
               {"m_w1", matrix_to_json(p.adam.m_w1)},
               {"v_w1", matrix_to_json(p.adam.v_w1)},
               {"m_w2", matrix_to_json(p.adam.m_w2)},
               {"v_w2", matrix_to_json(p.adam.v_w2)},
               {"m_attr", matrix_to_json(p.adam.m_attr)},
               {"v_attr", matrix_to_json(p.adam.v_attr)}};
  std::ofstream out(file);
  if (!out) throw Error("cannot write checkpoint " + file.string());
  out << j.dump() << '\n';
}

ModelParams load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw MissingFile(file);
  try {
    nlohmann::json j;
    in >> j;
    if (j.at("schema").get<int>() != 1) throw ParseError(file, 1, "unsupported schema");
    ModelParams p;
    p.w1 = matrix_from_json(j.at("w1"));
    p.w2 = matrix_from_json(j.at("w2"));
    p.w_attr = matrix_from_json(j.at("w_attr"));
    const auto& a = j.at("adam");
    p.adam.step = a.at("step").get<std::uint64_t>();
    p.adam.m_w1 = matrix_from_json(a.at("m_w1"));
    p.adam.v_w1 = matrix_from_json(a.at("v_w1"));
    p.adam.m_w2 = matrix_from_json(a.at("m_w2"));
    p.adam.v_w2 = matrix_from_json(a.at("v_w2"));
    p.adam.m_attr = matrix_from_json(a.at("m_attr"));
    p.adam.v_attr = matrix_from_json(a.at("v_attr"));
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(file, 1, e.what());
  }
}

}  // namespace commex
