#include "commex/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commex/agm.hpp"
#include "commex/errors.hpp"

namespace commex {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// NodeFeatures

NodeFeatures::NodeFeatures(std::size_t n_nodes, std::size_t dim)
    : dim_(dim), rows_(n_nodes) {}

NodeFeatures NodeFeatures::from_indices(
    std::size_t dim, std::vector<std::vector<std::uint32_t>> rows) {
  NodeFeatures x;
  x.dim_ = dim;
  x.rows_ = std::move(rows);
  for (auto& r : x.rows_) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    if (!r.empty() && r.back() >= dim) {
      throw InconsistentDims("feature index " + std::to_string(r.back()) +
                             " out of range for dim " + std::to_string(dim));
    }
  }
  return x;
}

NodeFeatures NodeFeatures::from_dense(const std::vector<std::vector<int>>& rows) {
  const std::size_t dim = rows.empty() ? 0 : rows.front().size();
  NodeFeatures x(rows.size(), dim);
  for (std::size_t u = 0; u < rows.size(); ++u) {
    if (rows[u].size() != dim) {
      throw InconsistentDims("feature row " + std::to_string(u) + " has " +
                             std::to_string(rows[u].size()) +
                             " columns, expected " + std::to_string(dim));
    }
    for (std::size_t d = 0; d < dim; ++d) {
      if (rows[u][d] != 0 && rows[u][d] != 1) {
        throw PreconditionError("features must be binary");
      }
      if (rows[u][d] == 1) x.rows_[u].push_back(static_cast<std::uint32_t>(d));
    }
  }
  return x;
}

std::size_t NodeFeatures::nnz() const {
  std::size_t total = 0;
  for (const auto& r : rows_) total += r.size();
  return total;
}

bool NodeFeatures::at(std::size_t u, std::size_t d) const {
  const auto& r = rows_.at(u);
  return std::binary_search(r.begin(), r.end(), static_cast<std::uint32_t>(d));
}

void NodeFeatures::set(std::size_t u, std::size_t d) {
  if (d >= dim_) throw InconsistentDims("feature index out of range");
  auto& r = rows_.at(u);
  const auto bit = static_cast<std::uint32_t>(d);
  auto it = std::lower_bound(r.begin(), r.end(), bit);
  if (it == r.end() || *it != bit) r.insert(it, bit);
}

Matrix NodeFeatures::dense() const {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(rows_.size()),
                          static_cast<Eigen::Index>(dim_));
  for (std::size_t u = 0; u < rows_.size(); ++u) {
    for (auto d : rows_[u]) m(static_cast<Eigen::Index>(u), d) = 1.0;
  }
  return m;
}

SparseMatrix NodeFeatures::sparse() const {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(nnz());
  for (std::size_t u = 0; u < rows_.size(); ++u) {
    for (auto d : rows_[u]) {
      trips.emplace_back(static_cast<int>(u), static_cast<int>(d), 1.0);
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(rows_.size()),
                 static_cast<Eigen::Index>(dim_));
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

// ---------------------------------------------------------------------------
// Text helpers

namespace {

std::ifstream open_or_throw(const fs::path& file) {
  if (!fs::exists(file)) throw MissingFile(file);
  std::ifstream in(file);
  if (!in) throw MissingFile(file);
  return in;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

template <typename Int>
Int parse_int(std::string_view tok, const fs::path& file, std::size_t line) {
  Int value{};
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(file, line, "expected an integer, got '" +
                                     std::string(tok) + "'");
  }
  return value;
}

int parse_bit(std::string_view tok, const fs::path& file, std::size_t line) {
  if (tok == "0") return 0;
  if (tok == "1") return 1;
  throw ParseError(file, line,
                   "expected a binary feature value, got '" + std::string(tok) + "'");
}

/// Reads `b1 ... bD` tokens into one-bit indices.
std::vector<std::uint32_t> parse_bits(std::span<const std::string_view> toks,
                                      const fs::path& file, std::size_t line) {
  std::vector<std::uint32_t> bits;
  for (std::size_t d = 0; d < toks.size(); ++d) {
    if (parse_bit(toks[d], file, line)) bits.push_back(static_cast<std::uint32_t>(d));
  }
  return bits;
}

}  // namespace

// ---------------------------------------------------------------------------
// SNAP ego networks

Dataset load_ego_network(const fs::path& dir, const std::string& ego_id) {
  const fs::path edges_file = dir / (ego_id + ".edges");
  const fs::path feat_file = dir / (ego_id + ".feat");
  const fs::path egofeat_file = dir / (ego_id + ".egofeat");
  const fs::path circles_file = dir / (ego_id + ".circles");

  Dataset data;
  const auto ego_original = parse_int<std::uint64_t>(ego_id, dir / ego_id, 0);

  // .feat: "u b1 ... bD"
  std::map<std::uint64_t, std::vector<std::uint32_t>> alter_bits;
  std::size_t dim = 0;
  bool have_dim = false;
  {
    auto in = open_or_throw(feat_file);
    std::string line;
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
      strip_cr(line);
      const auto toks = split_ws(line);
      if (toks.empty()) continue;
      const auto id = parse_int<std::uint64_t>(toks[0], feat_file, ln);
      const std::span<const std::string_view> bit_toks(toks.begin() + 1, toks.end());
      auto bits = parse_bits(bit_toks, feat_file, ln);
      if (!have_dim) {
        dim = bit_toks.size();
        have_dim = true;
      } else if (bit_toks.size() != dim) {
        throw InconsistentDims(feat_file.string() + ":" + std::to_string(ln) +
                               ": row has " + std::to_string(bit_toks.size()) +
                               " features, expected " + std::to_string(dim));
      }
      if (!alter_bits.emplace(id, std::move(bits)).second) {
        throw ParseError(feat_file, ln, "duplicate node id " + std::to_string(id));
      }
    }
  }

  // .egofeat: "b1 ... bD"
  std::vector<std::uint32_t> ego_bits;
  {
    auto in = open_or_throw(egofeat_file);
    std::string line;
    bool seen = false;
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
      strip_cr(line);
      const auto toks = split_ws(line);
      if (toks.empty()) continue;
      if (seen) throw ParseError(egofeat_file, ln, "expected a single feature row");
      seen = true;
      if (have_dim && toks.size() != dim) {
        throw InconsistentDims(egofeat_file.string() + ": ego has " +
                               std::to_string(toks.size()) +
                               " features, alters have " + std::to_string(dim));
      }
      dim = toks.size();
      have_dim = true;
      ego_bits = parse_bits(toks, egofeat_file, ln);
    }
  }

  // .edges: "u v"
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw_edges;
  std::set<std::uint64_t> ids;
  for (const auto& [id, bits] : alter_bits) ids.insert(id);
  {
    auto in = open_or_throw(edges_file);
    std::string line;
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
      strip_cr(line);
      const auto toks = split_ws(line);
      if (toks.empty()) continue;
      if (toks.size() != 2) throw ParseError(edges_file, ln, "expected 'u v'");
      const auto a = parse_int<std::uint64_t>(toks[0], edges_file, ln);
      const auto b = parse_int<std::uint64_t>(toks[1], edges_file, ln);
      raw_edges.emplace_back(a, b);
      ids.insert(a);
      ids.insert(b);
    }
  }
  ids.erase(ego_original);

  std::map<std::uint64_t, NodeId> remap;
  for (auto id : ids) remap.emplace(id, static_cast<NodeId>(remap.size()));
  const auto ego = static_cast<NodeId>(remap.size());
  remap.emplace(ego_original, ego);
  const std::size_t n = remap.size();

  std::vector<std::vector<std::uint32_t>> rows(n);
  std::size_t featureless = 0;
  for (const auto& [id, node] : remap) {
    if (node == ego) continue;
    auto it = alter_bits.find(id);
    if (it == alter_bits.end()) {
      ++featureless;
    } else {
      rows[node] = it->second;
    }
  }
  rows[ego] = ego_bits;
  if (featureless > 0) {
    data.warnings.push_back(std::to_string(featureless) +
                            " node(s) in .edges have no .feat row; using zero features");
  }

  std::set<Edge> edges;
  std::size_t self_loops = 0;
  for (auto [a, b] : raw_edges) {
    if (a == b) {
      ++self_loops;
      continue;
    }
    edges.insert(make_edge(remap.at(a), remap.at(b)));
  }
  if (self_loops > 0) {
    data.warnings.push_back("dropped " + std::to_string(self_loops) + " self-loop(s)");
  }
  for (NodeId u = 0; u < ego; ++u) edges.insert(make_edge(u, ego));

  // .circles: "name\tid\tid..."
  CommunityCover truth;
  {
    auto in = open_or_throw(circles_file);
    std::string line;
    std::size_t unknown = 0;
    std::size_t empty_circles = 0;
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
      strip_cr(line);
      const auto toks = split_ws(line);
      if (toks.empty()) continue;
      std::vector<NodeId> members;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        const auto id = parse_int<std::uint64_t>(toks[i], circles_file, ln);
        auto it = remap.find(id);
        if (it == remap.end()) {
          ++unknown;
          continue;
        }
        members.push_back(it->second);
      }
      if (members.empty()) {
        ++empty_circles;
        continue;
      }
      truth.communities.push_back(std::move(members));
    }
    if (unknown > 0) {
      data.warnings.push_back("ignored " + std::to_string(unknown) +
                              " circle member(s) not present in the graph");
    }
    if (empty_circles > 0) {
      data.warnings.push_back("dropped " + std::to_string(empty_circles) +
                              " empty circle(s)");
    }
    if (truth.empty()) {
      data.warnings.push_back(circles_file.string() + " defines no communities");
    }
  }

  const std::vector<Edge> edge_vec(edges.begin(), edges.end());
  data.network = HiddenNetwork(n, edge_vec, std::move(truth));
  data.features = NodeFeatures::from_indices(dim, std::move(rows));
  return data;
}

// ---------------------------------------------------------------------------
// Canonical format

Dataset load_canonical(const fs::path& dir) {
  const fs::path meta_file = dir / "meta.json";
  const fs::path edges_file = dir / "edges.tsv";
  const fs::path feat_file = dir / "features.tsv";
  const fs::path comm_file = dir / "communities.tsv";
  for (const auto& f : {meta_file, edges_file, feat_file, comm_file}) {
    if (!fs::exists(f)) throw MissingFile(f);
  }

  Dataset data;
  std::size_t n = 0;
  std::size_t dim = 0;
  {
    auto in = open_or_throw(meta_file);
    nlohmann::json meta;
    try {
      in >> meta;
      n = meta.at("n_nodes").get<std::size_t>();
      dim = meta.at("dim").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(meta_file, 1, e.what());
    }
  }

  auto check_id = [n](std::uint64_t id, const fs::path& file, std::size_t ln) {
    if (id >= n) {
      throw ParseError(file, ln, "node id " + std::to_string(id) +
                                     " >= n_nodes " + std::to_string(n));
    }
    return static_cast<NodeId>(id);
  };

  std::set<Edge> edges;
  std::size_t duplicates = 0;
  {
    auto in = open_or_throw(edges_file);
    std::string line;
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
      strip_cr(line);
      if (line.empty()) continue;
      const auto toks = split_on(line, '\t');
      if (toks.size() != 2) throw ParseError(edges_file, ln, "expected 'u<TAB>v'");
      const NodeId a = check_id(parse_int<std::uint64_t>(toks[0], edges_file, ln),
                                edges_file, ln);
      const NodeId b = check_id(parse_int<std::uint64_t>(toks[1], edges_file, ln),
                                edges_file, ln);
      if (a == b) throw ParseError(edges_file, ln, "self-loop");
      if (!edges.insert(make_edge(a, b)).second) ++duplicates;
    }
  }
  if (duplicates > 0) {
    data.warnings.push_back("ignored " + std::to_string(duplicates) +
                            " duplicate edge line(s)");
  }

  std::vector<std::vector<std::uint32_t>> rows(n);
  {
    auto in = open_or_throw(feat_file);
    std::string line;
    std::vector<bool> seen(n);
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
      strip_cr(line);
      if (line.empty()) continue;
      const auto toks = split_on(line, '\t');
      if (toks.size() > 2) throw ParseError(feat_file, ln, "expected 'u<TAB>idx,idx,...'");
      const NodeId u = check_id(parse_int<std::uint64_t>(toks[0], feat_file, ln),
                                feat_file, ln);
      if (seen[u]) throw ParseError(feat_file, ln, "duplicate node " + std::to_string(u));
      seen[u] = true;
      if (toks.size() < 2 || toks[1].empty()) continue;
      for (auto tok : split_on(toks[1], ',')) {
        const auto d = parse_int<std::uint32_t>(tok, feat_file, ln);
        if (d >= dim) {
          throw ParseError(feat_file, ln, "feature index " + std::to_string(d) +
                                              " >= dim " + std::to_string(dim));
        }
        rows[u].push_back(d);
      }
    }
  }

  CommunityCover truth;
  {
    auto in = open_or_throw(comm_file);
    std::string line;
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
      strip_cr(line);
      if (line.empty()) continue;
      const auto toks = split_on(line, '\t');
      if (toks.size() != 2) {
        throw ParseError(comm_file, ln, "expected 'id<TAB>member,member,...'");
      }
      std::vector<NodeId> members;
      if (!toks[1].empty()) {
        for (auto tok : split_on(toks[1], ',')) {
          members.push_back(check_id(parse_int<std::uint64_t>(tok, comm_file, ln),
                                     comm_file, ln));
        }
      }
      if (members.empty()) {
        data.warnings.push_back(comm_file.string() + ":" + std::to_string(ln) +
                                ": skipped empty community");
        continue;
      }
      truth.communities.push_back(std::move(members));
    }
  }

  const std::vector<Edge> edge_vec(edges.begin(), edges.end());
  data.network = HiddenNetwork(n, edge_vec, std::move(truth));
  data.features = NodeFeatures::from_indices(dim, std::move(rows));
  return data;
}

void write_canonical(const Dataset& data, const fs::path& dir) {
  fs::create_directories(dir);
  const auto& g = data.network;
  const auto& x = data.features;
  if (x.n_nodes() != g.n_nodes()) {
    throw InconsistentDims("feature rows do not match node count");
  }
  {
    nlohmann::json meta = {{"schema", 1}, {"n_nodes", g.n_nodes()}, {"dim", x.dim()}};
    std::ofstream out(dir / "meta.json");
    out << meta.dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "edges.tsv");
    for (const Edge& e : g.edges()) out << e.lo << '\t' << e.hi << '\n';
  }
  {
    std::ofstream out(dir / "features.tsv");
    for (std::size_t u = 0; u < x.n_nodes(); ++u) {
      out << u << '\t';
      const auto r = x.row(u);
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "communities.tsv");
    const auto& comms = g.truth().communities;
    for (std::size_t c = 0; c < comms.size(); ++c) {
      out << c << '\t';
      for (std::size_t i = 0; i < comms[c].size(); ++i) {
        out << (i ? "," : "") << comms[c][i];
      }
      out << '\n';
    }
  }
}

DatasetFormat parse_dataset_format(const std::string& name) {
  if (name == "ego") return DatasetFormat::kEgo;
  if (name == "canonical") return DatasetFormat::kCanonical;
  throw PreconditionError("unknown dataset format '" + name + "'");
}

Dataset load_dataset(const fs::path& path, DatasetFormat format) {
  if (format == DatasetFormat::kEgo) {
    return load_ego_network(path.parent_path(), path.filename().string());
  }
  return load_canonical(path);
}

// ---------------------------------------------------------------------------
// Synthetic data

HiddenNetwork synth_agm(const Matrix& f0, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kSynthetic);
  const auto edges = sample_agm_edges(f0, rng);
  CommunityCover truth;
  for (Eigen::Index c = 0; c < f0.cols(); ++c) {
    std::vector<NodeId> members;
    for (Eigen::Index u = 0; u < f0.rows(); ++u) {
      if (f0(u, c) > 0.0) members.push_back(static_cast<NodeId>(u));
    }
    truth.communities.push_back(std::move(members));
  }
  return HiddenNetwork(static_cast<std::size_t>(f0.rows()), edges, std::move(truth));
}

Dataset synth_dataset(const SyntheticSpec& spec) {
  if (spec.n_communities == 0 || spec.n_nodes < spec.n_communities) {
    throw PreconditionError("synthetic data needs 1 <= communities <= nodes");
  }
  if (spec.bits_per_community > spec.dim) {
    throw PreconditionError("bits_per_community exceeds dim");
  }
  const auto n = static_cast<Eigen::Index>(spec.n_nodes);
  const auto c = static_cast<Eigen::Index>(spec.n_communities);

  Rng rng = make_rng(spec.seed, Stream::kSyntheticFeatures);
  std::uniform_int_distribution<Eigen::Index> pick_comm(0, c - 1);
  Matrix f0 = Matrix::Zero(n, c);
  for (Eigen::Index u = 0; u < n; ++u) {
    const Eigen::Index primary = u < c ? u : pick_comm(rng);
    f0(u, primary) = spec.affiliation;
    if (c > 1 && uniform01(rng) < spec.overlap_prob) {
      Eigen::Index second = pick_comm(rng);
      if (second == primary) second = (second + 1) % c;
      f0(u, second) = spec.affiliation;
    }
  }

  // Each community owns a random set of prototype feature bits.
  std::vector<std::uint32_t> all_bits(spec.dim);
  for (std::size_t d = 0; d < spec.dim; ++d) all_bits[d] = static_cast<std::uint32_t>(d);
  std::vector<std::vector<std::uint32_t>> prototypes(spec.n_communities);
  for (auto& proto : prototypes) {
    std::shuffle(all_bits.begin(), all_bits.end(), rng);
    proto.assign(all_bits.begin(),
                 all_bits.begin() + static_cast<std::ptrdiff_t>(spec.bits_per_community));
  }

  std::vector<std::vector<std::uint32_t>> rows(spec.n_nodes);
  for (Eigen::Index u = 0; u < n; ++u) {
    auto& row = rows[static_cast<std::size_t>(u)];
    for (Eigen::Index k = 0; k < c; ++k) {
      if (f0(u, k) == 0.0) continue;
      for (auto d : prototypes[static_cast<std::size_t>(k)]) {
        if (uniform01(rng) >= spec.feature_drop) row.push_back(d);
      }
    }
    for (std::size_t d = 0; d < spec.dim; ++d) {
      if (uniform01(rng) < spec.feature_noise) row.push_back(static_cast<std::uint32_t>(d));
    }
  }

  Dataset data;
  data.network = synth_agm(f0, spec.seed);
  data.features = NodeFeatures::from_indices(spec.dim, std::move(rows));
  return data;
}

NodeFeatures one_hot_encode(const std::vector<std::vector<std::int64_t>>& table) {
  if (table.empty()) return {};
  const std::size_t cols = table.front().size();
  std::vector<std::map<std::int64_t, std::uint32_t>> levels(cols);
  for (const auto& row : table) {
    if (row.size() != cols) throw InconsistentDims("ragged categorical table");
    for (std::size_t j = 0; j < cols; ++j) levels[j].emplace(row[j], 0);
  }
  std::uint32_t offset = 0;
  for (auto& col : levels) {
    for (auto& [value, bit] : col) bit = offset++;
  }
  std::vector<std::vector<std::uint32_t>> rows(table.size());
  for (std::size_t u = 0; u < table.size(); ++u) {
    for (std::size_t j = 0; j < cols; ++j) rows[u].push_back(levels[j].at(table[u][j]));
  }
  return NodeFeatures::from_indices(offset, std::move(rows));
}

}  // namespace commex
