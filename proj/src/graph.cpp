#include "sdlab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "sdlab/errors.hpp"
#include "sdlab/rng.hpp"

namespace sdlab {

Graph::Graph(std::size_t num_nodes, DenseMatrix features, std::vector<Edge> edges,
             std::optional<std::vector<std::uint8_t>> gt_edge_labels, int label)
    : num_nodes_(num_nodes),
      features_(std::move(features)),
      edges_(std::move(edges)),
      gt_(std::move(gt_edge_labels)),
      label_(label) {
  if (features_.rows() != num_nodes_) {
    throw ValidationError("feature rows " + std::to_string(features_.rows()) +
                          " != node count " + std::to_string(num_nodes_));
  }
  if (label_ < 0) throw ValidationError("negative class label");
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> index;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& [s, d] = edges_[e];
    if (s >= num_nodes_ || d >= num_nodes_) {
      throw ValidationError("edge " + std::to_string(e) + " (" + std::to_string(s) + "," +
                            std::to_string(d) + ") references a node >= " +
                            std::to_string(num_nodes_));
    }
    if (s == d) throw ValidationError("self-loop at edge " + std::to_string(e));
    if (!index.emplace(std::pair{s, d}, e).second) {
      throw ValidationError("duplicate edge " + std::to_string(e));
    }
  }
  reverse_.resize(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    auto it = index.find({edges_[e].dst, edges_[e].src});
    if (it == index.end()) {
      throw ValidationError("edge " + std::to_string(e) + " has no reverse edge");
    }
    reverse_[e] = it->second;
  }
  if (gt_) {
    if (gt_->size() != edges_.size()) {
      throw ValidationError("ground-truth label count does not match edge count");
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if ((*gt_)[e] > 1) throw ValidationError("ground-truth labels must be 0 or 1");
      if ((*gt_)[e] != (*gt_)[reverse_[e]]) {
        throw ValidationError("ground-truth labels not symmetric at edge " + std::to_string(e));
      }
    }
  }
}

EdgeMask::EdgeMask(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
      throw ValidationError("mask value " + std::to_string(values_[i]) + " at edge " +
                            std::to_string(i) + " outside [0,1]");
    }
  }
}

void check_aligned(const Graph& graph, std::size_t mask_size) {
  if (mask_size != graph.num_edges()) {
    throw AlignmentError("mask length " + std::to_string(mask_size) + " != edge count " +
                         std::to_string(graph.num_edges()));
  }
}

const std::vector<std::size_t>& Dataset::indices(SplitPart part) const {
  switch (part) {
    case SplitPart::train: return split.train;
    case SplitPart::val: return split.val;
    case SplitPart::test: return split.test;
  }
  return split.test;
}

void Dataset::validate() const {
  std::vector<int> seen(graphs.size(), 0);
  for (const auto* part : {&split.train, &split.val, &split.test}) {
    for (std::size_t i : *part) {
      if (i >= graphs.size()) throw ValidationError("split index " + std::to_string(i) + " out of range");
      if (seen[i]++) throw ValidationError("split index " + std::to_string(i) + " appears twice");
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw ValidationError("graph " + std::to_string(i) + " missing from split");
  }
}

EdgeNeighborhoodIndex edge_neighbors(const Graph& graph) {
  std::vector<std::vector<std::size_t>> incident(graph.num_nodes());
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    incident[graph.edge(e).src].push_back(e);
    if (graph.edge(e).dst != graph.edge(e).src) incident[graph.edge(e).dst].push_back(e);
  }
  EdgeNeighborhoodIndex out(graph.num_edges());
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const std::size_t rev = graph.reverse(e);
    auto& nbrs = out[e];
    for (std::uint32_t node : {graph.edge(e).src, graph.edge(e).dst}) {
      for (std::size_t f : incident[node]) {
        if (f != e && f != rev) nbrs.push_back(f);
      }
    }
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return out;
}

std::vector<double> symmetrize(const Graph& graph, std::span<const double> values) {
  check_aligned(graph, values.size());
  std::vector<double> out(values.size());
  for (std::size_t e = 0; e < values.size(); ++e) {
    const std::size_t r = graph.reverse(e);
    // Fixed operand order keeps the pair bit-identical.
    out[e] = e < r ? 0.5 * (values[e] + values[r]) : 0.5 * (values[r] + values[e]);
  }
  return out;
}

EdgeMask symmetrize_mask(const Graph& graph, const EdgeMask& mask) {
  return EdgeMask(symmetrize(graph, mask.values()));
}

namespace {

using UndirectedEdge = std::pair<std::uint32_t, std::uint32_t>;

// Preferential attachment with one edge per new node.
std::vector<UndirectedEdge> ba_tree(std::size_t n, RngStream& rng) {
  std::vector<UndirectedEdge> edges;
  if (n < 2) return edges;
  std::vector<std::uint32_t> endpoints;  // node repeated once per unit of degree
  edges.emplace_back(0, 1);
  endpoints = {0, 1};
  for (std::uint32_t v = 2; v < n; ++v) {
    const std::uint32_t target = endpoints[rng.below(endpoints.size())];
    edges.emplace_back(target, v);
    endpoints.push_back(target);
    endpoints.push_back(v);
  }
  return edges;
}

}  // namespace

Dataset generate_ba2motifs(std::size_t n_graphs, std::uint64_t seed, const Ba2MotifsParams& params) {
  if (n_graphs < 2) throw ConfigError("n_graphs must be >= 2");
  if (params.base_size < 2) throw ConfigError("base_size must be >= 2");
  if (params.feature_dim == 0) throw ConfigError("feature_dim must be >= 1");
  if (!(params.house_fraction >= 0.0 && params.house_fraction <= 1.0)) {
    throw ConfigError("house_fraction must lie in [0,1]");
  }
  if (!(params.train_fraction > 0.0 && params.val_fraction >= 0.0 &&
        params.train_fraction + params.val_fraction <= 1.0)) {
    throw ConfigError("split fractions must be positive and sum to at most 1");
  }

  RngStream root(seed);
  RngStream label_rng = root.child(0);
  const std::size_t n_house =
      static_cast<std::size_t>(std::llround(params.house_fraction * static_cast<double>(n_graphs)));
  std::vector<int> labels(n_graphs, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_house), 1);
  for (std::size_t i = n_graphs; i > 1; --i) std::swap(labels[i - 1], labels[label_rng.below(i)]);

  static const std::vector<UndirectedEdge> kHouse = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {2, 4}, {3, 4}};
  static const std::vector<UndirectedEdge> kCycle = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}};

  Dataset ds;
  ds.graphs.reserve(n_graphs);
  for (std::size_t g = 0; g < n_graphs; ++g) {
    RngStream rng = root.child(g + 1);
    const std::size_t base = params.base_size;
    const std::size_t n = base + 5;
    std::vector<UndirectedEdge> und = ba_tree(base, rng);
    std::vector<std::uint8_t> und_gt(und.size(), 0);
    const auto& motif = labels[g] == 1 ? kHouse : kCycle;
    for (const auto& [a, b] : motif) {
      und.emplace_back(static_cast<std::uint32_t>(base + a), static_cast<std::uint32_t>(base + b));
      und_gt.push_back(1);
    }
    const auto anchor = static_cast<std::uint32_t>(rng.below(base));
    const auto entry = static_cast<std::uint32_t>(base + rng.below(5));
    und.emplace_back(anchor, entry);
    und_gt.push_back(0);

    std::vector<Edge> edges;
    std::vector<std::uint8_t> gt;
    for (std::size_t k = 0; k < und.size(); ++k) {
      edges.push_back({und[k].first, und[k].second});
      edges.push_back({und[k].second, und[k].first});
      gt.push_back(und_gt[k]);
      gt.push_back(und_gt[k]);
    }
    ds.graphs.emplace_back(n, DenseMatrix(n, params.feature_dim, 1.0), std::move(edges),
                           std::move(gt), labels[g]);
  }

  RngStream split_rng = root.child(n_graphs + 1);
  std::vector<std::size_t> order(n_graphs);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n_graphs; i > 1; --i) std::swap(order[i - 1], order[split_rng.below(i)]);
  const auto n_train = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(params.train_fraction * static_cast<double>(n_graphs))));
  const auto n_val = std::min(
      n_graphs - n_train,
      static_cast<std::size_t>(std::floor(params.val_fraction * static_cast<double>(n_graphs))));
  ds.split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  ds.split.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                      order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  ds.split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  for (auto* part : {&ds.split.train, &ds.split.val, &ds.split.test}) std::sort(part->begin(), part->end());
  return ds;
}

nlohmann::json dataset_to_json(const Dataset& dataset) {
  nlohmann::json graphs = nlohmann::json::array();
  for (const auto& g : dataset.graphs) {
    nlohmann::json features = nlohmann::json::array();
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      auto row = g.features().row(i);
      features.push_back(std::vector<double>(row.begin(), row.end()));
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.edges()) edges.push_back({e.src, e.dst});
    nlohmann::json gt = nullptr;
    if (g.gt_edge_labels()) {
      gt = nlohmann::json::array();
      for (auto v : *g.gt_edge_labels()) gt.push_back(static_cast<int>(v));
    }
    graphs.push_back({{"num_nodes", g.num_nodes()},
                      {"features", std::move(features)},
                      {"edges", std::move(edges)},
                      {"gt_edge_labels", std::move(gt)},
                      {"label", g.label()}});
  }
  return {{"version", 1},
          {"graphs", std::move(graphs)},
          {"split",
           {{"train", dataset.split.train}, {"val", dataset.split.val}, {"test", dataset.split.test}}}};
}

namespace {

Graph graph_from_json(const nlohmann::json& j) {
  const auto n = j.at("num_nodes").get<std::size_t>();
  const auto& feats = j.at("features");
  if (!feats.is_array() || feats.size() != n) throw ParseError("features must have num_nodes rows");
  const std::size_t dim = n > 0 ? feats.at(0).size() : 0;
  DenseMatrix features(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = feats.at(i);
    if (!row.is_array() || row.size() != dim) throw ParseError("ragged feature row " + std::to_string(i));
    for (std::size_t k = 0; k < dim; ++k) features(i, k) = row.at(k).get<double>();
  }
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw ParseError("edge entries must be [src,dst] pairs");
    edges.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>()});
  }
  std::optional<std::vector<std::uint8_t>> gt;
  if (const auto& jg = j.at("gt_edge_labels"); !jg.is_null()) {
    gt.emplace();
    for (const auto& v : jg) gt->push_back(v.get<std::uint8_t>());
  }
  return Graph(n, std::move(features), std::move(edges), std::move(gt), j.at("label").get<int>());
}

}  // namespace

Dataset dataset_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("version").get<int>() != 1) throw ParseError("unsupported dataset version");
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("dataset header: ") + ex.what());
  }
  if (!doc.contains("graphs") || !doc["graphs"].is_array()) throw ParseError("missing graphs array");
  Dataset ds;
  const auto& graphs = doc["graphs"];
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    try {
      ds.graphs.push_back(graph_from_json(graphs[i]));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError("graph record " + std::to_string(i) + ": " + ex.what());
    } catch (const ParseError& ex) {
      throw ParseError("graph record " + std::to_string(i) + ": " + ex.what());
    } catch (const Error& ex) {
      throw ValidationError("graph record " + std::to_string(i) + ": " + ex.what());
    }
  }
  try {
    const auto& split = doc.at("split");
    ds.split.train = split.at("train").get<std::vector<std::size_t>>();
    ds.split.val = split.at("val").get<std::vector<std::size_t>>();
    ds.split.test = split.at("test").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("split record: ") + ex.what());
  }
  ds.validate();
  return ds;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path,
                  const nlohmann::json& provenance) {
  auto doc = dataset_to_json(dataset);
  if (!provenance.is_null()) doc["provenance"] = provenance;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << doc.dump() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(path.string() + ": " + ex.what());
  }
  return dataset_from_json(doc);
}

}  // namespace sdlab
