#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "sdlab/dense.hpp"

namespace sdlab {

struct Edge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed graph in which every edge has its reverse stored at a known index.
/// Immutable after construction; the constructor enforces all invariants.
class Graph {
 public:
  Graph(std::size_t num_nodes, DenseMatrix features, std::vector<Edge> edges,
        std::optional<std::vector<std::uint8_t>> gt_edge_labels, int label);

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::size_t feature_dim() const noexcept { return features_.cols(); }
  const DenseMatrix& features() const noexcept { return features_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }
  std::size_t reverse(std::size_t e) const { return reverse_[e]; }
  bool has_ground_truth() const noexcept { return gt_.has_value(); }
  const std::optional<std::vector<std::uint8_t>>& gt_edge_labels() const noexcept { return gt_; }
  int label() const noexcept { return label_; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.num_nodes_ == b.num_nodes_ && a.features_ == b.features_ && a.edges_ == b.edges_ &&
           a.gt_ == b.gt_ && a.label_ == b.label_;
  }

 private:
  std::size_t num_nodes_;
  DenseMatrix features_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> reverse_;
  std::optional<std::vector<std::uint8_t>> gt_;
  int label_;
};

/// Per-edge importance scores in [0, 1], aligned with a graph's edge list.
class EdgeMask {
 public:
  EdgeMask() = default;
  explicit EdgeMask(std::vector<double> values);

  static EdgeMask ones(std::size_t n) { return EdgeMask(std::vector<double>(n, 1.0)); }
  static EdgeMask zeros(std::size_t n) { return EdgeMask(std::vector<double>(n, 0.0)); }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const EdgeMask&, const EdgeMask&) = default;

 private:
  std::vector<double> values_;
};

void check_aligned(const Graph& graph, std::size_t mask_size);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
  friend bool operator==(const Split&, const Split&) = default;
};

enum class SplitPart { train, val, test };

struct Dataset {
  std::vector<Graph> graphs;
  Split split;

  const std::vector<std::size_t>& indices(SplitPart part) const;
  /// Throws ValidationError unless the split partitions all graph indices.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// N(e): edges sharing an endpoint with e, excluding e and its reverse.
using EdgeNeighborhoodIndex = std::vector<std::vector<std::size_t>>;

EdgeNeighborhoodIndex edge_neighbors(const Graph& graph);

/// Averages each directed pair so (i,j) and (j,i) carry the same value.
EdgeMask symmetrize_mask(const Graph& graph, const EdgeMask& mask);
std::vector<double> symmetrize(const Graph& graph, std::span<const double> values);

struct Ba2MotifsParams {
  std::size_t base_size = 20;
  /// Fraction of graphs carrying the house motif (class 1).
  double house_fraction = 0.5;
  std::size_t feature_dim = 4;
  double train_fraction = 0.8;
  double val_fraction = 0.1;
};

/// Barabasi-Albert tree (m = 1) with a house (label 1) or 5-cycle (label 0)
/// attached by one bridge edge. Ground truth marks motif-internal edges only.
Dataset generate_ba2motifs(std::size_t n_graphs, std::uint64_t seed,
                           const Ba2MotifsParams& params = {});

nlohmann::json dataset_to_json(const Dataset& dataset);
/// Parse errors name the offending graph record.
Dataset dataset_from_json(const nlohmann::json& doc);

/// `provenance`, when non-null, is stored alongside the graphs and ignored on load.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path,
                  const nlohmann::json& provenance = nullptr);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace sdlab
