#pragma once

#include <cstdint>
#include <vector>

#include "sdlab/graph.hpp"
#include "sdlab/model.hpp"
#include "sdlab/rng.hpp"

namespace sdlab::testing {

/// Undirected pairs expanded to (u,v),(v,u) in order; features drawn from rng.
inline Graph make_graph(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
                        std::size_t feature_dim, RngStream& rng, int label = 0,
                        std::vector<std::uint8_t> gt_pairs = {}) {
  DenseMatrix x(n, feature_dim);
  for (auto& v : x.data()) v = rng.uniform(-1.0, 1.0);
  std::vector<Edge> edges;
  std::vector<std::uint8_t> gt;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    edges.push_back({pairs[k].first, pairs[k].second});
    edges.push_back({pairs[k].second, pairs[k].first});
    if (!gt_pairs.empty()) {
      gt.push_back(gt_pairs[k]);
      gt.push_back(gt_pairs[k]);
    }
  }
  std::optional<std::vector<std::uint8_t>> labels;
  if (!gt_pairs.empty()) labels = std::move(gt);
  return Graph(n, std::move(x), std::move(edges), std::move(labels), label);
}

/// Connected random graph: a random tree plus `extra` chords.
inline Graph random_graph(std::size_t n, std::size_t extra, std::size_t feature_dim, RngStream& rng,
                          bool with_gt = false) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t v = 1; v < n; ++v) pairs.emplace_back(static_cast<std::uint32_t>(rng.below(v)), v);
  for (std::size_t k = 0; k < extra; ++k) {
    auto a = static_cast<std::uint32_t>(rng.below(n));
    auto b = static_cast<std::uint32_t>(rng.below(n));
    if (a == b) continue;
    bool dup = false;
    for (auto [u, v] : pairs) dup = dup || (u == a && v == b) || (u == b && v == a);
    if (!dup) pairs.emplace_back(a, b);
  }
  std::vector<std::uint8_t> gt;
  if (with_gt) {
    for (std::size_t k = 0; k < pairs.size(); ++k) gt.push_back(k % 3 == 0 ? 1 : 0);
  }
  return make_graph(n, pairs, feature_dim, rng, static_cast<int>(rng.below(2)), gt);
}

inline ArchDescriptor tiny_arch(std::size_t feature_dim = 3) {
  ArchDescriptor a;
  a.feature_dim = feature_dim;
  a.encoder_dims = {5, 4};
  a.explainer_dims = {6, 1};
  a.classifier_dims = {5, 2};
  return a;
}

inline std::vector<double> random_unit_vector(std::size_t n, RngStream& rng, double lo = 0.05, double hi = 0.95) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace sdlab::testing
