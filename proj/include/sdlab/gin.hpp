#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sdlab/graph.hpp"
#include "sdlab/mlp.hpp"

namespace sdlab {

/// h_i' = mlp((1 + eps) h_i + sum over edges (j -> i) of w_ji h_j)
struct GinLayerParams {
  double eps = 0.0;
  MlpParams mlp;
  friend bool operator==(const GinLayerParams&, const GinLayerParams&) = default;
};

struct GinCache {
  DenseMatrix input;
  std::vector<Edge> edges;
  std::vector<double> weights;
  MlpCache mlp;
};

struct GinForward {
  DenseMatrix output;
  GinCache cache;
};

struct GinBackward {
  GinLayerParams grads;
  DenseMatrix grad_input;
  std::vector<double> grad_edge_weights;
};

GinForward gin_layer_forward(const GinLayerParams& params, const DenseMatrix& node_feats,
                             std::span<const Edge> edges, std::span<const double> edge_weights,
                             std::optional<DropoutSpec> dropout = std::nullopt);
GinBackward gin_layer_backward(const GinLayerParams& params, const GinCache& cache,
                               const DenseMatrix& grad_out);

GinLayerParams zeros_like(const GinLayerParams& params);

}  // namespace sdlab
