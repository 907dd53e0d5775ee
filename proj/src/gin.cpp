#include "sdlab/gin.hpp"

#include <string>

#include "sdlab/errors.hpp"

namespace sdlab {

GinForward gin_layer_forward(const GinLayerParams& params, const DenseMatrix& node_feats,
                             std::span<const Edge> edges, std::span<const double> edge_weights,
                             std::optional<DropoutSpec> dropout) {
  if (edge_weights.size() != edges.size()) {
    throw AlignmentError("edge weight count " + std::to_string(edge_weights.size()) +
                         " != edge count " + std::to_string(edges.size()));
  }
  const std::size_t n = node_feats.rows();
  const std::size_t d = node_feats.cols();
  DenseMatrix agg(n, d);
  const double self = 1.0 + params.eps;
  for (std::size_t i = 0; i < agg.size(); ++i) agg.data()[i] = self * node_feats.data()[i];
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [j, i] = edges[e];
    if (i >= n || j >= n) throw ShapeError("edge " + std::to_string(e) + " out of node range");
    const double w = edge_weights[e];
    if (w == 0.0) continue;
    auto src = node_feats.row(j);
    auto dst = agg.row(i);
    for (std::size_t k = 0; k < d; ++k) dst[k] += w * src[k];
  }
  auto mlp = mlp_forward(params.mlp, agg, dropout);
  GinForward fwd;
  fwd.output = std::move(mlp.output);
  fwd.cache.input = node_feats;
  fwd.cache.edges.assign(edges.begin(), edges.end());
  fwd.cache.weights.assign(edge_weights.begin(), edge_weights.end());
  fwd.cache.mlp = std::move(mlp.cache);
  return fwd;
}

GinBackward gin_layer_backward(const GinLayerParams& params, const GinCache& cache,
                               const DenseMatrix& grad_out) {
  auto mlp = mlp_backward(params.mlp, cache.mlp, grad_out);
  const DenseMatrix& dagg = mlp.grad_input;
  const DenseMatrix& h = cache.input;
  const std::size_t d = h.cols();

  GinBackward back;
  back.grads.mlp = std::move(mlp.grads);
  back.grad_input = DenseMatrix(h.rows(), d);
  const double self = 1.0 + params.eps;
  double deps = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    deps += dagg.data()[i] * h.data()[i];
    back.grad_input.data()[i] = self * dagg.data()[i];
  }
  back.grads.eps = deps;
  back.grad_edge_weights.assign(cache.edges.size(), 0.0);
  for (std::size_t e = 0; e < cache.edges.size(); ++e) {
    const auto [j, i] = cache.edges[e];
    auto g = dagg.row(i);
    auto src = h.row(j);
    auto gsrc = back.grad_input.row(j);
    const double w = cache.weights[e];
    double dot = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      dot += g[k] * src[k];
      gsrc[k] += w * g[k];
    }
    back.grad_edge_weights[e] = dot;
  }
  return back;
}

GinLayerParams zeros_like(const GinLayerParams& params) { return {0.0, zeros_like(params.mlp)}; }

}  // namespace sdlab
