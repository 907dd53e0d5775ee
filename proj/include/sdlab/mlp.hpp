#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sdlab/dense.hpp"
#include "sdlab/rng.hpp"

namespace sdlab {

enum class Activation { relu, sigmoid, identity };

/// weight is (out x in); y = act(x W^T + b).
struct DenseLayer {
  DenseMatrix weight;
  std::vector<double> bias;
  Activation activation = Activation::identity;
  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct MlpParams {
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().weight.cols(); }
  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().weight.rows(); }
  /// Throws ShapeError if consecutive layers do not chain.
  void validate() const;

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

/// Inverted dropout on hidden-layer outputs (never on the final layer).
struct DropoutSpec {
  double rate = 0.0;
  RngStream* rng = nullptr;
};

struct MlpCache {
  std::vector<DenseMatrix> inputs;
  std::vector<DenseMatrix> pre_activations;
  std::vector<DenseMatrix> dropout_scale;  // empty matrix when no dropout on that layer
};

struct MlpForward {
  DenseMatrix output;
  MlpCache cache;
};

struct MlpBackward {
  MlpParams grads;
  DenseMatrix grad_input;
};

MlpForward mlp_forward(const MlpParams& params, const DenseMatrix& input,
                       std::optional<DropoutSpec> dropout = std::nullopt);
MlpBackward mlp_backward(const MlpParams& params, const MlpCache& cache,
                         const DenseMatrix& grad_output);

/// dims = {in, h1, ..., out}; hidden layers use `hidden`, the last layer `last`.
MlpParams make_mlp(const std::vector<std::size_t>& dims, Activation hidden, Activation last,
                   RngStream& rng);
MlpParams zeros_like(const MlpParams& params);
void accumulate(MlpParams& into, const MlpParams& grads, double scale = 1.0);

double apply_activation(Activation act, double z);
double activation_derivative(Activation act, double z);

}  // namespace sdlab
