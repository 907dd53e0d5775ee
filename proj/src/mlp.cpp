#include "sdlab/mlp.hpp"

#include <cmath>
#include <string>

#include "sdlab/errors.hpp"

namespace sdlab {

double apply_activation(Activation act, double z) {
  switch (act) {
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::identity: return z;
  }
  return z;
}

double activation_derivative(Activation act, double z) {
  switch (act) {
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
    case Activation::identity: return 1.0;
  }
  return 1.0;
}

void MlpParams::validate() const {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.bias.size() != layer.weight.rows()) {
      throw ShapeError("layer " + std::to_string(l) + " bias length != output dim");
    }
    if (l > 0 && layer.weight.cols() != layers[l - 1].weight.rows()) {
      throw ShapeError("layer " + std::to_string(l) + " input dim does not chain");
    }
  }
}

MlpForward mlp_forward(const MlpParams& params, const DenseMatrix& input,
                       std::optional<DropoutSpec> dropout) {
  if (params.layers.empty()) return {input, {}};
  if (input.cols() != params.input_dim()) {
    throw ShapeError("mlp input has " + std::to_string(input.cols()) + " columns, expected " +
                     std::to_string(params.input_dim()));
  }
  MlpForward fwd;
  auto& cache = fwd.cache;
  const std::size_t n_layers = params.layers.size();
  cache.inputs.reserve(n_layers);
  cache.pre_activations.reserve(n_layers);
  cache.dropout_scale.resize(n_layers);

  DenseMatrix x = input;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto& layer = params.layers[l];
    const std::size_t rows = x.rows();
    const std::size_t in = layer.weight.cols();
    const std::size_t out = layer.weight.rows();
    DenseMatrix z(rows, out);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* xr = x.data().data() + r * in;
      for (std::size_t o = 0; o < out; ++o) {
        const double* w = layer.weight.data().data() + o * in;
        double acc = layer.bias[o];
        for (std::size_t k = 0; k < in; ++k) acc += xr[k] * w[k];
        z(r, o) = acc;
      }
    }
    DenseMatrix a(rows, out);
    for (std::size_t i = 0; i < z.size(); ++i) a.data()[i] = apply_activation(layer.activation, z.data()[i]);
    if (dropout && dropout->rate > 0.0 && l + 1 < n_layers) {
      DenseMatrix scale(rows, out);
      const double keep = 1.0 - dropout->rate;
      for (std::size_t i = 0; i < scale.size(); ++i) {
        scale.data()[i] = dropout->rng->uniform() < keep ? 1.0 / keep : 0.0;
        a.data()[i] *= scale.data()[i];
      }
      cache.dropout_scale[l] = std::move(scale);
    }
    cache.inputs.push_back(std::move(x));
    cache.pre_activations.push_back(std::move(z));
    x = std::move(a);
  }
  fwd.output = std::move(x);
  return fwd;
}

MlpBackward mlp_backward(const MlpParams& params, const MlpCache& cache,
                         const DenseMatrix& grad_output) {
  MlpBackward back;
  back.grads = zeros_like(params);
  if (params.layers.empty()) {
    back.grad_input = grad_output;
    return back;
  }
  if (cache.inputs.size() != params.layers.size()) throw ShapeError("mlp cache does not match params");
  const auto& last_pre = cache.pre_activations.back();
  if (grad_output.rows() != last_pre.rows() || grad_output.cols() != last_pre.cols()) {
    throw ShapeError("mlp grad_output shape mismatch");
  }

  DenseMatrix grad = grad_output;
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const auto& layer = params.layers[l];
    const auto& z = cache.pre_activations[l];
    const auto& x = cache.inputs[l];
    const std::size_t rows = z.rows();
    const std::size_t in = layer.weight.cols();
    const std::size_t out = layer.weight.rows();

    DenseMatrix dz(rows, out);
    const auto& drop = cache.dropout_scale[l];
    for (std::size_t i = 0; i < dz.size(); ++i) {
      double g = grad.data()[i];
      if (drop.size() != 0) g *= drop.data()[i];
      dz.data()[i] = g * activation_derivative(layer.activation, z.data()[i]);
    }
    auto& gw = back.grads.layers[l].weight;
    auto& gb = back.grads.layers[l].bias;
    DenseMatrix dx(rows, in);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* xr = x.data().data() + r * in;
      double* dxr = dx.data().data() + r * in;
      for (std::size_t o = 0; o < out; ++o) {
        const double d = dz(r, o);
        if (d == 0.0) continue;
        gb[o] += d;
        double* gwo = gw.data().data() + o * in;
        const double* wo = layer.weight.data().data() + o * in;
        for (std::size_t k = 0; k < in; ++k) {
          gwo[k] += d * xr[k];
          dxr[k] += d * wo[k];
        }
      }
    }
    grad = std::move(dx);
  }
  back.grad_input = std::move(grad);
  return back;
}

MlpParams make_mlp(const std::vector<std::size_t>& dims, Activation hidden, Activation last,
                   RngStream& rng) {
  if (dims.size() < 2) throw ConfigError("mlp needs at least input and output dims");
  MlpParams p;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::size_t in = dims[l];
    const std::size_t out = dims[l + 1];
    if (in == 0 || out == 0) throw ConfigError("mlp dims must be positive");
    DenseLayer layer;
    layer.weight = DenseMatrix(out, in);
    // Kaiming-uniform style bound, as in common deep-learning defaults.
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (auto& w : layer.weight.data()) w = rng.uniform(-bound, bound);
    layer.bias.resize(out);
    for (auto& b : layer.bias) b = rng.uniform(-bound, bound);
    layer.activation = l + 2 == dims.size() ? last : hidden;
    p.layers.push_back(std::move(layer));
  }
  return p;
}

MlpParams zeros_like(const MlpParams& params) {
  MlpParams z;
  z.layers.reserve(params.layers.size());
  for (const auto& layer : params.layers) {
    z.layers.push_back({DenseMatrix(layer.weight.rows(), layer.weight.cols()),
                        std::vector<double>(layer.bias.size(), 0.0), layer.activation});
  }
  return z;
}

void accumulate(MlpParams& into, const MlpParams& grads, double scale) {
  for (std::size_t l = 0; l < into.layers.size(); ++l) {
    auto& w = into.layers[l].weight.data();
    const auto& gw = grads.layers[l].weight.data();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += scale * gw[i];
    auto& b = into.layers[l].bias;
    const auto& gb = grads.layers[l].bias;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += scale * gb[i];
  }
}

}  // namespace sdlab
