#include "sdlab/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdlab/errors.hpp"

namespace sdlab {

std::vector<double> pool_mean(const DenseMatrix& node_feats) {
  if (node_feats.rows() == 0) throw PreconditionError("pool_mean of an empty graph");
  std::vector<double> out(node_feats.cols(), 0.0);
  for (std::size_t i = 0; i < node_feats.rows(); ++i) {
    auto row = node_feats.row(i);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += row[k];
  }
  const double inv = 1.0 / static_cast<double>(node_feats.rows());
  for (auto& v : out) v *= inv;
  return out;
}

DenseMatrix pool_mean_backward(std::span<const double> grad, std::size_t num_nodes) {
  DenseMatrix out(num_nodes, grad.size());
  const double inv = 1.0 / static_cast<double>(num_nodes);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    for (std::size_t k = 0; k < grad.size(); ++k) out(i, k) = grad[k] * inv;
  }
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double mx = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (auto& v : p) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : p) v /= sum;
  return p;
}

std::vector<double> gumbel_sigmoid(std::span<const double> logits, double tau,
                                   std::span<const double> uniforms) {
  if (!(tau > 0.0)) throw PreconditionError("gumbel_sigmoid temperature must be > 0");
  if (uniforms.size() != logits.size()) throw ShapeError("one uniform draw per logit required");
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double u = uniforms[i];
    const double noise = std::log(u) - std::log1p(-u);
    // Stay strictly inside (0,1) even when the argument saturates.
    out[i] = std::clamp(sigmoid((noise + logits[i]) / tau), 1e-12, 1.0 - 1e-12);
  }
  return out;
}

std::vector<double> gumbel_sigmoid(std::span<const double> logits, double tau, RngStream& rng) {
  if (!(tau > 0.0)) throw PreconditionError("gumbel_sigmoid temperature must be > 0");
  std::vector<double> u(logits.size());
  for (auto& x : u) x = rng.uniform_open();
  return gumbel_sigmoid(logits, tau, u);
}

AdamState make_adam(const std::vector<std::span<double>>& params, AdamConfig config) {
  AdamState s;
  s.config = config;
  for (const auto& p : params) {
    s.m.emplace_back(p.size(), 0.0);
    s.v.emplace_back(p.size(), 0.0);
  }
  return s;
}

void adam_step(AdamState& state, const std::vector<std::span<double>>& params,
               const std::vector<std::span<double>>& grads) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw ShapeError("adam: parameter/gradient group count mismatch");
  }
  for (std::size_t g = 0; g < params.size(); ++g) {
    if (params[g].size() != grads[g].size() || params[g].size() != state.m[g].size()) {
      throw ShapeError("adam: group " + std::to_string(g) + " shape mismatch");
    }
  }
  const auto& c = state.config;
  ++state.step;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t g = 0; g < params.size(); ++g) {
    auto& m = state.m[g];
    auto& v = state.v[g];
    for (std::size_t i = 0; i < params[g].size(); ++i) {
      const double grad = grads[g][i];
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * grad;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * grad * grad;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      params[g][i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
  }
}

std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& fn,
                                     std::span<const double> point, double step) {
  if (!(step > 0.0)) throw PreconditionError("finite difference step must be > 0");
  std::vector<double> x(point.begin(), point.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + step;
    const double fp = fn(x);
    x[i] = orig - step;
    const double fm = fn(x);
    x[i] = orig;
    grad[i] = (fp - fm) / (2.0 * step);
  }
  return grad;
}

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic));
}

}  // namespace sdlab
