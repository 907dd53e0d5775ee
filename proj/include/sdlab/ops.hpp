#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sdlab/dense.hpp"
#include "sdlab/rng.hpp"

namespace sdlab {

/// Column means over nodes. Throws PreconditionError on an empty graph.
std::vector<double> pool_mean(const DenseMatrix& node_feats);
DenseMatrix pool_mean_backward(std::span<const double> grad, std::size_t num_nodes);

double sigmoid(double x);
std::vector<double> softmax(std::span<const double> logits);

/// sigma((log u - log(1 - u) + logit) / tau) with u ~ Uniform(0, 1).
std::vector<double> gumbel_sigmoid(std::span<const double> logits, double tau, RngStream& rng);
/// Same map with caller-supplied uniforms (one per logit).
std::vector<double> gumbel_sigmoid(std::span<const double> logits, double tau,
                                   std::span<const double> uniforms);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  long step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

AdamState make_adam(const std::vector<std::span<double>>& params, AdamConfig config = {});
void adam_step(AdamState& state, const std::vector<std::span<double>>& params,
               const std::vector<std::span<double>>& grads);

/// Central differences, one coordinate at a time.
std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& fn,
                                     std::span<const double> point, double step = 1e-5);

/// |a - b| / max(1, |a|): the comparison used by every gradient check.
double relative_error(double analytic, double numeric);

}  // namespace sdlab
