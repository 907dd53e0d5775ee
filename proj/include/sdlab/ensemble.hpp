#pragma once

#include <span>
#include <vector>

#include "sdlab/graph.hpp"
#include "sdlab/model.hpp"

namespace sdlab {

/// Models sharing one architecture, trained under distinct seeds.
struct ModelPool {
  std::vector<SiGnnModel> models;
  std::vector<std::uint64_t> seeds;

  void validate() const;
};

/// Cross-model aggregation: per-edge mean damped by the population standard
/// deviation across models, mean * max(0, 1 - lambda * std). This is an
/// approximation of explanation ensembling, not the published algorithm.
EdgeMask ee_aggregate(std::span<const EdgeMask> masks, double lambda = 1.0);

/// First-pass explanations of every pool member, aggregated.
EdgeMask ee_calibrate(const ModelPool& pool, const Graph& graph, double lambda = 1.0);

/// Self-denoise each member's explanation first, then aggregate.
EdgeMask sd_then_ee(const ModelPool& pool, const Graph& graph, double eta, double lambda = 1.0);

}  // namespace sdlab
