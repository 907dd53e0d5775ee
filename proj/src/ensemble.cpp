#include "sdlab/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "sdlab/calibration.hpp"
#include "sdlab/consistency.hpp"
#include "sdlab/errors.hpp"

namespace sdlab {

void ModelPool::validate() const {
  if (models.size() < 2) throw PreconditionError("model pool needs at least two models");
  for (const auto& m : models) {
    if (!(m.arch == models.front().arch)) throw ValidationError("pool models must share one architecture");
  }
}

EdgeMask ee_aggregate(std::span<const EdgeMask> masks, double lambda) {
  if (masks.size() < 2) throw PreconditionError("ensemble needs at least two masks");
  if (!(lambda >= 0.0)) throw PreconditionError("lambda must be >= 0");
  const std::size_t n = masks.front().size();
  for (const auto& m : masks) {
    if (m.size() != n) throw AlignmentError("ensemble masks differ in length");
  }
  const double k = static_cast<double>(masks.size());
  std::vector<double> out(n);
  for (std::size_t e = 0; e < n; ++e) {
    // Sum in sorted order so the result does not depend on pool order.
    std::vector<double> v(masks.size());
    for (std::size_t i = 0; i < masks.size(); ++i) v[i] = masks[i][e];
    std::sort(v.begin(), v.end());
    // Unanimous members pass through exactly.
    if (v.front() == v.back()) {
      out[e] = v.front();
      continue;
    }
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= k;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / k);
    out[e] = std::clamp(mean * std::max(0.0, 1.0 - lambda * sd), 0.0, v.back());
  }
  return EdgeMask(std::move(out));
}

EdgeMask ee_calibrate(const ModelPool& pool, const Graph& graph, double lambda) {
  pool.validate();
  std::vector<EdgeMask> masks;
  for (const auto& m : pool.models) masks.push_back(compute_edge_scores(m, graph, EdgeMask::ones(graph.num_edges())));
  return ee_aggregate(masks, lambda);
}

EdgeMask sd_then_ee(const ModelPool& pool, const Graph& graph, double eta, double lambda) {
  pool.validate();
  std::vector<EdgeMask> masks;
  for (const auto& m : pool.models) {
    const auto rec = re_explain(m, graph);
    masks.push_back(self_denoise(rec.m1, rec.delta_s, eta));
  }
  return ee_aggregate(masks, lambda);
}

}  // namespace sdlab
