#include "sdlab/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sdlab/errors.hpp"
#include "sdlab/metrics.hpp"

namespace sdlab {

EdgeMask self_denoise(const EdgeMask& m1, std::span<const double> delta_s, double eta) {
  if (!(eta >= 0.0)) throw PreconditionError("eta must be >= 0");
  if (delta_s.size() != m1.size()) throw AlignmentError("self_denoise: delta_s length mismatch");
  std::vector<double> out(m1.size());
  for (std::size_t e = 0; e < out.size(); ++e) {
    out[e] = std::max(0.0, (1.0 - eta * delta_s[e]) * m1[e]);
  }
  return EdgeMask(std::move(out));
}

std::optional<double> ranking_correction_threshold(double m_plus, double m_minus, double ds_plus,
                                                   double ds_minus) {
  if (!(m_plus < m_minus)) throw PreconditionError("pair is not mis-ranked (need m_plus < m_minus)");
  if (!(ds_minus > ds_plus)) throw PreconditionError("unimportant edge must be less stable (ds_minus > ds_plus)");
  const double denom = m_minus * ds_minus - m_plus * ds_plus;
  if (!(denom > 0.0)) return std::nullopt;
  return (m_minus - m_plus) / denom;
}

double damping_mass(const EdgeMask& m1, std::span<const double> delta_s) {
  if (delta_s.size() != m1.size()) throw AlignmentError("damping_mass: length mismatch");
  double s = 0.0;
  for (std::size_t e = 0; e < m1.size(); ++e) s += m1[e] * delta_s[e];
  return s;
}

double stability_eta_bound_deterministic(const SiGnnModel& model, const Graph& graph, const EdgeMask& m1,
                                         std::span<const double> delta_s, double epsilon) {
  if (!(epsilon > 0.0)) throw PreconditionError("epsilon must be > 0");
  check_aligned(graph, m1.size());
  const double mass = damping_mass(m1, delta_s);
  if (mass == 0.0) return kUnbounded;
  const int cls = predict(model, graph, m1).predicted;
  const auto grad = prediction_mask_gradient(model, graph, m1.values(), cls);
  double gmax = 0.0;
  for (double g : grad) gmax = std::max(gmax, std::abs(g));
  if (gmax == 0.0) return kUnbounded;
  return epsilon / (gmax * mass);
}

double stability_eta_bound_stochastic(const EdgeMask& m1, std::span<const double> delta_s, double epsilon) {
  if (!(epsilon > 0.0)) throw PreconditionError("epsilon must be > 0");
  const double mass = damping_mass(m1, delta_s);
  if (mass == 0.0) return kUnbounded;
  return epsilon / mass;
}

StochasticShift stochastic_prediction_shift(const SiGnnModel& model, const Graph& graph,
                                            const EdgeMask& m1, const EdgeMask& calibrated, int cls,
                                            std::size_t samples, const RngStream& stream, Exec exec) {
  check_aligned(graph, m1.size());
  check_aligned(graph, calibrated.size());
  if (samples < 2) throw PreconditionError("need at least two Monte Carlo samples");
  std::vector<double> fa(samples), fb(samples);
  const RngStream stream_a = stream.child(0);
  const RngStream stream_b = stream.child(1);
  const auto c = static_cast<std::size_t>(cls);
  for_each_index(samples, exec, [&](std::size_t k) {
    std::vector<double> x(graph.num_edges());
    RngStream ra = stream_a.child(k);
    for (std::size_t e = 0; e < x.size(); ++e) x[e] = ra.bernoulli(calibrated[e]) ? 1.0 : 0.0;
    fa[k] = predict_weights(model, graph, x).probs.at(c);
    RngStream rb = stream_b.child(k);
    for (std::size_t e = 0; e < x.size(); ++e) x[e] = rb.bernoulli(m1[e]) ? 1.0 : 0.0;
    fb[k] = predict_weights(model, graph, x).probs.at(c);
  });
  auto moments = [](const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, ss / (n - 1.0)};
  };
  const auto [ma, va] = moments(fa);
  const auto [mb, vb] = moments(fb);
  const double n = static_cast<double>(samples);
  return {ma, mb, std::abs(ma - mb), std::sqrt(va / n + vb / n)};
}

void SdConfig::validate() const {
  if (!(eta >= 0.0)) throw ConfigError("eta must be >= 0");
  if (eta_grid.empty()) throw ConfigError("eta grid must be non-empty");
  if (std::find(eta_grid.begin(), eta_grid.end(), 0.0) == eta_grid.end()) {
    throw ConfigError("eta grid must contain 0");
  }
  for (double e : eta_grid) {
    if (!(e >= 0.0)) throw ConfigError("eta grid values must be >= 0");
  }
  if (adapt_epochs < 0) throw ConfigError("adapt_epochs must be >= 0");
}

CalibrationResult calibrate_graph(std::size_t graph_id, const Graph& graph, const ReExplanationRecord& rec,
                                  double eta) {
  check_aligned(graph, rec.m1.size());
  CalibrationResult r;
  r.graph_id = graph_id;
  r.calibrated = self_denoise(rec.m1, rec.delta_s, eta);
  r.esc = rec.esc;
  r.spa_before = graph.num_edges() ? spa(rec.m1) : 0.0;
  r.spa_after = graph.num_edges() ? spa(r.calibrated) : 0.0;
  for (std::size_t e = 0; e < rec.m1.size(); ++e) {
    if (r.calibrated[e] == 0.0 && rec.m1[e] > 0.0) ++r.clip_count;
  }
  r.damping_mass = damping_mass(rec.m1, rec.delta_s);
  return r;
}

CalibrationOutput calibrate_dataset(const SiGnnModel& model, const Dataset& dataset, double eta, bool adapt,
                                    const SdConfig& config, Exec exec) {
  if (!(eta >= 0.0)) throw ConfigError("eta must be >= 0");
  std::vector<std::size_t> all(dataset.graphs.size());
  std::iota(all.begin(), all.end(), 0);
  const auto records = re_explain_all(model, dataset, all, exec);
  CalibrationOutput out;
  out.per_graph.resize(all.size());
  for_each_index(all.size(), exec,
                 [&](std::size_t i) { out.per_graph[i] = calibrate_graph(i, dataset.graphs[i], records[i], eta); });
  if (adapt) {
    std::vector<EdgeMask> masks;
    masks.reserve(all.size());
    for (const auto& r : out.per_graph) masks.push_back(r.calibrated);
    out.adapted = adapt_classifier(model, dataset, masks, {config.adapt_epochs, config.adapt_lr, config.seed});
  }
  return out;
}

EtaSelectionReport select_eta(const SiGnnModel& model, const Dataset& dataset,
                              std::span<const ReExplanationRecord> records, const SdConfig& config) {
  config.validate();
  if (dataset.split.val.empty()) throw PreconditionError("select_eta needs a validation split");
  if (records.size() != dataset.graphs.size()) throw AlignmentError("one record per graph required");
  std::vector<double> grid = config.eta_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  EtaSelectionReport rep;
  rep.grid = grid;
  double best = -1.0;
  for (double eta : grid) {
    std::vector<EdgeMask> masks;
    masks.reserve(records.size());
    for (const auto& rec : records) masks.push_back(self_denoise(rec.m1, rec.delta_s, eta));
    SiGnnModel adapted =
        adapt_classifier(model, dataset, masks, {config.adapt_epochs, config.adapt_lr, config.seed});
    const double val = masked_accuracy(adapted, dataset, dataset.split.val, masks);
    rep.val_acc.push_back(val);
    if (val > best) {  // strict: ties keep the smaller eta
      best = val;
      rep.chosen_eta = eta;
      rep.adapted = std::move(adapted);
    }
  }
  return rep;
}

EtaSelectionReport select_eta(const SiGnnModel& model, const Dataset& dataset, const SdConfig& config,
                              Exec exec) {
  std::vector<std::size_t> all(dataset.graphs.size());
  std::iota(all.begin(), all.end(), 0);
  const auto records = re_explain_all(model, dataset, all, exec);
  return select_eta(model, dataset, records, config);
}

}  // namespace sdlab
