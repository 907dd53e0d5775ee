#include "sdlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdlab/errors.hpp"

namespace sdlab {

std::optional<double> auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw AlignmentError("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Rank-sum form of the pair count: ties share the mean rank.
  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        rank_sum_pos += mid;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum_pos - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

std::optional<double> pooled_auc(std::span<const Graph* const> graphs, std::span<const EdgeMask> masks) {
  if (graphs.size() != masks.size()) throw AlignmentError("pooled_auc: one mask per graph required");
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    const Graph& g = *graphs[k];
    if (!g.has_ground_truth()) throw PreconditionError("auc requires ground-truth edge labels");
    const auto sym = symmetrize(g, masks[k].values());
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      if (e < g.reverse(e)) {
        scores.push_back(sym[e]);
        labels.push_back((*g.gt_edge_labels())[e]);
      }
    }
  }
  return auc(scores, labels);
}

std::optional<double> graph_auc(const Graph& graph, const EdgeMask& mask) {
  const Graph* g = &graph;
  return pooled_auc(std::span(&g, 1), std::span(&mask, 1));
}

double spa(const EdgeMask& mask) {
  if (mask.size() == 0) throw PreconditionError("spa of an empty mask");
  double s = 0.0;
  for (double v : mask.values()) s += v;
  return s / static_cast<double>(mask.size());
}

EdgeMask complement(const EdgeMask& mask) {
  std::vector<double> c(mask.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 1.0 - mask[i];
  return EdgeMask(std::move(c));
}

int fid_minus(const SiGnnModel& model, const Graph& graph, const EdgeMask& mask) {
  const int full = predict(model, graph, EdgeMask::ones(graph.num_edges())).predicted;
  return predict(model, graph, mask).predicted == full ? 0 : 1;
}

int fid_plus(const SiGnnModel& model, const Graph& graph, const EdgeMask& mask) {
  return fid_minus(model, graph, complement(mask));
}

double acc(const SiGnnModel& model, const Dataset& dataset, std::span<const std::size_t> indices,
           std::span<const EdgeMask> masks) {
  if (indices.size() != masks.size()) throw AlignmentError("acc: one mask per graph required");
  if (indices.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto& g = dataset.graphs[indices[k]];
    if (predict(model, g, masks[k]).predicted == g.label()) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

ModelEval evaluate(const SiGnnModel& model, const Dataset& dataset, std::span<const std::size_t> indices,
                   std::span<const EdgeMask> masks, std::uint64_t seed) {
  if (indices.size() != masks.size()) throw AlignmentError("evaluate: one mask per graph required");
  ModelEval ev;
  ev.seed = seed;
  if (indices.empty()) return ev;
  std::vector<const Graph*> graphs;
  bool have_gt = true;
  double spa_sum = 0.0;
  double fm = 0.0;
  double fp = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Graph& g = dataset.graphs[indices[k]];
    graphs.push_back(&g);
    have_gt = have_gt && g.has_ground_truth();
    spa_sum += spa(masks[k]);
    fm += fid_minus(model, g, masks[k]);
    fp += fid_plus(model, g, masks[k]);
  }
  const double n = static_cast<double>(indices.size());
  if (have_gt) ev.explanation.auc = pooled_auc(graphs, masks);
  ev.explanation.spa = spa_sum / n;
  ev.prediction.acc = acc(model, dataset, indices, masks);
  ev.prediction.fid_minus = fm / n;
  ev.prediction.fid_plus = fp / n;
  return ev;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(ss / n);
  return out;
}

AggregateReport aggregate(const std::string& dataset, std::vector<ModelEval> evals) {
  AggregateReport rep;
  rep.dataset = dataset;
  std::map<std::string, std::vector<double>> cols;
  for (const auto& e : evals) {
    if (e.explanation.auc) cols["auc"].push_back(*e.explanation.auc);
    cols["spa"].push_back(e.explanation.spa);
    cols["acc"].push_back(e.prediction.acc);
    cols["fid_minus"].push_back(e.prediction.fid_minus);
    cols["fid_plus"].push_back(e.prediction.fid_plus);
  }
  for (const auto& [name, vals] : cols) rep.aggregate[name] = mean_std(vals);
  rep.models = std::move(evals);
  return rep;
}

nlohmann::json report_to_json(const AggregateReport& report) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : report.models) {
    models.push_back({{"seed", m.seed},
                      {"auc", m.explanation.auc ? nlohmann::json(100.0 * *m.explanation.auc) : nlohmann::json()},
                      {"spa", 100.0 * m.explanation.spa},
                      {"acc", 100.0 * m.prediction.acc},
                      {"fid_minus", 100.0 * m.prediction.fid_minus},
                      {"fid_plus", 100.0 * m.prediction.fid_plus}});
  }
  nlohmann::json agg = nlohmann::json::object();
  for (const auto& [name, ms] : report.aggregate) agg[name] = {{"mean", 100.0 * ms.mean}, {"std", 100.0 * ms.std}};
  return {{"dataset", report.dataset}, {"models", std::move(models)}, {"aggregate", std::move(agg)}};
}

AggregateReport report_from_json(const nlohmann::json& doc) {
  AggregateReport rep;
  try {
    rep.dataset = doc.at("dataset").get<std::string>();
    for (const auto& m : doc.at("models")) {
      ModelEval e;
      e.seed = m.at("seed").get<std::uint64_t>();
      if (!m.at("auc").is_null()) e.explanation.auc = m.at("auc").get<double>() / 100.0;
      e.explanation.spa = m.at("spa").get<double>() / 100.0;
      e.prediction.acc = m.at("acc").get<double>() / 100.0;
      e.prediction.fid_minus = m.at("fid_minus").get<double>() / 100.0;
      e.prediction.fid_plus = m.at("fid_plus").get<double>() / 100.0;
      rep.models.push_back(e);
    }
    for (const auto& [name, v] : doc.at("aggregate").items()) {
      rep.aggregate[name] = {v.at("mean").get<double>() / 100.0, v.at("std").get<double>() / 100.0};
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("report: ") + ex.what());
  }
  return rep;
}

}  // namespace sdlab
