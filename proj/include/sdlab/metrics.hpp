#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdlab/graph.hpp"
#include "sdlab/model.hpp"

namespace sdlab {

/// Mann-Whitney ROC-AUC with ties counted as one half. nullopt when only one
/// class is present.
std::optional<double> auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// AUC over symmetrized scores, one entry per undirected edge, pooled across graphs.
std::optional<double> pooled_auc(std::span<const Graph* const> graphs, std::span<const EdgeMask> masks);
std::optional<double> graph_auc(const Graph& graph, const EdgeMask& mask);

/// Mean mask value. Throws PreconditionError on an empty mask.
double spa(const EdgeMask& mask);

/// 1 when the class predicted through `mask` differs from the full-graph class.
int fid_minus(const SiGnnModel& model, const Graph& graph, const EdgeMask& mask);
/// 1 when the class predicted through the complement weights 1 - m differs
/// from the full-graph class.
int fid_plus(const SiGnnModel& model, const Graph& graph, const EdgeMask& mask);
EdgeMask complement(const EdgeMask& mask);

/// Fraction of graphs whose class through masks[k] equals the true label.
/// `masks` is aligned with `indices`.
double acc(const SiGnnModel& model, const Dataset& dataset, std::span<const std::size_t> indices,
           std::span<const EdgeMask> masks);

struct ExplanationEval {
  std::optional<double> auc;
  double spa = 0.0;
};

struct PredictionEval {
  double acc = 0.0;
  double fid_minus = 0.0;
  double fid_plus = 0.0;
};

struct ModelEval {
  std::uint64_t seed = 0;
  ExplanationEval explanation;
  PredictionEval prediction;
};

/// `masks` is aligned with `indices`. AUC is pooled over the whole split.
ModelEval evaluate(const SiGnnModel& model, const Dataset& dataset, std::span<const std::size_t> indices,
                   std::span<const EdgeMask> masks, std::uint64_t seed = 0);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
  friend bool operator==(const MeanStd&, const MeanStd&) = default;
};

/// Population standard deviation over models.
MeanStd mean_std(std::span<const double> values);

struct AggregateReport {
  std::string dataset;
  std::vector<ModelEval> models;
  std::map<std::string, MeanStd> aggregate;
};

AggregateReport aggregate(const std::string& dataset, std::vector<ModelEval> evals);

/// Fractions in the programmatic surface, percentages in the JSON report.
nlohmann::json report_to_json(const AggregateReport& report);
AggregateReport report_from_json(const nlohmann::json& doc);

}  // namespace sdlab
