#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <span>
#include <vector>

#include "sdlab/graph.hpp"
#include "sdlab/model.hpp"
#include "sdlab/parallel.hpp"

namespace sdlab {

struct ReExplanationRecord {
  EdgeMask m1;
  EdgeMask m2;
  std::vector<double> delta_s;  // |m1 - m2| per edge
  double esc = 0.0;             // mean of delta_s
};

/// Builds a record from two explanations of the same graph.
ReExplanationRecord make_record(EdgeMask m1, EdgeMask m2);

/// First pass on the raw graph, second pass with the first-pass mask as edge
/// weights. Exactly two scoring passes.
ReExplanationRecord re_explain(const SiGnnModel& model, const Graph& graph);
std::vector<ReExplanationRecord> re_explain_all(const SiGnnModel& model, const Dataset& dataset,
                                                std::span<const std::size_t> indices,
                                                Exec exec = Exec::serial);

/// Mean absolute difference.
double esc(const EdgeMask& a, const EdgeMask& b);

/// Per-edge mean of neighbours' delta_s; nullopt where N(e) is empty.
struct ContextVariation {
  std::vector<std::optional<double>> delta_c;
};

ContextVariation context_variation(const Graph& graph, std::span<const double> delta_s);
ContextVariation context_variation(const EdgeNeighborhoodIndex& index, std::span<const double> delta_s);

/// All three return nullopt for degenerate input (length < 2 or zero variance).
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);
/// Pearson on mid-ranks.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);
/// Tau-b, O(n log n).
std::optional<double> kendall(std::span<const double> x, std::span<const double> y);
std::vector<double> midranks(std::span<const double> x);

struct CorrelationTriple {
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::optional<double> kendall;
  std::size_t count = 0;
};

CorrelationTriple correlate(std::span<const double> x, std::span<const double> y);

struct CorrelationReport {
  CorrelationTriple important;
  CorrelationTriple unimportant;
};

enum class CorrelationMode { pooled, per_graph };

/// Correlation between delta_s and delta_c, split by ground-truth label.
/// Edges with empty neighbourhoods are excluded.
CorrelationReport correlation_report(const SiGnnModel& model, const Dataset& dataset, SplitPart split,
                                     CorrelationMode mode = CorrelationMode::pooled);
/// Same analysis over precomputed records aligned with `graphs`.
CorrelationReport correlation_report(std::span<const Graph* const> graphs,
                                     std::span<const ReExplanationRecord> records,
                                     CorrelationMode mode = CorrelationMode::pooled);

/// CSV header: graph_id,edge_id,m1,m2,m1_sym,m2_sym,gt_label,delta_s,delta_c
void scatter_export(const SiGnnModel& model, const Dataset& dataset, SplitPart split,
                    const std::filesystem::path& path);
/// When `edge_states` is non-empty a trailing "state" column is appended.
void write_scatter(std::ostream& out, std::span<const std::size_t> graph_ids,
                   std::span<const Graph* const> graphs, std::span<const ReExplanationRecord> records,
                   std::span<const std::vector<std::string>> edge_states = {});

}  // namespace sdlab
