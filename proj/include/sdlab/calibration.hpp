#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sdlab/consistency.hpp"
#include "sdlab/graph.hpp"
#include "sdlab/model.hpp"
#include "sdlab/parallel.hpp"
#include "sdlab/rng.hpp"
#include "sdlab/train.hpp"

namespace sdlab {

/// max(0, (1 - eta * delta_s) * m1), edgewise.
EdgeMask self_denoise(const EdgeMask& m1, std::span<const double> delta_s, double eta);

/// Smallest eta (exclusive) at which the unclipped update ranks the important
/// edge above the unimportant one. Requires m_plus < m_minus and
/// ds_minus > ds_plus; nullopt when m_minus*ds_minus <= m_plus*ds_plus.
std::optional<double> ranking_correction_threshold(double m_plus, double m_minus, double ds_plus,
                                                   double ds_minus);

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Damping mass sum_e m1_e * delta_s_e.
double damping_mass(const EdgeMask& m1, std::span<const double> delta_s);

/// eps / (||grad f(M1)||_inf * damping mass), f = probability of the class
/// predicted at M1. Returns kUnbounded when the denominator vanishes.
double stability_eta_bound_deterministic(const SiGnnModel& model, const Graph& graph, const EdgeMask& m1,
                                         std::span<const double> delta_s, double epsilon);

/// eps / damping mass. Returns kUnbounded when the mass vanishes.
double stability_eta_bound_stochastic(const EdgeMask& m1, std::span<const double> delta_s, double epsilon);

struct StochasticShift {
  double mean_calibrated = 0.0;
  double mean_original = 0.0;
  double shift = 0.0;           // |mean_calibrated - mean_original|
  double standard_error = 0.0;  // of the difference of the two means
};

/// Monte Carlo estimate of |E f(G * X~) - E f(G * X1)| with X ~ prod Bern(mask),
/// f = probability of class `cls`. Sample k on each side uses stream.child(k).
StochasticShift stochastic_prediction_shift(const SiGnnModel& model, const Graph& graph,
                                            const EdgeMask& m1, const EdgeMask& calibrated, int cls,
                                            std::size_t samples, const RngStream& stream,
                                            Exec exec = Exec::serial);

struct SdConfig {
  double eta = 1.0;
  std::vector<double> eta_grid = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  int adapt_epochs = 10;
  double adapt_lr = 1e-3;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CalibrationResult {
  std::size_t graph_id = 0;
  EdgeMask calibrated;
  double esc = 0.0;
  double spa_before = 0.0;
  double spa_after = 0.0;
  std::size_t clip_count = 0;
  double damping_mass = 0.0;
};

CalibrationResult calibrate_graph(std::size_t graph_id, const Graph& graph, const ReExplanationRecord& rec,
                                  double eta);

struct CalibrationOutput {
  std::vector<CalibrationResult> per_graph;  // aligned with dataset.graphs
  std::optional<SiGnnModel> adapted;         // SD* classifier when requested
};

/// Re-explains every graph and applies self_denoise; with `adapt`, also
/// fine-tunes the classifier on the calibrated train masks.
CalibrationOutput calibrate_dataset(const SiGnnModel& model, const Dataset& dataset, double eta, bool adapt,
                                    const SdConfig& config = {}, Exec exec = Exec::serial);

struct EtaSelectionReport {
  std::vector<double> grid;
  std::vector<double> val_acc;
  double chosen_eta = 0.0;
  SiGnnModel adapted;  // classifier adapted at the chosen eta
};

/// Picks eta by validation accuracy after classifier-only adaptation on
/// calibrated masks; ties go to the smaller eta. The input model is not modified.
EtaSelectionReport select_eta(const SiGnnModel& model, const Dataset& dataset, const SdConfig& config,
                              Exec exec = Exec::serial);
/// Same, reusing precomputed re-explanation records (one per graph).
EtaSelectionReport select_eta(const SiGnnModel& model, const Dataset& dataset,
                              std::span<const ReExplanationRecord> records, const SdConfig& config);

}  // namespace sdlab
