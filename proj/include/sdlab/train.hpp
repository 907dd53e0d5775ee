#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sdlab/graph.hpp"
#include "sdlab/model.hpp"
#include "sdlab/parallel.hpp"

namespace sdlab {

struct TrainConfig {
  ArchDescriptor arch = ArchDescriptor::desk();
  int epochs = 300;
  double lr = 5e-3;
  std::uint64_t seed = 0;
  /// 0 selects full-batch gradient descent.
  std::size_t batch_size = 32;
  /// Inverted dropout on hidden MLP activations during training; 0 disables.
  double dropout = 0.0;
  bool checkpoint_best_val = true;
  /// Bernoulli prior annealing: the KL target starts at r_init and drops by
  /// r_decay every r_decay_interval epochs until it reaches arch.r.
  /// r_decay = 0 trains at arch.r throughout.
  double r_init = 0.9;
  double r_decay = 0.1;
  int r_decay_interval = 10;
  Exec exec = Exec::serial;
};

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;
  double val_acc = 0.0;
  std::optional<double> val_auc;
};

struct TrainResult {
  SiGnnModel model;
  std::vector<EpochLog> log;
  int best_epoch = 0;
};

TrainResult train(const Dataset& dataset, const TrainConfig& config);

/// Prior in effect at `epoch` under the annealing schedule.
double scheduled_prior(const TrainConfig& config, int epoch);

struct BatchGradient {
  SiGnnModel grads;
  double loss_sum = 0.0;
  bool finite = true;
};

/// Sum of per-graph loss gradients with Gumbel-sampled masks; graph i draws
/// its noise from stream.child(i).
BatchGradient batch_gradient(const SiGnnModel& model, const Dataset& dataset,
                             std::span<const std::size_t> indices, const RngStream& stream,
                             double dropout, Exec exec);

struct AdaptConfig {
  int epochs = 10;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  std::size_t batch_size = 32;
};

/// Fine-tunes only the classifier on predictions made through the given
/// masks (one per graph in the dataset), using the train split.
SiGnnModel adapt_classifier(const SiGnnModel& model, const Dataset& dataset,
                            std::span<const EdgeMask> masks_per_graph, const AdaptConfig& config = {});

/// Fraction of graphs in `indices` whose prediction through masks[i] matches the label.
double masked_accuracy(const SiGnnModel& model, const Dataset& dataset,
                       std::span<const std::size_t> indices, std::span<const EdgeMask> masks_per_graph);

}  // namespace sdlab
