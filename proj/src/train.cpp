#include "sdlab/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sdlab/errors.hpp"
#include "sdlab/metrics.hpp"
#include "sdlab/ops.hpp"

namespace sdlab {

namespace {

void add_into(SiGnnModel& into, const SiGnnModel& g) {
  for (std::size_t l = 0; l < into.encoder.size(); ++l) {
    into.encoder[l].eps += g.encoder[l].eps;
    accumulate(into.encoder[l].mlp, g.encoder[l].mlp);
  }
  accumulate(into.explainer, g.explainer);
  accumulate(into.classifier, g.classifier);
}

void shuffle(std::vector<std::size_t>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::vector<std::vector<std::size_t>> make_batches(std::vector<std::size_t> order, std::size_t batch_size) {
  if (batch_size == 0) batch_size = order.size();
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                     order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + batch_size)));
  }
  return out;
}

std::optional<double> split_auc(const SiGnnModel& model, const Dataset& ds,
                                std::span<const std::size_t> idx) {
  std::vector<EdgeMask> masks;
  std::vector<const Graph*> graphs;
  for (std::size_t i : idx) {
    if (!ds.graphs[i].has_ground_truth()) return std::nullopt;
    graphs.push_back(&ds.graphs[i]);
    masks.push_back(compute_edge_scores(model, ds.graphs[i], EdgeMask::ones(ds.graphs[i].num_edges())));
  }
  return pooled_auc(graphs, masks);
}

}  // namespace

BatchGradient batch_gradient(const SiGnnModel& model, const Dataset& dataset,
                             std::span<const std::size_t> indices, const RngStream& stream,
                             double dropout, Exec exec) {
  std::vector<SiGnnModel> per_graph(indices.size());
  std::vector<double> losses(indices.size(), 0.0);
  for_each_index(indices.size(), exec, [&](std::size_t k) {
    const std::size_t i = indices[k];
    const Graph& g = dataset.graphs[i];
    RngStream rng = stream.child(i);
    const auto trace = explain_and_predict(model, g, {true, &rng, dropout});
    const auto loss = compute_loss(trace, g.label(), model.arch);
    losses[k] = loss.value;
    per_graph[k] = model_backward(model, g, trace, loss);
  });
  BatchGradient out;
  out.grads = zeros_like(model);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.loss_sum += losses[k];
    add_into(out.grads, per_graph[k]);
  }
  out.finite = std::isfinite(out.loss_sum);
  for (const auto& view : parameter_views(out.grads)) {
    for (double g : view) out.finite = out.finite && std::isfinite(g);
  }
  return out;
}

double masked_accuracy(const SiGnnModel& model, const Dataset& dataset,
                       std::span<const std::size_t> indices, std::span<const EdgeMask> masks_per_graph) {
  if (indices.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i : indices) {
    if (predict(model, dataset.graphs[i], masks_per_graph[i]).predicted == dataset.graphs[i].label()) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

double scheduled_prior(const TrainConfig& config, int epoch) {
  const double target = config.arch.r;
  if (config.r_decay <= 0.0 || config.r_init <= target) return target;
  const double r = config.r_init - config.r_decay * static_cast<double>(epoch / config.r_decay_interval);
  return std::max(target, r);
}

TrainResult train(const Dataset& dataset, const TrainConfig& config) {
  if (config.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(config.lr > 0.0)) throw ConfigError("learning rate must be > 0");
  if (!(config.dropout >= 0.0 && config.dropout < 1.0)) throw ConfigError("dropout must lie in [0,1)");
  if (dataset.split.train.empty()) throw PreconditionError("train split is empty");
  config.arch.validate();
  if (!(config.r_decay >= 0.0) || config.r_decay_interval < 1 || !(config.r_init > 0.0 && config.r_init < 1.0)) {
    throw ConfigError("prior schedule needs r_init in (0,1), r_decay >= 0, interval >= 1");
  }
  if (!dataset.graphs.empty() && dataset.graphs.front().feature_dim() != config.arch.feature_dim) {
    throw ConfigError("arch feature_dim does not match dataset features");
  }

  TrainResult result;
  SiGnnModel model = init_model(config.arch, config.seed);
  auto views = parameter_views(model);
  AdamState adam = make_adam(views, {config.lr});
  const RngStream root(config.seed);
  RngStream shuffle_rng = root.child(1);
  const RngStream noise_root = root.child(2);

  double best_acc = -1.0;
  result.model = model;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::size_t> order = dataset.split.train;
    shuffle(order, shuffle_rng);
    const RngStream epoch_rng = noise_root.child(static_cast<std::uint64_t>(epoch));
    model.arch.r = scheduled_prior(config, epoch);
    double loss_sum = 0.0;
    const auto batches = make_batches(std::move(order), config.batch_size);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      auto bg = batch_gradient(model, dataset, batches[b], epoch_rng, config.dropout, config.exec);
      if (!bg.finite) {
        throw TrainingError("non-finite loss or gradient at epoch " + std::to_string(epoch), epoch);
      }
      loss_sum += bg.loss_sum;
      const double scale = 1.0 / static_cast<double>(batches[b].size());
      auto grad_views = parameter_views(bg.grads);
      for (auto& gv : grad_views) {
        for (auto& x : gv) x *= scale;
      }
      adam_step(adam, views, grad_views);
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.loss = loss_sum / static_cast<double>(dataset.split.train.size());
    if (!dataset.split.val.empty()) {
      std::size_t correct = 0;
      for (std::size_t i : dataset.split.val) {
        const auto& g = dataset.graphs[i];
        const auto m = compute_edge_scores(model, g, EdgeMask::ones(g.num_edges()));
        if (predict(model, g, m).predicted == g.label()) ++correct;
      }
      entry.val_acc = static_cast<double>(correct) / static_cast<double>(dataset.split.val.size());
      entry.val_auc = split_auc(model, dataset, dataset.split.val);
    }
    result.log.push_back(entry);
    // Ties go to the later epoch.
    if (!config.checkpoint_best_val || entry.val_acc >= best_acc) {
      best_acc = entry.val_acc;
      result.best_epoch = epoch;
      result.model = model;
      result.model.arch = config.arch;
    }
  }
  return result;
}

SiGnnModel adapt_classifier(const SiGnnModel& model, const Dataset& dataset,
                            std::span<const EdgeMask> masks_per_graph, const AdaptConfig& config) {
  if (masks_per_graph.size() != dataset.graphs.size()) {
    throw AlignmentError("adapt_classifier needs one mask per graph");
  }
  SiGnnModel adapted = model;
  if (config.epochs <= 0 || dataset.split.train.empty()) return adapted;

  // Encoder and explainer are frozen, so pooled embeddings are fixed.
  const auto& train_idx = dataset.split.train;
  std::vector<std::vector<double>> z(train_idx.size());
  for (std::size_t k = 0; k < train_idx.size(); ++k) {
    const auto& g = dataset.graphs[train_idx[k]];
    check_aligned(g, masks_per_graph[train_idx[k]].size());
    z[k] = graph_embedding(model, g, masks_per_graph[train_idx[k]].values());
  }
  const std::size_t dim = z.empty() ? 0 : z.front().size();

  auto views = classifier_views(adapted);
  AdamState adam = make_adam(views, {config.lr});
  RngStream rng(config.seed);
  std::vector<std::size_t> order(train_idx.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, rng);
    for (const auto& batch : make_batches(order, config.batch_size)) {
      DenseMatrix x(batch.size(), dim);
      for (std::size_t r = 0; r < batch.size(); ++r) std::copy(z[batch[r]].begin(), z[batch[r]].end(), x.row(r).begin());
      auto fwd = mlp_forward(adapted.classifier, x);
      DenseMatrix dl(batch.size(), fwd.output.cols());
      const double scale = 1.0 / static_cast<double>(batch.size());
      for (std::size_t r = 0; r < batch.size(); ++r) {
        const auto p = softmax(fwd.output.row(r));
        const auto label = static_cast<std::size_t>(dataset.graphs[train_idx[batch[r]]].label());
        for (std::size_t c = 0; c < p.size(); ++c) dl(r, c) = scale * (p[c] - (c == label ? 1.0 : 0.0));
      }
      auto back = mlp_backward(adapted.classifier, fwd.cache, dl);
      std::vector<std::span<double>> grad_views;
      for (auto& layer : back.grads.layers) {
        grad_views.emplace_back(layer.weight.data());
        grad_views.emplace_back(layer.bias);
      }
      adam_step(adam, views, grad_views);
    }
  }
  return adapted;
}

}  // namespace sdlab
