#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdlab/gin.hpp"
#include "sdlab/graph.hpp"
#include "sdlab/mlp.hpp"
#include "sdlab/rng.hpp"

namespace sdlab {

enum class Objective { size_constrained, kl_bernoulli };

std::string to_string(Objective objective);
Objective objective_from_string(const std::string& name);

struct ArchDescriptor {
  std::size_t feature_dim = 4;
  std::vector<std::size_t> encoder_dims = {16, 16};
  /// Hidden and output widths; the input width is 2 * last encoder dim.
  std::vector<std::size_t> explainer_dims = {16, 16, 1};
  /// Hidden and output widths; the last entry is the class count.
  std::vector<std::size_t> classifier_dims = {16, 16, 2};
  Objective objective = Objective::kl_bernoulli;
  double beta = 0.05;
  double r = 0.5;
  double tau = 1.0;

  /// Small widths for CPU-scale experiments.
  static ArchDescriptor desk();
  /// Encoder 64/64, explainer 256/64/1, classifier 64/64/C.
  static ArchDescriptor paper();

  std::size_t num_classes() const { return classifier_dims.empty() ? 0 : classifier_dims.back(); }
  std::size_t embedding_dim() const { return encoder_dims.empty() ? feature_dim : encoder_dims.back(); }
  void validate() const;

  friend bool operator==(const ArchDescriptor&, const ArchDescriptor&) = default;
};

/// Explainer h_Gs, encoder h_Z (shared by the scoring and prediction passes)
/// and classifier h_Y.
struct SiGnnModel {
  ArchDescriptor arch;
  std::vector<GinLayerParams> encoder;
  MlpParams explainer;
  MlpParams classifier;

  friend bool operator==(const SiGnnModel&, const SiGnnModel&) = default;
};

/// Weights are uniform with fan-in scaling; every bias starts at kInitBias.
inline constexpr double kInitBias = 0.1;
SiGnnModel init_model(const ArchDescriptor& arch, std::uint64_t seed);
SiGnnModel zeros_like(const SiGnnModel& model);
/// Throws ShapeError naming the first tensor that disagrees with model.arch.
void check_shapes(const SiGnnModel& model);

/// Flat views of every trainable tensor, in the stable order used by the
/// optimizer and serialization.
struct NamedView {
  std::string name;
  std::span<double> data;
  std::vector<std::size_t> shape;  // empty for scalars
};
std::vector<NamedView> named_parameters(SiGnnModel& model);
std::vector<std::span<double>> parameter_views(SiGnnModel& model);
std::vector<std::span<double>> classifier_views(SiGnnModel& model);

struct EncoderPass {
  DenseMatrix embeddings;
  std::vector<GinCache> layers;
};

EncoderPass encode(const SiGnnModel& model, const Graph& graph, std::span<const double> edge_weights,
                   std::optional<DropoutSpec> dropout = std::nullopt);

struct ForwardTrace {
  DenseMatrix node_embeddings;
  std::vector<double> edge_logits;
  std::vector<double> soft_mask;
  std::vector<double> sampled_mask;  // empty unless sampling was requested
  std::vector<double> graph_embedding;
  std::vector<double> class_logits;
  std::vector<double> class_probs;

  EncoderPass scoring;
  MlpCache explainer_cache;
  EncoderPass prediction;
  MlpCache classifier_cache;
  double tau = 1.0;

  bool sampled() const noexcept { return !sampled_mask.empty(); }
  /// The mask that weighted the prediction pass.
  const std::vector<double>& used_mask() const { return sampled() ? sampled_mask : soft_mask; }
};

struct Prediction {
  std::vector<double> logits;
  std::vector<double> probs;
  int predicted = 0;
};

/// Edge scores sigma(MLP([h_i; h_j])) from an encoder pass weighted by
/// input_edge_weights. All-ones weights give the first-pass explanation.
EdgeMask compute_edge_scores(const SiGnnModel& model, const Graph& graph,
                             const EdgeMask& input_edge_weights);
Prediction predict(const SiGnnModel& model, const Graph& graph, const EdgeMask& edge_mask);
/// Same as predict but accepts any real weights (used by finite differences).
Prediction predict_weights(const SiGnnModel& model, const Graph& graph,
                           std::span<const double> edge_weights);

struct TraceOptions {
  bool sample = false;
  RngStream* rng = nullptr;
  double dropout = 0.0;
};

ForwardTrace explain_and_predict(const SiGnnModel& model, const Graph& graph,
                                 const TraceOptions& options = {});

struct LossResult {
  double value = 0.0;
  double ce = 0.0;
  /// Unweighted regularizer; value == ce + beta * regularizer.
  double regularizer = 0.0;
  std::vector<double> d_class_logits;
  /// Gradient of the weighted regularizer w.r.t. the soft mask.
  std::vector<double> d_soft_mask;
};

/// CE + beta * (sum of soft mask) / |E|
LossResult loss_size_constrained(const ForwardTrace& trace, int label, double beta);
/// CE + beta * mean over edges of KL(Bern(m) || Bern(r))
LossResult loss_kl_bernoulli(const ForwardTrace& trace, int label, double beta, double r);
LossResult compute_loss(const ForwardTrace& trace, int label, const ArchDescriptor& arch);
double bernoulli_kl(double m, double r);

/// Exact gradient of a loss w.r.t. every model parameter, through both encoder passes.
SiGnnModel model_backward(const SiGnnModel& model, const Graph& graph, const ForwardTrace& trace,
                          const LossResult& loss);

/// Pooled prediction-pass embedding z_s for the given edge weights.
std::vector<double> graph_embedding(const SiGnnModel& model, const Graph& graph,
                                    std::span<const double> edge_weights);

/// d prob[cls] / d edge weight of the prediction pass, evaluated at `mask`.
std::vector<double> prediction_mask_gradient(const SiGnnModel& model, const Graph& graph,
                                             std::span<const double> mask, int cls);

/// Instrumentation: number of explainer scoring passes since the last reset.
std::uint64_t scoring_pass_count();
void reset_scoring_pass_count();

}  // namespace sdlab
