#include "sdlab/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "sdlab/errors.hpp"
#include "sdlab/ops.hpp"

namespace sdlab {

namespace {
std::atomic<std::uint64_t> g_scoring_passes{0};
}  // namespace

std::uint64_t scoring_pass_count() { return g_scoring_passes.load(); }
void reset_scoring_pass_count() { g_scoring_passes.store(0); }

std::string to_string(Objective objective) {
  return objective == Objective::size_constrained ? "size" : "kl";
}

Objective objective_from_string(const std::string& name) {
  if (name == "size" || name == "size_constrained") return Objective::size_constrained;
  if (name == "kl" || name == "kl_bernoulli") return Objective::kl_bernoulli;
  throw ConfigError("unknown objective '" + name + "' (expected size|kl)");
}

ArchDescriptor ArchDescriptor::desk() { return {}; }

ArchDescriptor ArchDescriptor::paper() {
  ArchDescriptor a;
  a.encoder_dims = {64, 64};
  a.explainer_dims = {256, 64, 1};
  a.classifier_dims = {64, 64, 2};
  return a;
}

void ArchDescriptor::validate() const {
  if (feature_dim == 0) throw ConfigError("feature_dim must be >= 1");
  if (encoder_dims.empty()) throw ConfigError("encoder needs at least one GIN layer");
  if (explainer_dims.empty() || explainer_dims.back() != 1) {
    throw ConfigError("explainer must end in a single logit");
  }
  if (classifier_dims.empty() || classifier_dims.back() < 2) {
    throw ConfigError("classifier must output C >= 2 logits");
  }
  for (const auto* dims : {&encoder_dims, &explainer_dims, &classifier_dims}) {
    if (std::find(dims->begin(), dims->end(), std::size_t{0}) != dims->end()) {
      throw ConfigError("layer widths must be positive");
    }
  }
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  if (!(r > 0.0 && r < 1.0)) throw ConfigError("prior r must lie in (0,1)");
  if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
}

SiGnnModel init_model(const ArchDescriptor& arch, std::uint64_t seed) {
  arch.validate();
  RngStream rng(seed);
  SiGnnModel m;
  m.arch = arch;
  std::size_t in = arch.feature_dim;
  for (std::size_t l = 0; l < arch.encoder_dims.size(); ++l) {
    RngStream layer_rng = rng.child(l);
    const std::size_t d = arch.encoder_dims[l];
    m.encoder.push_back({0.0, make_mlp({in, d, d}, Activation::relu, Activation::relu, layer_rng)});
    in = d;
  }
  std::vector<std::size_t> ex = {2 * in};
  ex.insert(ex.end(), arch.explainer_dims.begin(), arch.explainer_dims.end());
  RngStream ex_rng = rng.child(100);
  m.explainer = make_mlp(ex, Activation::relu, Activation::identity, ex_rng);
  std::vector<std::size_t> cl = {in};
  cl.insert(cl.end(), arch.classifier_dims.begin(), arch.classifier_dims.end());
  RngStream cl_rng = rng.child(200);
  m.classifier = make_mlp(cl, Activation::relu, Activation::identity, cl_rng);
  auto set_bias = [](MlpParams& mlp) {
    for (auto& layer : mlp.layers) std::fill(layer.bias.begin(), layer.bias.end(), kInitBias);
  };
  for (auto& layer : m.encoder) set_bias(layer.mlp);
  set_bias(m.explainer);
  set_bias(m.classifier);
  return m;
}

SiGnnModel zeros_like(const SiGnnModel& model) {
  SiGnnModel z;
  z.arch = model.arch;
  for (const auto& layer : model.encoder) z.encoder.push_back(zeros_like(layer));
  z.explainer = zeros_like(model.explainer);
  z.classifier = zeros_like(model.classifier);
  return z;
}

void check_shapes(const SiGnnModel& model) {
  const SiGnnModel ref = init_model(model.arch, 0);
  if (ref.encoder.size() != model.encoder.size()) throw ShapeError("encoder layer count mismatch");
  auto check_mlp = [](const MlpParams& got, const MlpParams& want, const std::string& prefix) {
    if (got.layers.size() != want.layers.size()) throw ShapeError(prefix + " layer count mismatch");
    for (std::size_t k = 0; k < got.layers.size(); ++k) {
      const auto& g = got.layers[k];
      const auto& w = want.layers[k];
      const std::string base = prefix + "." + std::to_string(k);
      if (g.weight.rows() != w.weight.rows() || g.weight.cols() != w.weight.cols()) {
        throw ShapeError(base + ".weight has shape [" + std::to_string(g.weight.rows()) + "," +
                         std::to_string(g.weight.cols()) + "], descriptor expects [" +
                         std::to_string(w.weight.rows()) + "," + std::to_string(w.weight.cols()) + "]");
      }
      if (g.bias.size() != w.bias.size()) throw ShapeError(base + ".bias length mismatch");
    }
  };
  for (std::size_t l = 0; l < ref.encoder.size(); ++l) {
    check_mlp(model.encoder[l].mlp, ref.encoder[l].mlp, "encoder." + std::to_string(l) + ".mlp");
  }
  check_mlp(model.explainer, ref.explainer, "explainer");
  check_mlp(model.classifier, ref.classifier, "classifier");
}

std::vector<NamedView> named_parameters(SiGnnModel& model) {
  std::vector<NamedView> out;
  auto add_mlp = [&out](MlpParams& p, const std::string& prefix) {
    for (std::size_t k = 0; k < p.layers.size(); ++k) {
      const std::string base = prefix + "." + std::to_string(k);
      auto& w = p.layers[k].weight;
      out.push_back({base + ".weight", w.data(), {w.rows(), w.cols()}});
      out.push_back({base + ".bias", p.layers[k].bias, {p.layers[k].bias.size()}});
    }
  };
  for (std::size_t l = 0; l < model.encoder.size(); ++l) {
    const std::string base = "encoder." + std::to_string(l);
    out.push_back({base + ".eps", std::span<double>(&model.encoder[l].eps, 1), {}});
    add_mlp(model.encoder[l].mlp, base + ".mlp");
  }
  add_mlp(model.explainer, "explainer");
  add_mlp(model.classifier, "classifier");
  return out;
}

std::vector<std::span<double>> parameter_views(SiGnnModel& model) {
  std::vector<std::span<double>> out;
  for (auto& nv : named_parameters(model)) out.push_back(nv.data);
  return out;
}

std::vector<std::span<double>> classifier_views(SiGnnModel& model) {
  std::vector<std::span<double>> out;
  for (auto& layer : model.classifier.layers) {
    out.emplace_back(layer.weight.data());
    out.emplace_back(layer.bias);
  }
  return out;
}

EncoderPass encode(const SiGnnModel& model, const Graph& graph, std::span<const double> edge_weights,
                   std::optional<DropoutSpec> dropout) {
  check_aligned(graph, edge_weights.size());
  EncoderPass pass;
  DenseMatrix h = graph.features();
  for (const auto& layer : model.encoder) {
    auto fwd = gin_layer_forward(layer, h, graph.edges(), edge_weights, dropout);
    pass.layers.push_back(std::move(fwd.cache));
    h = std::move(fwd.output);
  }
  pass.embeddings = std::move(h);
  return pass;
}

namespace {

// Returns the accumulated edge-weight gradient over all layers; parameter
// gradients are added into `grads`.
std::vector<double> encoder_backward(const SiGnnModel& model, const EncoderPass& pass,
                                     DenseMatrix grad, SiGnnModel* grads) {
  const std::size_t n_edges = pass.layers.empty() ? 0 : pass.layers.front().edges.size();
  std::vector<double> dw(n_edges, 0.0);
  for (std::size_t l = model.encoder.size(); l-- > 0;) {
    auto back = gin_layer_backward(model.encoder[l], pass.layers[l], grad);
    if (grads) {
      grads->encoder[l].eps += back.grads.eps;
      accumulate(grads->encoder[l].mlp, back.grads.mlp);
    }
    for (std::size_t e = 0; e < n_edges; ++e) dw[e] += back.grad_edge_weights[e];
    grad = std::move(back.grad_input);
  }
  return dw;
}

DenseMatrix edge_inputs(const Graph& graph, const DenseMatrix& h) {
  const std::size_t d = h.cols();
  DenseMatrix x(graph.num_edges(), 2 * d);
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    auto src = h.row(graph.edge(e).src);
    auto dst = h.row(graph.edge(e).dst);
    auto row = x.row(e);
    std::copy(src.begin(), src.end(), row.begin());
    std::copy(dst.begin(), dst.end(), row.begin() + static_cast<std::ptrdiff_t>(d));
  }
  return x;
}

struct ScoringPass {
  EncoderPass encoder;
  MlpCache explainer_cache;
  std::vector<double> logits;
};

ScoringPass run_scoring(const SiGnnModel& model, const Graph& graph, std::span<const double> weights,
                        std::optional<DropoutSpec> dropout) {
  ++g_scoring_passes;
  ScoringPass s;
  s.encoder = encode(model, graph, weights, dropout);
  auto ex = mlp_forward(model.explainer, edge_inputs(graph, s.encoder.embeddings), dropout);
  s.logits = std::move(ex.output.data());
  s.explainer_cache = std::move(ex.cache);
  return s;
}

struct PredictionPass {
  EncoderPass encoder;
  std::vector<double> graph_embedding;
  MlpCache classifier_cache;
  std::vector<double> logits;
  std::vector<double> probs;
};

PredictionPass run_prediction(const SiGnnModel& model, const Graph& graph,
                              std::span<const double> weights, std::optional<DropoutSpec> dropout) {
  PredictionPass p;
  p.encoder = encode(model, graph, weights, dropout);
  p.graph_embedding = pool_mean(p.encoder.embeddings);
  DenseMatrix z(1, p.graph_embedding.size(), p.graph_embedding);
  auto cl = mlp_forward(model.classifier, z, dropout);
  p.logits = std::move(cl.output.data());
  p.classifier_cache = std::move(cl.cache);
  p.probs = softmax(p.logits);
  return p;
}

std::vector<double> prediction_backward(const SiGnnModel& model, const EncoderPass& encoder,
                                        const MlpCache& classifier_cache,
                                        std::span<const double> d_logits, SiGnnModel* grads) {
  DenseMatrix dl(1, d_logits.size(), std::vector<double>(d_logits.begin(), d_logits.end()));
  auto cb = mlp_backward(model.classifier, classifier_cache, dl);
  if (grads) accumulate(grads->classifier, cb.grads);
  DenseMatrix dh = pool_mean_backward(cb.grad_input.row(0), encoder.embeddings.rows());
  return encoder_backward(model, encoder, std::move(dh), grads);
}

int argmax(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

EdgeMask compute_edge_scores(const SiGnnModel& model, const Graph& graph,
                             const EdgeMask& input_edge_weights) {
  check_aligned(graph, input_edge_weights.size());
  auto s = run_scoring(model, graph, input_edge_weights.values(), std::nullopt);
  std::vector<double> m(s.logits.size());
  for (std::size_t e = 0; e < m.size(); ++e) m[e] = sigmoid(s.logits[e]);
  return EdgeMask(std::move(m));
}

Prediction predict_weights(const SiGnnModel& model, const Graph& graph,
                           std::span<const double> edge_weights) {
  check_aligned(graph, edge_weights.size());
  auto p = run_prediction(model, graph, edge_weights, std::nullopt);
  Prediction out;
  out.predicted = argmax(p.probs);
  out.logits = std::move(p.logits);
  out.probs = std::move(p.probs);
  return out;
}

Prediction predict(const SiGnnModel& model, const Graph& graph, const EdgeMask& edge_mask) {
  return predict_weights(model, graph, edge_mask.values());
}

ForwardTrace explain_and_predict(const SiGnnModel& model, const Graph& graph,
                                 const TraceOptions& options) {
  if (options.sample && !options.rng) throw PreconditionError("sampling requires an rng stream");
  std::optional<DropoutSpec> dropout;
  if (options.dropout > 0.0) {
    if (!options.rng) throw PreconditionError("dropout requires an rng stream");
    dropout = DropoutSpec{options.dropout, options.rng};
  }
  ForwardTrace t;
  t.tau = model.arch.tau;
  const std::vector<double> ones(graph.num_edges(), 1.0);
  auto s = run_scoring(model, graph, ones, dropout);
  t.node_embeddings = s.encoder.embeddings;
  t.edge_logits = std::move(s.logits);
  t.scoring = std::move(s.encoder);
  t.explainer_cache = std::move(s.explainer_cache);
  t.soft_mask.resize(t.edge_logits.size());
  for (std::size_t e = 0; e < t.soft_mask.size(); ++e) t.soft_mask[e] = sigmoid(t.edge_logits[e]);
  if (options.sample) t.sampled_mask = gumbel_sigmoid(t.edge_logits, model.arch.tau, *options.rng);

  auto p = run_prediction(model, graph, t.used_mask(), dropout);
  t.prediction = std::move(p.encoder);
  t.graph_embedding = std::move(p.graph_embedding);
  t.classifier_cache = std::move(p.classifier_cache);
  t.class_logits = std::move(p.logits);
  t.class_probs = std::move(p.probs);
  return t;
}

namespace {

void cross_entropy(const ForwardTrace& trace, int label, LossResult& out) {
  const auto& z = trace.class_logits;
  if (label < 0 || static_cast<std::size_t>(label) >= z.size()) {
    throw PreconditionError("label " + std::to_string(label) + " out of class range");
  }
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - mx);
  out.ce = mx + std::log(sum) - z[static_cast<std::size_t>(label)];
  out.d_class_logits = trace.class_probs;
  out.d_class_logits[static_cast<std::size_t>(label)] -= 1.0;
}

}  // namespace

double bernoulli_kl(double m, double r) {
  constexpr double kTiny = 1e-12;
  const double mc = std::clamp(m, kTiny, 1.0 - kTiny);
  return mc * std::log(mc / r) + (1.0 - mc) * std::log((1.0 - mc) / (1.0 - r));
}

LossResult loss_size_constrained(const ForwardTrace& trace, int label, double beta) {
  LossResult out;
  cross_entropy(trace, label, out);
  const auto& m = trace.soft_mask;
  const double n = static_cast<double>(m.size());
  double mass = 0.0;
  for (double v : m) mass += v;
  out.regularizer = m.empty() ? 0.0 : mass / n;
  out.d_soft_mask.assign(m.size(), m.empty() ? 0.0 : beta / n);
  out.value = out.ce + beta * out.regularizer;
  return out;
}

LossResult loss_kl_bernoulli(const ForwardTrace& trace, int label, double beta, double r) {
  if (!(r > 0.0 && r < 1.0)) throw PreconditionError("prior r must lie in (0,1)");
  LossResult out;
  cross_entropy(trace, label, out);
  const auto& m = trace.soft_mask;
  const double n = static_cast<double>(m.size());
  double kl = 0.0;
  out.d_soft_mask.resize(m.size());
  constexpr double kTiny = 1e-12;
  for (std::size_t e = 0; e < m.size(); ++e) {
    kl += bernoulli_kl(m[e], r);
    const double mc = std::clamp(m[e], kTiny, 1.0 - kTiny);
    out.d_soft_mask[e] = beta / n * (std::log(mc / r) - std::log((1.0 - mc) / (1.0 - r)));
  }
  out.regularizer = m.empty() ? 0.0 : kl / n;
  out.value = out.ce + beta * out.regularizer;
  return out;
}

LossResult compute_loss(const ForwardTrace& trace, int label, const ArchDescriptor& arch) {
  return arch.objective == Objective::size_constrained
             ? loss_size_constrained(trace, label, arch.beta)
             : loss_kl_bernoulli(trace, label, arch.beta, arch.r);
}

SiGnnModel model_backward(const SiGnnModel& model, const Graph& graph, const ForwardTrace& trace,
                          const LossResult& loss) {
  SiGnnModel grads = zeros_like(model);
  const auto dw =
      prediction_backward(model, trace.prediction, trace.classifier_cache, loss.d_class_logits, &grads);

  const std::size_t n_edges = graph.num_edges();
  DenseMatrix dlogit(n_edges, 1);
  for (std::size_t e = 0; e < n_edges; ++e) {
    const double m = trace.soft_mask[e];
    const double dm_dl = m * (1.0 - m);
    double du_dl = dm_dl;
    if (trace.sampled()) {
      const double s = trace.sampled_mask[e];
      du_dl = s * (1.0 - s) / trace.tau;
    }
    dlogit(e, 0) = loss.d_soft_mask[e] * dm_dl + dw[e] * du_dl;
  }
  auto eb = mlp_backward(model.explainer, trace.explainer_cache, dlogit);
  accumulate(grads.explainer, eb.grads);

  const std::size_t d = trace.node_embeddings.cols();
  DenseMatrix dh(graph.num_nodes(), d);
  for (std::size_t e = 0; e < n_edges; ++e) {
    auto g = eb.grad_input.row(e);
    auto src = dh.row(graph.edge(e).src);
    auto dst = dh.row(graph.edge(e).dst);
    for (std::size_t k = 0; k < d; ++k) {
      src[k] += g[k];
      dst[k] += g[d + k];
    }
  }
  encoder_backward(model, trace.scoring, std::move(dh), &grads);
  return grads;
}

std::vector<double> graph_embedding(const SiGnnModel& model, const Graph& graph,
                                    std::span<const double> edge_weights) {
  return pool_mean(encode(model, graph, edge_weights).embeddings);
}

std::vector<double> prediction_mask_gradient(const SiGnnModel& model, const Graph& graph,
                                             std::span<const double> mask, int cls) {
  check_aligned(graph, mask.size());
  auto p = run_prediction(model, graph, mask, std::nullopt);
  if (cls < 0 || static_cast<std::size_t>(cls) >= p.probs.size()) {
    throw PreconditionError("class index out of range");
  }
  const auto c = static_cast<std::size_t>(cls);
  std::vector<double> dl(p.probs.size());
  for (std::size_t k = 0; k < dl.size(); ++k) dl[k] = p.probs[c] * ((k == c ? 1.0 : 0.0) - p.probs[k]);
  return prediction_backward(model, p.encoder, p.classifier_cache, dl, nullptr);
}

}  // namespace sdlab
