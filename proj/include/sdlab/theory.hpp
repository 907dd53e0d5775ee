#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdlab/consistency.hpp"
#include "sdlab/graph.hpp"
#include "sdlab/parallel.hpp"
#include "sdlab/rng.hpp"

namespace sdlab {

/// A law supported on a bounded interval.
struct Distribution {
  enum class Kind { two_point, uniform, beta };
  Kind kind = Kind::uniform;
  double a = 0.0;  // two_point: low value; uniform: lower end; beta: alpha
  double b = 1.0;  // two_point: high value; uniform: upper end; beta: beta
  double p = 0.5;  // two_point: P(X = b)

  static Distribution two_point(double lo, double hi, double p_hi);
  static Distribution uniform(double lo, double hi);
  static Distribution beta(double alpha, double beta);

  double mean() const;
  double variance() const;
  double sample(RngStream& rng) const;
  void validate() const;
};

struct ContextLaw {
  enum class Kind { uniform, beta };
  Kind kind = Kind::uniform;
  /// Uniform(mu_c - w, mu_c + w); the interval must stay inside [0, 1].
  double half_width = 0.2;
  /// Beta(mu_c * k, (1 - mu_c) * k).
  double concentration = 20.0;
};

struct SignalConfig {
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::size_t n_ctx = 0;
  double x_plus = 0.8;
  double x_minus = 0.2;
  double mu_p = 0.9;
  double mu_n = 0.1;
  double mu_c = 0.5;
  ContextLaw ctx;

  std::size_t total() const { return n_pos + n_neg + n_ctx; }
  Distribution context_distribution() const;
  void validate() const;
};

nlohmann::json to_json(const SignalConfig& config);

/// mu_c + sqrt(q / (1 - q)) / 2
double c_q(double mu_c, double q);

struct BudgetCheck {
  double q = 0.0;
  double c_q = 0.0;
  double k_min = 0.0;       // n_pos mu_p + n_neg mu_n + n_ctx c_q
  double k_tradeoff = 0.0;  // |E| c_q + n_pos (mu_p - c_q) - n_neg (c_q - mu_n)
  std::optional<double> frequency;
};

/// Both algebraic forms of the sufficient budget; throws ValidationError if
/// they disagree beyond 1e-12 (relative to max(1, |K|)).
BudgetCheck budget_bound(const SignalConfig& config, double q);

/// Fraction of trials in which signal mass plus n_ctx iid context scores stays <= K.
/// Trial t draws from stream.child(t).
double monte_carlo_budget(const SignalConfig& config, double k, std::size_t trials, const RngStream& stream,
                          Exec exec = Exec::serial);

struct PopoviciuResult {
  double variance = 0.0;  // population variance
  double bound = 0.25;
  bool pass = false;
};

PopoviciuResult popoviciu_check(std::span<const double> samples);

struct CantelliResult {
  double empirical = 0.0;  // P(X - E[X] <= a)
  double bound = 0.0;      // a^2 / (Var + a^2)
  double standard_error = 0.0;
  bool pass = false;
};

CantelliResult cantelli_check(const Distribution& dist, double a, std::size_t trials, RngStream& rng);

enum class EdgeState { pos, neg, ctx };
std::string to_string(EdgeState s);

/// Context-driven score: sigmoid(gain * mean_{N(e)} W + offset + noise_e).
struct ContextRule {
  double gain = 4.0;
  double offset = -2.0;
  double noise_scale = 0.5;
};

struct SimModel {
  Graph graph;
  EdgeNeighborhoodIndex neighbors;
  std::vector<EdgeState> states;
  std::vector<double> signal_scores;  // fixed scores for pos/neg edges
  std::vector<double> noise;          // per-edge offset for ctx edges
  ContextRule rule;
};

/// Assigns states per undirected pair. With `gt_to_pos`, ground-truth edges
/// fill E_p first. Counts must sum to the directed edge count and be even.
SimModel simulate_latent_model(const Graph& graph, const SignalConfig& config, std::uint64_t seed,
                               const ContextRule& rule = {}, bool gt_to_pos = true);

/// Scores under input edge weights W.
EdgeMask sim_scores(const SimModel& sim, std::span<const double> weights);
ReExplanationRecord simulate_re_explanation(const SimModel& sim);

/// Config with every ground-truth edge positive and the remaining pairs split
/// between negative and context states (ctx_fraction of them context).
SignalConfig signal_config_for(const Graph& graph, double ctx_fraction);

struct StateCorrelation {
  CorrelationTriple context;
  CorrelationTriple signal;
};

/// Pooled delta_s vs delta_c correlation for ctx edges and for pos/neg edges.
StateCorrelation simulation_correlations(std::span<const SimModel> sims,
                                         std::span<const ReExplanationRecord> records);

}  // namespace sdlab
