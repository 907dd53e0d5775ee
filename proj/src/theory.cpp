#include "sdlab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sdlab/errors.hpp"
#include "sdlab/ops.hpp"

namespace sdlab {

Distribution Distribution::two_point(double lo, double hi, double p_hi) {
  Distribution d{Kind::two_point, lo, hi, p_hi};
  d.validate();
  return d;
}

Distribution Distribution::uniform(double lo, double hi) {
  Distribution d{Kind::uniform, lo, hi, 0.0};
  d.validate();
  return d;
}

Distribution Distribution::beta(double alpha, double beta) {
  Distribution d{Kind::beta, alpha, beta, 0.0};
  d.validate();
  return d;
}

void Distribution::validate() const {
  switch (kind) {
    case Kind::two_point:
      if (!(a <= b) || !(p >= 0.0 && p <= 1.0)) throw ConfigError("two-point law needs lo <= hi, p in [0,1]");
      break;
    case Kind::uniform:
      if (!(a <= b)) throw ConfigError("uniform law needs lo <= hi");
      break;
    case Kind::beta:
      if (!(a > 0.0 && b > 0.0)) throw ConfigError("beta law needs positive shape parameters");
      break;
  }
}

double Distribution::mean() const {
  switch (kind) {
    case Kind::two_point: return (1.0 - p) * a + p * b;
    case Kind::uniform: return 0.5 * (a + b);
    case Kind::beta: return a / (a + b);
  }
  return 0.0;
}

double Distribution::variance() const {
  switch (kind) {
    case Kind::two_point: return p * (1.0 - p) * (b - a) * (b - a);
    case Kind::uniform: return (b - a) * (b - a) / 12.0;
    case Kind::beta: return a * b / ((a + b) * (a + b) * (a + b + 1.0));
  }
  return 0.0;
}

double Distribution::sample(RngStream& rng) const {
  switch (kind) {
    case Kind::two_point: return rng.uniform() < p ? b : a;
    case Kind::uniform: return rng.uniform(a, b);
    case Kind::beta: {
      std::gamma_distribution<double> ga(a, 1.0);
      std::gamma_distribution<double> gb(b, 1.0);
      const double x = ga(rng);
      const double y = gb(rng);
      return x / (x + y);
    }
  }
  return 0.0;
}

Distribution SignalConfig::context_distribution() const {
  if (ctx.kind == ContextLaw::Kind::uniform) {
    return Distribution::uniform(mu_c - ctx.half_width, mu_c + ctx.half_width);
  }
  return Distribution::beta(mu_c * ctx.concentration, (1.0 - mu_c) * ctx.concentration);
}

void SignalConfig::validate() const {
  if (!(x_minus >= 0.0 && x_minus < x_plus && x_plus <= 1.0)) {
    throw ConfigError("need 0 <= x_minus < x_plus <= 1");
  }
  if (!(mu_p >= x_plus && mu_p <= 1.0)) throw ConfigError("mu_p must lie in [x_plus, 1]");
  if (!(mu_n >= 0.0 && mu_n <= x_minus)) throw ConfigError("mu_n must lie in [0, x_minus]");
  if (!(mu_c >= 0.0 && mu_c <= 1.0)) throw ConfigError("mu_c must lie in [0, 1]");
  if (ctx.kind == ContextLaw::Kind::uniform) {
    if (!(ctx.half_width >= 0.0) || mu_c - ctx.half_width < 0.0 || mu_c + ctx.half_width > 1.0) {
      throw ConfigError("uniform context interval must stay inside [0,1]");
    }
  } else {
    if (!(mu_c > 0.0 && mu_c < 1.0) || !(ctx.concentration > 0.0)) {
      throw ConfigError("beta context law needs mu_c in (0,1) and positive concentration");
    }
  }
}

nlohmann::json to_json(const SignalConfig& c) {
  return {{"n_pos", c.n_pos},
          {"n_neg", c.n_neg},
          {"n_ctx", c.n_ctx},
          {"x_plus", c.x_plus},
          {"x_minus", c.x_minus},
          {"mu_p", c.mu_p},
          {"mu_n", c.mu_n},
          {"mu_c", c.mu_c},
          {"ctx_distribution", c.ctx.kind == ContextLaw::Kind::uniform ? "uniform" : "beta"},
          {"ctx_half_width", c.ctx.half_width},
          {"ctx_concentration", c.ctx.concentration}};
}

double c_q(double mu_c, double q) {
  if (!(q > 0.0 && q < 1.0)) throw PreconditionError("q must lie in (0,1)");
  return mu_c + 0.5 * std::sqrt(q / (1.0 - q));
}

BudgetCheck budget_bound(const SignalConfig& config, double q) {
  config.validate();
  BudgetCheck bc;
  bc.q = q;
  bc.c_q = c_q(config.mu_c, q);
  const auto np = static_cast<double>(config.n_pos);
  const auto nn = static_cast<double>(config.n_neg);
  const auto nc = static_cast<double>(config.n_ctx);
  const auto ne = static_cast<double>(config.total());
  bc.k_min = np * config.mu_p + nn * config.mu_n + nc * bc.c_q;
  bc.k_tradeoff = ne * bc.c_q + np * (config.mu_p - bc.c_q) - nn * (bc.c_q - config.mu_n);
  if (std::abs(bc.k_min - bc.k_tradeoff) > 1e-12 * std::max(1.0, std::abs(bc.k_min))) {
    throw ValidationError("budget forms disagree");
  }
  return bc;
}

double monte_carlo_budget(const SignalConfig& config, double k, std::size_t trials, const RngStream& stream,
                          Exec exec) {
  config.validate();
  if (trials < 1000) throw PreconditionError("monte_carlo_budget needs at least 1000 trials");
  const Distribution law = config.context_distribution();
  const double signal = static_cast<double>(config.n_pos) * config.mu_p +
                        static_cast<double>(config.n_neg) * config.mu_n;
  std::vector<unsigned char> ok(trials, 0);
  for_each_index(trials, exec, [&](std::size_t t) {
    RngStream rng = stream.child(t);
    double total = signal;
    for (std::size_t i = 0; i < config.n_ctx; ++i) total += law.sample(rng);
    ok[t] = total <= k ? 1 : 0;
  });
  std::size_t hits = 0;
  for (auto v : ok) hits += v;
  return static_cast<double>(hits) / static_cast<double>(trials);
}

PopoviciuResult popoviciu_check(std::span<const double> samples) {
  if (samples.size() < 2) throw PreconditionError("popoviciu_check needs >= 2 samples");
  double mean = 0.0;
  for (double x : samples) {
    if (!(x >= 0.0 && x <= 1.0)) throw PreconditionError("popoviciu_check samples must lie in [0,1]");
    mean += x;
  }
  mean /= static_cast<double>(samples.size());
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  PopoviciuResult r;
  r.variance = ss / static_cast<double>(samples.size());
  r.pass = r.variance <= r.bound + 1e-12;
  return r;
}

CantelliResult cantelli_check(const Distribution& dist, double a, std::size_t trials, RngStream& rng) {
  if (!(a > 0.0)) throw PreconditionError("cantelli_check needs a > 0");
  if (trials == 0) throw PreconditionError("cantelli_check needs trials > 0");
  dist.validate();
  const double mu = dist.mean();
  const double var = dist.variance();
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    if (dist.sample(rng) - mu <= a) ++hits;
  }
  CantelliResult r;
  const double n = static_cast<double>(trials);
  r.empirical = static_cast<double>(hits) / n;
  r.bound = a * a / (var + a * a);
  r.standard_error = std::sqrt(r.empirical * (1.0 - r.empirical) / n);
  r.pass = r.empirical >= r.bound - 3.0 * r.standard_error;
  return r;
}

std::string to_string(EdgeState s) {
  switch (s) {
    case EdgeState::pos: return "pos";
    case EdgeState::neg: return "neg";
    case EdgeState::ctx: return "ctx";
  }
  return "ctx";
}

SimModel simulate_latent_model(const Graph& graph, const SignalConfig& config, std::uint64_t seed,
                               const ContextRule& rule, bool gt_to_pos) {
  if (!(config.x_minus >= 0.0 && config.x_minus < config.x_plus && config.x_plus <= 1.0)) {
    throw ConfigError("need 0 <= x_minus < x_plus <= 1");
  }
  if (config.total() != graph.num_edges()) {
    throw ConfigError("state counts sum to " + std::to_string(config.total()) + ", graph has " +
                      std::to_string(graph.num_edges()) + " directed edges");
  }
  if (config.n_pos % 2 || config.n_neg % 2 || config.n_ctx % 2) {
    throw ConfigError("state counts must be even (both orientations share a state)");
  }
  RngStream rng(seed);
  std::vector<std::size_t> important, rest;
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    if (e > graph.reverse(e)) continue;
    const bool gt = gt_to_pos && graph.has_ground_truth() && (*graph.gt_edge_labels())[e];
    (gt ? important : rest).push_back(e);
  }
  auto shuffle = [&rng](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
  };
  shuffle(important);
  shuffle(rest);
  std::vector<std::size_t> order = important;
  order.insert(order.end(), rest.begin(), rest.end());

  SimModel sim{graph, edge_neighbors(graph), {}, {}, {}, rule};
  sim.states.assign(graph.num_edges(), EdgeState::ctx);
  sim.signal_scores.assign(graph.num_edges(), 0.0);
  sim.noise.assign(graph.num_edges(), 0.0);
  const std::size_t pos_pairs = config.n_pos / 2;
  // Negative pairs are drawn from what remains after the positive block.
  std::vector<std::size_t> tail(order.begin() + static_cast<std::ptrdiff_t>(pos_pairs), order.end());
  shuffle(tail);
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::size_t e;
    EdgeState s;
    if (k < pos_pairs) {
      e = order[k];
      s = EdgeState::pos;
    } else {
      e = tail[k - pos_pairs];
      s = k - pos_pairs < config.n_neg / 2 ? EdgeState::neg : EdgeState::ctx;
    }
    double score = 0.0;
    if (s == EdgeState::pos) score = rng.uniform(config.x_plus, 1.0);
    if (s == EdgeState::neg) score = rng.uniform(0.0, config.x_minus);
    const double noise = rule.noise_scale * rng.normal();
    for (std::size_t f : {e, graph.reverse(e)}) {
      sim.states[f] = s;
      sim.signal_scores[f] = score;
      sim.noise[f] = noise;
    }
  }
  return sim;
}

EdgeMask sim_scores(const SimModel& sim, std::span<const double> weights) {
  check_aligned(sim.graph, weights.size());
  std::vector<double> m(weights.size());
  for (std::size_t e = 0; e < m.size(); ++e) {
    if (sim.states[e] != EdgeState::ctx) {
      m[e] = sim.signal_scores[e];
      continue;
    }
    double ctx = 1.0;  // empty neighbourhood: context never changes
    if (!sim.neighbors[e].empty()) {
      ctx = 0.0;
      for (std::size_t f : sim.neighbors[e]) ctx += weights[f];
      ctx /= static_cast<double>(sim.neighbors[e].size());
    }
    m[e] = sigmoid(sim.rule.gain * ctx + sim.rule.offset + sim.noise[e]);
  }
  return EdgeMask(std::move(m));
}

ReExplanationRecord simulate_re_explanation(const SimModel& sim) {
  EdgeMask m1 = sim_scores(sim, std::vector<double>(sim.graph.num_edges(), 1.0));
  EdgeMask m2 = sim_scores(sim, m1.values());
  return make_record(std::move(m1), std::move(m2));
}

SignalConfig signal_config_for(const Graph& graph, double ctx_fraction) {
  if (!(ctx_fraction >= 0.0 && ctx_fraction <= 1.0)) throw ConfigError("ctx_fraction must lie in [0,1]");
  SignalConfig c;
  std::size_t gt = 0;
  if (graph.has_ground_truth()) {
    for (auto v : *graph.gt_edge_labels()) gt += v;
  }
  c.n_pos = gt;
  const std::size_t rest_pairs = (graph.num_edges() - gt) / 2;
  const auto ctx_pairs = static_cast<std::size_t>(std::llround(ctx_fraction * static_cast<double>(rest_pairs)));
  c.n_ctx = 2 * ctx_pairs;
  c.n_neg = graph.num_edges() - gt - c.n_ctx;
  c.mu_p = 0.5 * (c.x_plus + 1.0);
  c.mu_n = 0.5 * c.x_minus;
  return c;
}

StateCorrelation simulation_correlations(std::span<const SimModel> sims,
                                         std::span<const ReExplanationRecord> records) {
  if (sims.size() != records.size()) throw AlignmentError("one record per simulated graph required");
  std::vector<double> ctx_ds, ctx_dc, sig_ds, sig_dc;
  for (std::size_t k = 0; k < sims.size(); ++k) {
    const auto cv = context_variation(sims[k].neighbors, records[k].delta_s);
    for (std::size_t e = 0; e < records[k].delta_s.size(); ++e) {
      if (!cv.delta_c[e]) continue;
      const bool is_ctx = sims[k].states[e] == EdgeState::ctx;
      (is_ctx ? ctx_ds : sig_ds).push_back(records[k].delta_s[e]);
      (is_ctx ? ctx_dc : sig_dc).push_back(*cv.delta_c[e]);
    }
  }
  return {correlate(ctx_ds, ctx_dc), correlate(sig_ds, sig_dc)};
}

}  // namespace sdlab
