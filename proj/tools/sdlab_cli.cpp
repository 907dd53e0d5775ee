#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdlab/calibration.hpp"
#include "sdlab/consistency.hpp"
#include "sdlab/ensemble.hpp"
#include "sdlab/errors.hpp"
#include "sdlab/metrics.hpp"
#include "sdlab/model_io.hpp"
#include "sdlab/parallel.hpp"
#include "sdlab/reports.hpp"
#include "sdlab/theory.hpp"
#include "sdlab/train.hpp"

using namespace sdlab;
using nlohmann::json;

namespace {

// Every flag value for every command; each subcommand binds the subset it uses.
struct Options {
  std::string data;
  std::vector<std::string> models;
  std::string out;
  std::vector<std::string> masks;
  std::string adapted_out;
  std::string scatter;
  std::uint64_t seed = 0;
  std::size_t graphs = 500;
  std::string preset = "desk";
  std::string objective = "kl";
  double beta = 0.05;
  double r = 0.5;
  double tau = 1.0;
  int epochs = TrainConfig{}.epochs;
  double lr = TrainConfig{}.lr;
  std::size_t batch = TrainConfig{}.batch_size;
  double eta = SdConfig{}.eta;
  std::vector<double> eta_grid = SdConfig{}.eta_grid;
  int adapt_epochs = SdConfig{}.adapt_epochs;
  std::size_t pool = 5;
  double lambda = 1.0;
  int threads = 1;
  std::string split = "test";
  std::string mode = "pooled";
  std::string ensemble_mode = "sd+ee";
  std::string prop = "1";
  std::size_t trials = 10000;
  double q = 0.9;
  double ctx_fraction = 0.9;
};

std::vector<std::string> g_command_line;

json provenance(const Options& o) { return make_provenance(g_command_line, o.seed); }

Exec exec_for(const Options& o) { return o.threads > 1 ? Exec::parallel : Exec::serial; }

SplitPart split_from(const std::string& s) {
  if (s == "train") return SplitPart::train;
  if (s == "val") return SplitPart::val;
  return SplitPart::test;
}

ArchDescriptor arch_from(const Options& o) {
  ArchDescriptor a = o.preset == "paper" ? ArchDescriptor::paper() : ArchDescriptor::desk();
  a.objective = objective_from_string(o.objective == "size" ? "size_constrained" : "kl_bernoulli");
  a.beta = o.beta;
  a.r = o.r;
  a.tau = o.tau;
  a.validate();
  return a;
}

const std::string& single_model(const Options& o) {
  if (o.models.size() != 1) throw ConfigError("--model: exactly one model file expected");
  return o.models.front();
}

std::vector<std::size_t> all_indices(const Dataset& ds) {
  std::vector<std::size_t> v(ds.graphs.size());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<EdgeMask> masks_for(const Dataset& ds, const std::string& path) {
  std::vector<EdgeMask> masks(ds.graphs.size());
  std::vector<bool> seen(ds.graphs.size(), false);
  for (auto& [id, m] : explanations_from_json(read_json_file(path))) {
    if (id >= ds.graphs.size()) throw ValidationError(path + ": graph_id " + std::to_string(id) + " out of range");
    check_aligned(ds.graphs[id], m.size());
    masks[id] = std::move(m);
    seen[id] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw ValidationError(path + ": no mask for graph " + std::to_string(i));
  }
  return masks;
}

void write_artifact(const std::string& path, json doc, const Options& o) {
  doc["provenance"] = provenance(o);
  write_json_file(path, doc);
}

int cmd_gen_data(const Options& o) {
  const Dataset ds = generate_ba2motifs(o.graphs, o.seed);
  save_dataset(ds, o.out, provenance(o));
  std::printf("wrote %zu graphs (%zu train / %zu val / %zu test) to %s\n", ds.graphs.size(), ds.split.train.size(),
              ds.split.val.size(), ds.split.test.size(), o.out.c_str());
  return 0;
}

int cmd_train(const Options& o) {
  const Dataset ds = load_dataset(o.data);
  TrainConfig cfg;
  cfg.arch = arch_from(o);
  cfg.arch.feature_dim = ds.graphs.empty() ? cfg.arch.feature_dim : ds.graphs.front().feature_dim();
  cfg.epochs = o.epochs;
  cfg.lr = o.lr;
  cfg.batch_size = o.batch;
  cfg.seed = o.seed;
  cfg.exec = exec_for(o);
  const auto res = train(ds, cfg);
  json log = json::array();
  for (const auto& e : res.log) {
    log.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"val_acc", e.val_acc},
                   {"val_auc", e.val_auc ? json(*e.val_auc) : json()}});
  }
  json prov = provenance(o);
  prov["best_epoch"] = res.best_epoch;
  prov["log"] = std::move(log);
  save_model(res.model, o.out, prov);
  const auto& best = res.log[static_cast<std::size_t>(res.best_epoch)];
  std::printf("best epoch %d: val acc %.4f, val auc %s -> %s\n", res.best_epoch, best.val_acc,
              best.val_auc ? std::to_string(*best.val_auc).c_str() : "n/a", o.out.c_str());
  return 0;
}

int cmd_explain(const Options& o) {
  const Dataset ds = load_dataset(o.data);
  const SiGnnModel model = load_model(single_model(o));
  const auto ids = all_indices(ds);
  std::vector<EdgeMask> masks(ids.size());
  for_each_index(ids.size(), exec_for(o), [&](std::size_t i) {
    masks[i] = compute_edge_scores(model, ds.graphs[i], EdgeMask::ones(ds.graphs[i].num_edges()));
  });
  write_artifact(o.out, explanations_json(ids, masks), o);
  std::printf("explained %zu graphs -> %s\n", ids.size(), o.out.c_str());
  return 0;
}

int cmd_sd(const Options& o) {
  const Dataset ds = load_dataset(o.data);
  const SiGnnModel model = load_model(single_model(o));
  SdConfig cfg;
  cfg.eta = o.eta;
  cfg.adapt_epochs = o.adapt_epochs;
  cfg.seed = o.seed;
  cfg.validate();
  const bool adapt = !o.adapted_out.empty();
  const auto out = calibrate_dataset(model, ds, o.eta, adapt, cfg, exec_for(o));
  json doc = calibration_report_json(out.per_graph, o.eta);
  double before = 0.0, after = 0.0, esc_sum = 0.0;
  for (std::size_t i = 0; i < out.per_graph.size(); ++i) {
    doc["graphs"][i]["mask"] = out.per_graph[i].calibrated.values();
    before += out.per_graph[i].spa_before;
    after += out.per_graph[i].spa_after;
    esc_sum += out.per_graph[i].esc;
  }
  write_artifact(o.out, std::move(doc), o);
  if (adapt) save_model(*out.adapted, o.adapted_out, provenance(o));
  const double n = std::max<double>(1.0, static_cast<double>(out.per_graph.size()));
  std::printf("eta %.4g: mean esc %.4f, spa %.4f -> %.4f -> %s\n", o.eta, esc_sum / n, before / n, after / n,
              o.out.c_str());
  return 0;
}

int cmd_select_eta(const Options& o) {
  const Dataset ds = load_dataset(o.data);
  const SiGnnModel model = load_model(single_model(o));
  SdConfig cfg;
  cfg.eta_grid = o.eta_grid;
  cfg.adapt_epochs = o.adapt_epochs;
  cfg.seed = o.seed;
  const auto rep = select_eta(model, ds, cfg, exec_for(o));
  write_artifact(o.out, selection_report_json(rep), o);
  if (!o.adapted_out.empty()) save_model(rep.adapted, o.adapted_out, provenance(o));
  std::printf("chosen eta %.4g -> %s\n", rep.chosen_eta, o.out.c_str());
  return 0;
}

int cmd_eval(const Options& o) {
  const Dataset ds = load_dataset(o.data);
  if (o.models.empty() || o.models.size() != o.masks.size()) {
    throw ConfigError("--model and --masks must be given the same number of times");
  }
  const auto& idx = ds.indices(split_from(o.split));
  std::vector<ModelEval> evals;
  for (std::size_t k = 0; k < o.models.size(); ++k) {
    const SiGnnModel model = load_model(o.models[k]);
    const auto all = masks_for(ds, o.masks[k]);
    std::vector<EdgeMask> masks;
    for (std::size_t i : idx) masks.push_back(all[i]);
    evals.push_back(evaluate(model, ds, idx, masks, o.seed + k));
  }
  const auto rep = aggregate(o.data, std::move(evals));
  write_artifact(o.out, report_to_json(rep), o);
  for (const auto& [name, ms] : rep.aggregate) std::printf("%s %.2f +- %.2f  ", name.c_str(), 100 * ms.mean, 100 * ms.std);
  std::printf("-> %s\n", o.out.c_str());
  return 0;
}

json triple_json(const CorrelationTriple& t) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(); };
  return {{"pearson", opt(t.pearson)}, {"spearman", opt(t.spearman)}, {"kendall", opt(t.kendall)}, {"count", t.count}};
}

int cmd_correlate(const Options& o) {
  const Dataset ds = load_dataset(o.data);
  const SiGnnModel model = load_model(single_model(o));
  if (o.mode != "pooled" && o.mode != "per-graph") throw ConfigError("--mode must be pooled or per-graph");
  const auto split = split_from(o.split);
  const auto rep =
      correlation_report(model, ds, split, o.mode == "pooled" ? CorrelationMode::pooled : CorrelationMode::per_graph);
  write_artifact(o.out,
                 {{"mode", o.mode}, {"split", o.split}, {"important", triple_json(rep.important)},
                  {"unimportant", triple_json(rep.unimportant)}},
                 o);
  if (!o.scatter.empty()) {
    scatter_export(model, ds, split, o.scatter);
    write_json_file(o.scatter + ".provenance.json", {{"provenance", provenance(o)}});
  }
  auto show = [](const std::optional<double>& v) { return v ? *v : std::nan(""); };
  std::printf("pearson important %.4f unimportant %.4f -> %s\n", show(rep.important.pearson),
              show(rep.unimportant.pearson), o.out.c_str());
  return 0;
}

int theory_budget(const Options& o) {
  SignalConfig c;
  c.n_pos = 10;
  c.n_neg = 20;
  c.n_ctx = 30;
  auto check = budget_bound(c, o.q);
  const double f = monte_carlo_budget(c, check.k_min, o.trials, RngStream(o.seed), exec_for(o));
  check.frequency = f;
  const bool pass = f >= o.q - 0.01;
  write_artifact(o.out, theory_report_json(c, check, o.trials, pass), o);
  std::printf("budget: K_min %.4f, frequency %.4f vs q %.3f: %s -> %s\n", check.k_min, f, o.q, pass ? "pass" : "fail",
              o.out.c_str());
  return 0;
}

int theory_threshold(const Options& o) {
  RngStream rng(o.seed);
  std::size_t checked = 0, violations = 0;
  while (checked < o.trials) {
    const double mp = rng.uniform(0.01, 0.99), mm = rng.uniform(mp, 1.0);
    const double dp = rng.uniform(0.0, 0.99), dm = rng.uniform(dp, 1.0);
    if (!(mp < mm && dp < dm)) continue;
    const auto th = ranking_correction_threshold(mp, mm, dp, dm);
    if (!th) continue;
    ++checked;
    auto flipped = [&](double eta) { return (1 - eta * dp) * mp > (1 - eta * dm) * mm; };
    if (!flipped(*th * (1 + 1e-6)) || flipped(*th * (1 - 1e-6))) ++violations;
  }
  write_artifact(o.out, {{"prop", "threshold"}, {"trials", checked}, {"violations", violations}, {"pass", violations == 0}},
                 o);
  std::printf("threshold: %zu violations in %zu tuples -> %s\n", violations, checked, o.out.c_str());
  return 0;
}

int theory_stability(const Options& o) {
  const Dataset ds = load_dataset(o.data);
  const SiGnnModel model = load_model(single_model(o));
  if (!(o.eta >= 0.0)) throw ConfigError("--eta must be >= 0");
  const auto& idx = ds.indices(split_from(o.split));
  json rows = json::array();
  bool pass = true;
  for (std::size_t i : idx) {
    const auto& g = ds.graphs[i];
    const auto rec = re_explain(model, g);
    const auto cal = self_denoise(rec.m1, rec.delta_s, o.eta);
    const int cls = predict(model, g, rec.m1).predicted;
    const auto s = stochastic_prediction_shift(model, g, rec.m1, cal, cls, o.trials, RngStream(o.seed).child(i),
                                               exec_for(o));
    const double bound = o.eta * damping_mass(rec.m1, rec.delta_s);
    const bool ok = s.shift <= bound + 3.0 * s.standard_error;
    pass = pass && ok;
    rows.push_back({{"graph_id", i}, {"shift", s.shift}, {"standard_error", s.standard_error}, {"bound", bound},
                    {"pass", ok}});
  }
  write_artifact(o.out, {{"prop", "stability"}, {"eta", o.eta}, {"samples", o.trials}, {"graphs", rows}, {"pass", pass}},
                 o);
  std::printf("stability: %zu graphs, %s -> %s\n", idx.size(), pass ? "pass" : "fail", o.out.c_str());
  return 0;
}

int theory_simulation(const Options& o) {
  const Dataset ds = load_dataset(o.data);
  std::vector<SimModel> sims;
  std::vector<ReExplanationRecord> recs;
  for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
    sims.push_back(simulate_latent_model(ds.graphs[i], signal_config_for(ds.graphs[i], o.ctx_fraction), o.seed + i));
    recs.push_back(simulate_re_explanation(sims.back()));
  }
  const auto c = simulation_correlations(sims, recs);
  write_artifact(o.out,
                 {{"prop", "simulation"}, {"ctx_fraction", o.ctx_fraction}, {"context", triple_json(c.context)},
                  {"signal", triple_json(c.signal)}},
                 o);
  if (!o.scatter.empty()) {
    std::ofstream f(o.scatter);
    if (!f) throw IoError("cannot open " + o.scatter + " for writing");
    std::vector<const Graph*> graphs;
    std::vector<std::vector<std::string>> states;
    for (const auto& s : sims) {
      graphs.push_back(&s.graph);
      states.emplace_back();
      for (auto st : s.states) states.back().push_back(to_string(st));
    }
    write_scatter(f, all_indices(ds), graphs, recs, states);
    write_json_file(o.scatter + ".provenance.json", {{"provenance", provenance(o)}});
  }
  std::printf("simulation: context pearson %s -> %s\n",
              c.context.pearson ? std::to_string(*c.context.pearson).c_str() : "n/a", o.out.c_str());
  return 0;
}

int cmd_theory(const Options& o) {
  if (o.prop == "1") return theory_budget(o);
  if (o.prop == "2") return theory_threshold(o);
  if (o.prop == "4") return theory_stability(o);
  if (o.prop == "sim") return theory_simulation(o);
  throw ConfigError("--prop must be one of 1, 2, 4, sim");
}

int cmd_ensemble(const Options& o) {
  const Dataset ds = load_dataset(o.data);
  if (o.ensemble_mode != "ee" && o.ensemble_mode != "sd+ee") throw ConfigError("--mode must be ee or sd+ee");
  if (!(o.eta >= 0.0)) throw ConfigError("--eta must be >= 0");
  ModelPool pool;
  if (!o.models.empty()) {
    for (std::size_t k = 0; k < o.models.size(); ++k) {
      pool.models.push_back(load_model(o.models[k]));
      pool.seeds.push_back(o.seed + k);
    }
  } else {
    TrainConfig cfg;
    cfg.arch = arch_from(o);
    cfg.arch.feature_dim = ds.graphs.empty() ? cfg.arch.feature_dim : ds.graphs.front().feature_dim();
    cfg.epochs = o.epochs;
    cfg.lr = o.lr;
    cfg.batch_size = o.batch;
    cfg.exec = exec_for(o);
    for (std::size_t k = 0; k < o.pool; ++k) {
      cfg.seed = o.seed + k;
      pool.models.push_back(train(ds, cfg).model);
      pool.seeds.push_back(cfg.seed);
    }
  }
  pool.validate();
  const auto ids = all_indices(ds);
  std::vector<EdgeMask> masks(ids.size());
  for_each_index(ids.size(), exec_for(o), [&](std::size_t i) {
    masks[i] = o.ensemble_mode == "ee" ? ee_calibrate(pool, ds.graphs[i], o.lambda)
                                       : sd_then_ee(pool, ds.graphs[i], o.eta, o.lambda);
  });
  json doc = explanations_json(ids, masks);
  doc["mode"] = o.ensemble_mode;
  doc["lambda"] = o.lambda;
  doc["eta"] = o.ensemble_mode == "ee" ? json() : json(o.eta);
  doc["pool_seeds"] = pool.seeds;
  doc["aggregation"] = "approximate: mean damped by cross-model standard deviation";
  std::vector<const Graph*> graphs;
  std::vector<EdgeMask> test_masks;
  for (std::size_t i : ds.split.test) {
    graphs.push_back(&ds.graphs[i]);
    test_masks.push_back(masks[i]);
  }
  const auto auc = ds.graphs.empty() || !ds.graphs.front().has_ground_truth() ? std::nullopt
                                                                              : pooled_auc(graphs, test_masks);
  doc["test_auc"] = auc ? json(*auc) : json();
  write_artifact(o.out, std::move(doc), o);
  std::printf("%s over %zu models: test auc %s -> %s\n", o.ensemble_mode.c_str(), pool.models.size(),
              auc ? std::to_string(*auc).c_str() : "n/a", o.out.c_str());
  return 0;
}

// Flag helpers keep names and checks identical across subcommands.
void add_data(CLI::App* c, Options& o) { c->add_option("--data", o.data, "Dataset JSON")->required(); }
void add_model(CLI::App* c, Options& o) { c->add_option("--model", o.models, "Model JSON")->required(); }
void add_out(CLI::App* c, Options& o) { c->add_option("--out", o.out, "Output path")->required(); }
void add_seed(CLI::App* c, Options& o) { c->add_option("--seed", o.seed, "Random seed"); }
void add_threads(CLI::App* c, Options& o) {
  c->add_option("--threads", o.threads, "OpenMP threads; 1 runs the serial path")->check(CLI::PositiveNumber);
}
void add_eta(CLI::App* c, Options& o) {
  c->add_option("--eta", o.eta, "Denoising strength")->check(CLI::NonNegativeNumber);
}
void add_training(CLI::App* c, Options& o) {
  c->add_option("--preset", o.preset, "Architecture preset")->check(CLI::IsMember({"desk", "paper"}));
  c->add_option("--objective", o.objective, "Training objective")->check(CLI::IsMember({"size", "kl"}));
  c->add_option("--beta", o.beta, "Regularizer weight")->check(CLI::NonNegativeNumber);
  c->add_option("--r", o.r, "Bernoulli prior")->check(CLI::Range(0.0, 1.0));
  c->add_option("--tau", o.tau, "Gumbel-sigmoid temperature")->check(CLI::PositiveNumber);
  c->add_option("--epochs", o.epochs, "Training epochs")->check(CLI::PositiveNumber);
  c->add_option("--lr", o.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  c->add_option("--batch", o.batch, "Mini-batch size; 0 is full batch");
}

}  // namespace

int main(int argc, char** argv) {
  g_command_line.assign(argv, argv + argc);
  Options o;
  CLI::App app{"Self-interpretable GNN explanation lab"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "TOML/INI config; keys are flag names in [command] sections, flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic house/cycle motif dataset");
  add_out(gen, o);
  add_seed(gen, o);
  gen->add_option("--graphs", o.graphs, "Number of graphs")->check(CLI::PositiveNumber);

  auto* tr = app.add_subcommand("train", "Train a self-interpretable GNN");
  add_data(tr, o);
  add_out(tr, o);
  add_seed(tr, o);
  add_threads(tr, o);
  add_training(tr, o);

  auto* ex = app.add_subcommand("explain", "First-pass edge masks for every graph");
  add_data(ex, o);
  add_model(ex, o);
  add_out(ex, o);
  add_threads(ex, o);

  auto* sd = app.add_subcommand("sd", "Self-denoise every explanation");
  add_data(sd, o);
  add_model(sd, o);
  add_out(sd, o);
  add_seed(sd, o);
  add_threads(sd, o);
  add_eta(sd, o);
  sd->add_option("--adapt-epochs", o.adapt_epochs, "Classifier adaptation epochs")->check(CLI::NonNegativeNumber);
  sd->add_option("--adapted-model", o.adapted_out, "Also write the classifier-adapted model here");

  auto* sel = app.add_subcommand("select-eta", "Choose eta by adapted validation accuracy");
  add_data(sel, o);
  add_model(sel, o);
  add_out(sel, o);
  add_seed(sel, o);
  add_threads(sel, o);
  sel->add_option("--eta-grid", o.eta_grid, "Candidate eta values (must include 0)")
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber);
  sel->add_option("--adapt-epochs", o.adapt_epochs, "Classifier adaptation epochs")->check(CLI::NonNegativeNumber);
  sel->add_option("--adapted-model", o.adapted_out, "Also write the model adapted at the chosen eta");

  auto* ev = app.add_subcommand("eval", "AUC, SPA, ACC and fidelity over one or more models");
  add_data(ev, o);
  add_model(ev, o);
  add_out(ev, o);
  add_seed(ev, o);
  ev->add_option("--masks", o.masks, "Mask file per model (explain, sd or ensemble output)")->required();
  ev->add_option("--split", o.split, "Split to evaluate")->check(CLI::IsMember({"train", "val", "test"}));

  auto* co = app.add_subcommand("correlate", "Score variation vs context variation");
  add_data(co, o);
  add_model(co, o);
  add_out(co, o);
  add_seed(co, o);
  co->add_option("--split", o.split, "Split to analyse")->check(CLI::IsMember({"train", "val", "test"}));
  co->add_option("--mode", o.mode, "pooled or per-graph")->check(CLI::IsMember({"pooled", "per-graph"}));
  co->add_option("--scatter", o.scatter, "Also write the per-edge scatter CSV here");

  auto* th = app.add_subcommand("theory", "Numerical checks of the theoretical results");
  th->add_option("--prop", o.prop, "1 budget, 2 threshold, 4 stability, sim latent simulation")
      ->check(CLI::IsMember({"1", "2", "4", "sim"}));
  add_out(th, o);
  add_seed(th, o);
  add_threads(th, o);
  add_eta(th, o);
  th->add_option("--data", o.data, "Dataset JSON (prop 4 and sim)");
  th->add_option("--model", o.models, "Model JSON (prop 4)");
  th->add_option("--trials", o.trials, "Monte Carlo trials or tuples")->check(CLI::PositiveNumber);
  th->add_option("--q", o.q, "Target satisfaction probability (prop 1)")->check(CLI::Range(0.0, 1.0));
  th->add_option("--split", o.split, "Split (prop 4)")->check(CLI::IsMember({"train", "val", "test"}));
  th->add_option("--ctx-fraction", o.ctx_fraction, "Share of non-ground-truth pairs that are context-driven (sim)")
      ->check(CLI::Range(0.0, 1.0));
  th->add_option("--scatter", o.scatter, "Simulation scatter CSV with a state column (sim)");

  auto* en = app.add_subcommand("ensemble", "Cross-model explanation ensembling");
  add_data(en, o);
  add_out(en, o);
  add_seed(en, o);
  add_threads(en, o);
  add_eta(en, o);
  add_training(en, o);
  en->add_option("--model", o.models, "Pool members; when absent, --pool models are trained from --seed");
  en->add_option("--pool", o.pool, "Pool size when training")->check(CLI::Range(2, 1000));
  en->add_option("--lambda", o.lambda, "Dispersion damping")->check(CLI::NonNegativeNumber);
  en->add_option("--mode", o.ensemble_mode, "ee or sd+ee")->check(CLI::IsMember({"ee", "sd+ee"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  set_num_threads(o.threads);
  try {
    if (*gen) return cmd_gen_data(o);
    if (*tr) return cmd_train(o);
    if (*ex) return cmd_explain(o);
    if (*sd) return cmd_sd(o);
    if (*sel) return cmd_select_eta(o);
    if (*ev) return cmd_eval(o);
    if (*co) return cmd_correlate(o);
    if (*th) return cmd_theory(o);
    if (*en) return cmd_ensemble(o);
  } catch (const TrainingError& e) {
    std::cerr << "training error: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
