#include <doctest.h>

#include "helpers.hpp"
#include "sdlab/errors.hpp"
#include "sdlab/train.hpp"

using namespace sdlab;

namespace {

TrainConfig quick_config(int epochs = 3) {
  TrainConfig c;
  c.epochs = epochs;
  c.batch_size = 8;
  c.arch.encoder_dims = {6, 6};
  c.arch.explainer_dims = {6, 1};
  c.arch.classifier_dims = {6, 2};
  return c;
}

}  // namespace

TEST_CASE("training is deterministic given the seed") {
  auto ds = generate_ba2motifs(30, 2);
  auto a = train(ds, quick_config());
  auto b = train(ds, quick_config());
  CHECK(a.model == b.model);
  REQUIRE(a.log.size() == 3);
  for (const auto& e : a.log) {
    CHECK(std::isfinite(e.loss));
    CHECK(e.val_auc.has_value());
  }
  auto c = quick_config();
  c.seed = 1;
  CHECK_FALSE(train(ds, c).model == a.model);
  c = quick_config();
  c.exec = Exec::parallel;
  CHECK(train(ds, c).model == a.model);
}

TEST_CASE("training configuration is validated") {
  auto ds = generate_ba2motifs(10, 2);
  auto c = quick_config(0);
  CHECK_THROWS_AS(train(ds, c), ConfigError);
  c = quick_config();
  c.lr = 0.0;
  CHECK_THROWS_AS(train(ds, c), ConfigError);
  c = quick_config();
  c.arch.feature_dim = 7;
  CHECK_THROWS_AS(train(ds, c), ConfigError);
  c = quick_config();
  c.r_decay_interval = 0;
  CHECK_THROWS_AS(train(ds, c), ConfigError);
  auto empty = ds;
  empty.split.train.clear();
  CHECK_THROWS_AS(train(empty, quick_config()), PreconditionError);
}

TEST_CASE("prior schedule steps down to the target") {
  TrainConfig c;
  c.arch.r = 0.5;
  c.r_init = 0.9;
  c.r_decay = 0.1;
  c.r_decay_interval = 10;
  CHECK(scheduled_prior(c, 0) == 0.9);
  CHECK(scheduled_prior(c, 9) == 0.9);
  CHECK(scheduled_prior(c, 10) == doctest::Approx(0.8));
  CHECK(scheduled_prior(c, 35) == doctest::Approx(0.6));
  CHECK(scheduled_prior(c, 1000) == 0.5);
  c.r_decay = 0.0;
  CHECK(scheduled_prior(c, 0) == 0.5);
}

TEST_CASE("divergence raises a training error carrying the epoch") {
  auto ds = generate_ba2motifs(10, 4);
  std::vector<Graph> graphs;
  for (const auto& g : ds.graphs) {
    graphs.emplace_back(g.num_nodes(), DenseMatrix(g.num_nodes(), g.feature_dim(), 1e300),
                        std::vector<Edge>(g.edges().begin(), g.edges().end()), g.gt_edge_labels(), g.label());
  }
  ds.graphs = std::move(graphs);
  try {
    train(ds, quick_config());
    FAIL("expected divergence");
  } catch (const TrainingError& e) {
    CHECK(e.epoch() == 0);
  }
}

TEST_CASE("classifier adaptation touches only the classifier") {
  auto ds = generate_ba2motifs(40, 6);
  auto model = train(ds, quick_config(5)).model;
  std::vector<EdgeMask> masks;
  for (const auto& g : ds.graphs) masks.push_back(compute_edge_scores(model, g, EdgeMask::ones(g.num_edges())));

  AdaptConfig none;
  none.epochs = 0;
  CHECK(adapt_classifier(model, ds, masks, none) == model);

  auto adapted = adapt_classifier(model, ds, masks);
  CHECK(adapted.encoder == model.encoder);
  CHECK(adapted.explainer == model.explainer);
  CHECK_FALSE(adapted.classifier == model.classifier);
  for (const auto& g : ds.graphs) {
    CHECK(compute_edge_scores(adapted, g, EdgeMask::ones(g.num_edges())) ==
          compute_edge_scores(model, g, EdgeMask::ones(g.num_edges())));
  }
  std::vector<EdgeMask> short_list(masks.begin(), masks.begin() + 3);
  CHECK_THROWS_AS(adapt_classifier(model, ds, short_list), AlignmentError);
}

TEST_CASE("adapting on all-ones masks keeps validation accuracy") {
  auto ds = generate_ba2motifs(500, 8);
  std::vector<EdgeMask> ones;
  for (const auto& g : ds.graphs) ones.push_back(EdgeMask::ones(g.num_edges()));
  // Start from a classifier already fitted to full-graph embeddings.
  AdaptConfig fit;
  fit.epochs = 150;
  fit.lr = 1e-2;
  auto model = adapt_classifier(init_model(quick_config().arch, 8), ds, ones, fit);
  const double before = masked_accuracy(model, ds, ds.split.val, ones);
  const double after = masked_accuracy(adapt_classifier(model, ds, ones), ds, ds.split.val, ones);
  CHECK(std::abs(after - before) <= 0.02 + 1e-12);
}
