#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "helpers.hpp"
#include "sdlab/errors.hpp"
#include "sdlab/model.hpp"

using namespace sdlab;
using sdlab::testing::random_graph;
using sdlab::testing::tiny_arch;

TEST_CASE("architecture descriptor validation") {
  CHECK_NOTHROW(ArchDescriptor::desk().validate());
  CHECK_NOTHROW(ArchDescriptor::paper().validate());
  CHECK(ArchDescriptor::paper().explainer_dims == std::vector<std::size_t>{256, 64, 1});
  ArchDescriptor a;
  a.classifier_dims = {8, 1};
  CHECK_THROWS_AS(a.validate(), ConfigError);
  a = {};
  a.r = 1.0;
  CHECK_THROWS_AS(a.validate(), ConfigError);
  a = {};
  a.tau = 0.0;
  CHECK_THROWS_AS(a.validate(), ConfigError);
  a = {};
  a.explainer_dims = {8, 2};
  CHECK_THROWS_AS(a.validate(), ConfigError);
  CHECK(objective_from_string("size") == Objective::size_constrained);
  CHECK(objective_from_string("kl") == Objective::kl_bernoulli);
  CHECK_THROWS_AS(objective_from_string("l1"), ConfigError);
}

TEST_CASE("initialisation is deterministic and shape-consistent") {
  auto a = init_model(ArchDescriptor::desk(), 3);
  CHECK(a == init_model(ArchDescriptor::desk(), 3));
  CHECK_FALSE(a == init_model(ArchDescriptor::desk(), 4));
  CHECK_NOTHROW(check_shapes(a));
  CHECK(a.explainer.input_dim() == 2 * a.arch.embedding_dim());
  a.classifier.layers[0].weight = DenseMatrix(3, 3);
  try {
    check_shapes(a);
    FAIL("expected a shape error");
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("classifier.0.weight") != std::string::npos);
  }
}

TEST_CASE("forward trace invariants") {
  RngStream rng(5);
  auto model = init_model(tiny_arch(3), 1);
  for (int t = 0; t < 10; ++t) {
    Graph g = random_graph(5 + rng.below(5), rng.below(4), 3, rng);
    auto trace = explain_and_predict(model, g);
    REQUIRE(trace.soft_mask.size() == g.num_edges());
    for (double m : trace.soft_mask) CHECK((m > 0.0 && m < 1.0));
    CHECK(std::accumulate(trace.class_probs.begin(), trace.class_probs.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(trace.sampled());
    auto first = compute_edge_scores(model, g, EdgeMask::ones(g.num_edges()));
    for (std::size_t e = 0; e < g.num_edges(); ++e) CHECK(first[e] == trace.soft_mask[e]);
    auto p = predict(model, g, EdgeMask(trace.soft_mask));
    CHECK(p.logits == trace.class_logits);

    RngStream noise(t);
    auto sampled = explain_and_predict(model, g, {true, &noise, 0.0});
    CHECK(sampled.sampled());
    CHECK(sampled.soft_mask == trace.soft_mask);
  }
  Graph g = random_graph(4, 1, 3, rng);
  CHECK_THROWS_AS(explain_and_predict(model, g, {true, nullptr, 0.0}), PreconditionError);
  CHECK_THROWS_AS(predict(model, g, EdgeMask::ones(g.num_edges() + 2)), AlignmentError);
}

TEST_CASE("zero mask leaves only node count and self terms") {
  // Two uniform-feature graphs of equal size but different wiring predict
  // identically once every message is masked out.
  auto model = init_model(tiny_arch(2), 9);
  DenseMatrix x(4, 2, 1.0);
  Graph path(4, x, {{0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 3}, {3, 2}}, std::nullopt, 0);
  Graph star(4, x, {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {0, 3}, {3, 0}}, std::nullopt, 0);
  auto a = predict(model, path, EdgeMask::zeros(6));
  auto b = predict(model, star, EdgeMask::zeros(6));
  CHECK(a.logits == b.logits);
  Graph empty(4, x, {}, std::nullopt, 0);
  CHECK(predict(model, empty, EdgeMask()).logits == a.logits);
}

TEST_CASE("losses: closed forms") {
  CHECK(bernoulli_kl(0.3, 0.3) == doctest::Approx(0.0));
  CHECK(bernoulli_kl(0.5, 0.25) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)).epsilon(1e-12));
  CHECK(bernoulli_kl(0.5, 0.25) == doctest::Approx(0.1438).epsilon(1e-3));

  ForwardTrace t;
  t.soft_mask = {0.2, 0.4, 0.6, 0.8};
  t.class_logits = {0.0, 0.0};
  t.class_probs = {0.5, 0.5};
  auto size = loss_size_constrained(t, 1, 0.5);
  CHECK(size.ce == doctest::Approx(std::log(2.0)));
  CHECK(size.regularizer == doctest::Approx(0.5));
  CHECK(size.value == doctest::Approx(std::log(2.0) + 0.25));

  t.soft_mask = {0.5, 0.5, 0.5};
  auto kl = loss_kl_bernoulli(t, 0, 1.0, 0.5);
  CHECK(kl.regularizer == doctest::Approx(0.0));
  for (double d : kl.d_soft_mask) CHECK(d == doctest::Approx(0.0));
  CHECK_THROWS_AS(loss_kl_bernoulli(t, 0, 1.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(loss_kl_bernoulli(t, 5, 1.0, 0.5), PreconditionError);
}

TEST_CASE("named parameters cover every tensor exactly once") {
  auto model = init_model(tiny_arch(3), 2);
  auto views = named_parameters(model);
  std::size_t total = 0;
  std::set<std::string> names;
  for (const auto& v : views) {
    total += v.data.size();
    names.insert(v.name);
  }
  CHECK(names.size() == views.size());
  std::size_t expect = 0;
  for (const auto& l : model.encoder) {
    expect += 1;
    for (const auto& d : l.mlp.layers) expect += d.weight.size() + d.bias.size();
  }
  for (const auto* p : {&model.explainer, &model.classifier}) {
    for (const auto& d : p->layers) expect += d.weight.size() + d.bias.size();
  }
  CHECK(total == expect);
  CHECK(names.count("encoder.0.eps") == 1);
  CHECK(names.count("explainer.1.bias") == 1);
}

TEST_CASE("scoring pass counter") {
  RngStream rng(3);
  auto model = init_model(tiny_arch(3), 2);
  Graph g = random_graph(6, 2, 3, rng);
  reset_scoring_pass_count();
  compute_edge_scores(model, g, EdgeMask::ones(g.num_edges()));
  explain_and_predict(model, g);
  predict(model, g, EdgeMask::ones(g.num_edges()));
  CHECK(scoring_pass_count() == 2);
}
