#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "sdlab/errors.hpp"
#include "sdlab/metrics.hpp"

using namespace sdlab;
using namespace sdlab::testing;

TEST_CASE("auc matches pair counting on small tied instances") {
  RngStream rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.below(11);
    auto s = tied_sample(n, 4, rng);
    std::vector<std::uint8_t> y(n);
    for (auto& v : y) v = static_cast<std::uint8_t>(rng.below(2));
    const auto got = auc(s, y);
    const auto want = brute_auc(s, y);
    REQUIRE(got.has_value() == want.has_value());
    if (got) CHECK(*got == doctest::Approx(*want).epsilon(1e-15));
  }
}

TEST_CASE("auc hand cases") {
  const std::vector<std::uint8_t> y = {1, 0, 1, 0};
  CHECK(*auc(std::vector<double>{0.9, 0.1, 0.8, 0.2}, y) == 1.0);
  CHECK(*auc(std::vector<double>{0.1, 0.9, 0.2, 0.8}, y) == 0.0);
  CHECK(*auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, y) == 0.5);
  CHECK_FALSE(auc(std::vector<double>{0.3, 0.4}, std::vector<std::uint8_t>{1, 1}).has_value());
  CHECK_THROWS_AS(auc(std::vector<double>{0.3}, std::vector<std::uint8_t>{1, 0}), AlignmentError);
}

TEST_CASE("pooled auc counts each undirected edge once on symmetrized scores") {
  RngStream rng(3);
  // Path 0-1-2-3 with the middle pair marked.
  const Graph g = make_graph(4, {{0, 1}, {1, 2}, {2, 3}}, 2, rng, 0, {0, 1, 0});
  // Directed scores disagree across directions; the mean decides.
  const EdgeMask m({0.2, 0.4, 0.9, 0.1, 0.3, 0.3});
  // Undirected means: 0.3, 0.5, 0.3.
  CHECK(*graph_auc(g, m) == 1.0);
  const EdgeMask flat({0.5, 0.5, 0.25, 0.75, 0.5, 0.5});
  CHECK(*graph_auc(g, flat) == 0.5);

  const Graph no_gt = make_graph(2, {{0, 1}}, 2, rng);
  CHECK_THROWS_AS(graph_auc(no_gt, EdgeMask::ones(2)), PreconditionError);
}

TEST_CASE("spa is the mean mask value") {
  CHECK(spa(EdgeMask({0.0, 0.5, 1.0, 0.5})) == 0.5);
  CHECK(spa(EdgeMask::ones(7)) == 1.0);
  CHECK_THROWS_AS(spa(EdgeMask()), PreconditionError);
}

TEST_CASE("fidelity definitions") {
  RngStream rng(5);
  const auto model = init_model(tiny_arch(), 9);
  for (int t = 0; t < 20; ++t) {
    const Graph g = random_graph(6, 3, 3, rng);
    const EdgeMask m(random_unit_vector(g.num_edges(), rng, 0.0, 1.0));
    CHECK(fid_plus(model, g, m) == fid_minus(model, g, complement(m)));
    CHECK(fid_minus(model, g, EdgeMask::ones(g.num_edges())) == 0);
    const int f = fid_minus(model, g, m);
    CHECK((f == 0 || f == 1));
  }
}

TEST_CASE("evaluate aggregates per-graph metrics") {
  RngStream rng(8);
  Dataset ds;
  for (int i = 0; i < 6; ++i) ds.graphs.push_back(random_graph(5, 2, 3, rng, true));
  const auto model = init_model(tiny_arch(), 2);
  const std::vector<std::size_t> idx = {0, 2, 4};
  std::vector<EdgeMask> masks;
  double spa_sum = 0.0;
  double fm = 0.0;
  for (std::size_t i : idx) {
    masks.emplace_back(random_unit_vector(ds.graphs[i].num_edges(), rng));
    spa_sum += spa(masks.back());
    fm += fid_minus(model, ds.graphs[i], masks.back());
  }
  const auto ev = evaluate(model, ds, idx, masks, 17);
  CHECK(ev.seed == 17);
  CHECK(ev.explanation.spa == doctest::Approx(spa_sum / 3.0));
  CHECK(ev.prediction.fid_minus == doctest::Approx(fm / 3.0));
  CHECK(ev.explanation.auc.has_value());
  CHECK_THROWS_AS(evaluate(model, ds, idx, std::span(masks).first(2)), AlignmentError);
}

TEST_CASE("mean_std uses the population deviation") {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  const auto ms = mean_std(v);
  CHECK(ms.mean == 2.5);
  CHECK(ms.std == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("report json round trip in percent") {
  ModelEval a;
  a.seed = 1;
  a.explanation = {0.9, 0.4};
  a.prediction = {1.0, 0.0, 0.5};
  ModelEval b;
  b.seed = 2;
  b.explanation = {std::nullopt, 0.2};
  b.prediction = {0.5, 0.25, 0.75};
  const auto rep = aggregate("toy", {a, b});
  CHECK(rep.aggregate.at("auc").mean == doctest::Approx(0.9));
  CHECK(rep.aggregate.at("spa").mean == doctest::Approx(0.3));
  const auto doc = report_to_json(rep);
  CHECK(doc["models"][0]["auc"].get<double>() == doctest::Approx(90.0));
  CHECK(doc["models"][1]["auc"].is_null());
  CHECK(doc["aggregate"]["acc"]["mean"].get<double>() == doctest::Approx(75.0));
  const auto back = report_from_json(doc);
  REQUIRE(back.models.size() == 2);
  CHECK(*back.models[0].explanation.auc == doctest::Approx(0.9).epsilon(1e-12));
  CHECK_FALSE(back.models[1].explanation.auc.has_value());
  CHECK(back.aggregate.at("fid_plus").mean == doctest::Approx(0.625).epsilon(1e-12));
  CHECK_THROWS_AS(report_from_json(nlohmann::json{{"dataset", "x"}}), ParseError);
}
