#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "helpers.hpp"
#include "sdlab/consistency.hpp"
#include "sdlab/errors.hpp"

using namespace sdlab;
using namespace sdlab::testing;

namespace {

Dataset small_dataset(std::uint64_t seed, std::size_t n = 8) {
  RngStream rng(seed);
  Dataset ds;
  for (std::size_t i = 0; i < n; ++i) ds.graphs.push_back(random_graph(6, 3, 3, rng, true));
  for (std::size_t i = 0; i < n; ++i) (i % 2 ? ds.split.test : ds.split.train).push_back(i);
  return ds;
}

}  // namespace

TEST_CASE("esc is the mean absolute difference") {
  CHECK(esc(EdgeMask({0.1, 0.5, 0.9}), EdgeMask({0.1, 0.5, 0.9})) == 0.0);
  CHECK(esc(EdgeMask({0.0, 1.0}), EdgeMask({0.5, 0.5})) == 0.5);
  CHECK_THROWS_AS(esc(EdgeMask({0.0}), EdgeMask({0.0, 1.0})), AlignmentError);
}

TEST_CASE("re_explain feeds the first mask back as edge weights") {
  RngStream rng(4);
  const auto model = init_model(tiny_arch(), 6);
  for (int t = 0; t < 10; ++t) {
    const Graph g = random_graph(7, 3, 3, rng);
    reset_scoring_pass_count();
    const auto rec = re_explain(model, g);
    CHECK(scoring_pass_count() == 2);
    const auto m1 = compute_edge_scores(model, g, EdgeMask::ones(g.num_edges()));
    const auto m2 = compute_edge_scores(model, g, m1);
    CHECK(rec.m1.values() == m1.values());
    CHECK(rec.m2.values() == m2.values());
    double s = 0.0;
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      CHECK(rec.delta_s[e] == std::abs(m1[e] - m2[e]));
      s += rec.delta_s[e];
    }
    CHECK(rec.esc == doctest::Approx(s / static_cast<double>(g.num_edges())));
  }
}

TEST_CASE("context variation averages neighbour delta_s") {
  RngStream rng(1);
  // Star 0-1, 0-2 plus isolated pair 3-4.
  const Graph g = make_graph(5, {{0, 1}, {0, 2}, {3, 4}}, 2, rng);
  const std::vector<double> ds = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const auto idx = edge_neighbors(g);
  const auto cv = context_variation(g, ds);
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (idx[e].empty()) {
      CHECK_FALSE(cv.delta_c[e].has_value());
      continue;
    }
    double s = 0.0;
    for (std::size_t f : idx[e]) s += ds[f];
    CHECK(*cv.delta_c[e] == doctest::Approx(s / static_cast<double>(idx[e].size())));
  }
  CHECK_THROWS_AS(context_variation(g, std::vector<double>{0.1}), AlignmentError);
}

TEST_CASE("correlation report splits by ground truth and modes agree on one graph") {
  const auto ds = small_dataset(3);
  const auto model = init_model(tiny_arch(), 1);
  const auto pooled = correlation_report(model, ds, SplitPart::train);
  CHECK(pooled.important.count > 0);
  CHECK(pooled.unimportant.count > 0);
  std::size_t edges = 0;
  for (std::size_t i : ds.split.train) {
    for (std::size_t e = 0; e < ds.graphs[i].num_edges(); ++e) edges += edge_neighbors(ds.graphs[i])[e].empty() ? 0 : 1;
  }
  CHECK(pooled.important.count + pooled.unimportant.count == edges);

  const Graph* one = &ds.graphs[0];
  const auto rec = re_explain(model, *one);
  const auto a = correlation_report(std::span(&one, 1), std::span(&rec, 1), CorrelationMode::pooled);
  const auto b = correlation_report(std::span(&one, 1), std::span(&rec, 1), CorrelationMode::per_graph);
  CHECK(a.unimportant.pearson == b.unimportant.pearson);
  CHECK(a.important.kendall == b.important.kendall);
}

TEST_CASE("scatter csv has one row per directed edge") {
  const auto ds = small_dataset(5, 4);
  const auto model = init_model(tiny_arch(), 2);
  std::vector<const Graph*> graphs;
  std::vector<ReExplanationRecord> recs;
  for (std::size_t i : ds.split.test) {
    graphs.push_back(&ds.graphs[i]);
    recs.push_back(re_explain(model, ds.graphs[i]));
  }
  std::ostringstream os;
  write_scatter(os, ds.split.test, graphs, recs);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "graph_id,edge_id,m1,m2,m1_sym,m2_sym,gt_label,delta_s,delta_c");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }
  std::size_t expect = 0;
  for (const auto* g : graphs) expect += g->num_edges();
  CHECK(rows == expect);

  std::vector<std::vector<std::string>> states;
  for (const auto* g : graphs) states.emplace_back(g->num_edges(), "ctx");
  std::ostringstream os2;
  write_scatter(os2, ds.split.test, graphs, recs, states);
  CHECK(os2.str().rfind("graph_id,edge_id,m1,m2,m1_sym,m2_sym,gt_label,delta_s,delta_c,state\n", 0) == 0);
  CHECK_THROWS_AS(write_scatter(os2, ds.split.train, graphs, std::span(recs).first(1)), AlignmentError);
}

TEST_CASE("scatter export reports unwritable paths") {
  const auto ds = small_dataset(6, 2);
  const auto model = init_model(tiny_arch(), 2);
  CHECK_THROWS_AS(scatter_export(model, ds, SplitPart::test, "/nonexistent-dir/x.csv"), IoError);
}
