#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "helpers.hpp"
#include "sdlab/errors.hpp"
#include "sdlab/graph.hpp"

using namespace sdlab;
using sdlab::testing::make_graph;
using sdlab::testing::random_graph;

namespace {

std::size_t gt_count(const Graph& g) {
  const auto& gt = *g.gt_edge_labels();
  return static_cast<std::size_t>(std::count(gt.begin(), gt.end(), 1));
}

bool gt_edges_connected(const Graph& g) {
  const auto& gt = *g.gt_edge_labels();
  std::set<std::uint32_t> nodes;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (gt[e]) {
      nodes.insert(g.edge(e).src);
      nodes.insert(g.edge(e).dst);
    }
  }
  if (nodes.empty()) return false;
  std::set<std::uint32_t> seen = {*nodes.begin()};
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      if (gt[e] && seen.count(g.edge(e).src) && !seen.count(g.edge(e).dst)) {
        seen.insert(g.edge(e).dst);
        grew = true;
      }
    }
  }
  return seen == nodes;
}

}  // namespace

TEST_CASE("graph construction validates structure") {
  DenseMatrix x(3, 2, 1.0);
  CHECK_NOTHROW(Graph(3, x, {{0, 1}, {1, 0}}, std::nullopt, 0));
  CHECK_THROWS_AS(Graph(3, x, {{0, 3}, {3, 0}}, std::nullopt, 0), ValidationError);
  CHECK_THROWS_AS(Graph(3, x, {{0, 1}}, std::nullopt, 0), ValidationError);
  CHECK_THROWS_AS(Graph(3, x, {{0, 1}, {1, 0}, {0, 1}}, std::nullopt, 0), ValidationError);
  CHECK_THROWS_AS(Graph(3, x, {{1, 1}}, std::nullopt, 0), ValidationError);
  CHECK_THROWS_AS(Graph(2, x, {}, std::nullopt, 0), ValidationError);
  CHECK_THROWS_AS(Graph(3, x, {{0, 1}, {1, 0}}, std::vector<std::uint8_t>{1}, 0), ValidationError);
  CHECK_THROWS_AS(Graph(3, x, {{0, 1}, {1, 0}}, std::vector<std::uint8_t>{1, 0}, 0), ValidationError);
  CHECK_THROWS_AS(Graph(3, x, {{0, 1}, {1, 0}}, std::nullopt, -1), ValidationError);
}

TEST_CASE("reverse index is an involution") {
  RngStream rng(3);
  for (int t = 0; t < 20; ++t) {
    Graph g = random_graph(3 + rng.below(10), rng.below(6), 2, rng);
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      const auto r = g.reverse(e);
      CHECK(r != e);
      CHECK(g.reverse(r) == e);
      CHECK(g.edge(r).src == g.edge(e).dst);
      CHECK(g.edge(r).dst == g.edge(e).src);
    }
  }
}

TEST_CASE("edge mask rejects values outside the unit interval") {
  CHECK_NOTHROW(EdgeMask({0.0, 0.5, 1.0}));
  CHECK_THROWS_AS(EdgeMask({1.5}), ValidationError);
  CHECK_THROWS_AS(EdgeMask({-0.1}), ValidationError);
  CHECK_THROWS_AS(EdgeMask({std::nan("")}), ValidationError);
}

TEST_CASE("edge neighbourhoods on small graphs") {
  RngStream rng(1);
  SUBCASE("triangle") {
    Graph g = make_graph(3, {{0, 1}, {1, 2}, {0, 2}}, 1, rng);
    auto nbr = edge_neighbors(g);
    // edge 0 is (0,1); its neighbours are the four directed edges of the other two pairs
    CHECK(nbr[0] == std::vector<std::size_t>{2, 3, 4, 5});
  }
  SUBCASE("isolated pair") {
    Graph g = make_graph(2, {{0, 1}}, 1, rng);
    auto nbr = edge_neighbors(g);
    CHECK(nbr[0].empty());
    CHECK(nbr[1].empty());
  }
}

TEST_CASE("edge neighbourhoods match a brute-force endpoint scan") {
  RngStream rng(11);
  for (int t = 0; t < 30; ++t) {
    Graph g = random_graph(4 + rng.below(6), rng.below(8), 1, rng);
    REQUIRE(g.num_edges() <= 30);
    auto nbr = edge_neighbors(g);
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      std::vector<std::size_t> expect;
      const auto a = g.edge(e);
      for (std::size_t f = 0; f < g.num_edges(); ++f) {
        if (f == e || f == g.reverse(e)) continue;
        const auto b = g.edge(f);
        if (b.src == a.src || b.src == a.dst || b.dst == a.src || b.dst == a.dst) expect.push_back(f);
      }
      CHECK(nbr[e] == expect);
      for (std::size_t f : nbr[e]) {
        CHECK(std::binary_search(nbr[f].begin(), nbr[f].end(), e));
      }
    }
  }
}

TEST_CASE("symmetrize_mask averages each directed pair") {
  RngStream rng(2);
  Graph g = make_graph(3, {{0, 1}, {1, 2}}, 1, rng);
  auto s = symmetrize_mask(g, EdgeMask({0.8, 0.4, 1.0, 0.0}));
  CHECK(s[0] == doctest::Approx(0.6));
  CHECK(s[1] == doctest::Approx(0.6));
  CHECK(s[2] == 0.5);
  CHECK(s[3] == 0.5);
  CHECK(symmetrize_mask(g, s) == s);
  CHECK_THROWS_AS(symmetrize_mask(g, EdgeMask({0.1})), AlignmentError);
}

TEST_CASE("generator produces motif graphs with exact ground truth") {
  auto ds = generate_ba2motifs(10, 7);
  REQUIRE(ds.graphs.size() == 10);
  int houses = 0;
  for (const auto& g : ds.graphs) {
    REQUIRE(g.has_ground_truth());
    CHECK(g.num_nodes() == 25);
    CHECK(g.feature_dim() == 4);
    if (g.label() == 1) {
      ++houses;
      CHECK(gt_count(g) == 12);
      CHECK(g.num_edges() == 2 * (19 + 6 + 1));
    } else {
      CHECK(gt_count(g) == 10);
      CHECK(g.num_edges() == 2 * (19 + 5 + 1));
    }
    CHECK(gt_edges_connected(g));
    for (double v : g.features().data()) CHECK(v == 1.0);
  }
  CHECK(houses == 5);
  CHECK_NOTHROW(ds.validate());
}

TEST_CASE("generator is deterministic and validates its parameters") {
  CHECK(generate_ba2motifs(12, 5) == generate_ba2motifs(12, 5));
  CHECK_FALSE(generate_ba2motifs(12, 5) == generate_ba2motifs(12, 6));
  CHECK_THROWS_AS(generate_ba2motifs(1, 0), ConfigError);
  Ba2MotifsParams p;
  p.house_fraction = 1.5;
  CHECK_THROWS_AS(generate_ba2motifs(4, 0, p), ConfigError);
  p = {};
  p.feature_dim = 0;
  CHECK_THROWS_AS(generate_ba2motifs(4, 0, p), ConfigError);
}

TEST_CASE("dataset split partitions all graphs") {
  auto ds = generate_ba2motifs(50, 3);
  CHECK(ds.split.train.size() == 40);
  CHECK(ds.split.val.size() == 5);
  CHECK(ds.split.test.size() == 5);
  ds.split.test.push_back(ds.split.train.front());
  CHECK_THROWS_AS(ds.validate(), ValidationError);
}

TEST_CASE("dataset json round trip is exact") {
  auto ds = generate_ba2motifs(8, 9);
  // non-trivial doubles survive the text round trip bit for bit
  RngStream rng(4);
  std::vector<Graph> graphs;
  for (const auto& g : ds.graphs) {
    DenseMatrix x = g.features();
    for (auto& v : x.data()) v = rng.normal() / 3.0;
    graphs.emplace_back(g.num_nodes(), x, std::vector<Edge>(g.edges().begin(), g.edges().end()),
                        g.gt_edge_labels(), g.label());
  }
  ds.graphs = std::move(graphs);
  const auto dir = std::filesystem::temp_directory_path() / "sdlab_graph_test";
  std::filesystem::create_directories(dir);
  save_dataset(ds, dir / "ds.json", {{"seed", 9}});
  CHECK(load_dataset(dir / "ds.json") == ds);
  CHECK(dataset_from_json(dataset_to_json(ds)) == ds);
}

TEST_CASE("malformed dataset files raise structured errors") {
  const auto dir = std::filesystem::temp_directory_path() / "sdlab_graph_test";
  std::filesystem::create_directories(dir);
  auto ds = generate_ba2motifs(4, 1);
  auto doc = dataset_to_json(ds);
  const std::string text = doc.dump();
  {
    std::ofstream(dir / "trunc.json") << text.substr(0, text.size() / 2);
  }
  CHECK_THROWS_AS(load_dataset(dir / "trunc.json"), ParseError);
  CHECK_THROWS_AS(load_dataset(dir / "missing.json"), IoError);

  auto bad = doc;
  bad["graphs"][2]["edges"][0] = {0, 99};
  CHECK_THROWS_AS(dataset_from_json(bad), ValidationError);

  bad = doc;
  bad["graphs"][1].erase("label");
  try {
    dataset_from_json(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("graph record 1") != std::string::npos);
  }

  bad = doc;
  bad["version"] = 2;
  CHECK_THROWS_AS(dataset_from_json(bad), ParseError);
}
