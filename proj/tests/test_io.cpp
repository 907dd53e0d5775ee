#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "sdlab/errors.hpp"
#include "sdlab/model_io.hpp"
#include "sdlab/reports.hpp"

using namespace sdlab;

namespace {

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "sdlab_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("model round trip gives bit-identical predictions") {
  RngStream rng(1);
  auto model = init_model(ArchDescriptor::desk(), 12);
  model.encoder[0].eps = 0.1 + 1e-17;
  model.arch.objective = Objective::size_constrained;
  model.arch.beta = 0.3;
  const auto path = scratch_dir() / "model.json";
  save_model(model, path, make_provenance(std::vector<std::string>{"test"}, 12));
  auto loaded = load_model(path);
  CHECK(loaded == model);
  auto ds = generate_ba2motifs(6, 3);
  for (const auto& g : ds.graphs) {
    auto m = compute_edge_scores(model, g, EdgeMask::ones(g.num_edges()));
    CHECK(compute_edge_scores(loaded, g, EdgeMask::ones(g.num_edges())) == m);
    CHECK(predict(loaded, g, m).logits == predict(model, g, m).logits);
  }
}

TEST_CASE("model loading reports structured errors") {
  auto model = init_model(ArchDescriptor::desk(), 1);
  auto doc = model_to_json(model);

  SUBCASE("version mismatch") {
    doc["version"] = 99;
    CHECK_THROWS_AS(model_from_json(doc), ParseError);
  }
  SUBCASE("corrupted length") {
    auto& data = doc["tensors"]["classifier.0.weight"]["data"];
    data.erase(data.size() - 1);
    CHECK_THROWS_AS(model_from_json(doc), ParseError);
  }
  SUBCASE("missing tensor") {
    doc["tensors"].erase("explainer.0.bias");
    CHECK_THROWS_AS(model_from_json(doc), ShapeError);
  }
  SUBCASE("different descriptor names the tensor") {
    ArchDescriptor other = ArchDescriptor::desk();
    other.classifier_dims = {8, 2};
    try {
      model_from_json(doc, other);
      FAIL("expected a shape error");
    } catch (const ShapeError& e) {
      CHECK(std::string(e.what()).find("classifier.0") != std::string::npos);
    }
  }
  SUBCASE("truncated file") {
    const auto path = scratch_dir() / "trunc_model.json";
    const auto text = doc.dump();
    std::ofstream(path) << text.substr(0, text.size() / 3);
    CHECK_THROWS_AS(load_model(path), ParseError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_model(scratch_dir() / "nope.json"), IoError);
  }
}

TEST_CASE("architecture json round trip") {
  auto a = ArchDescriptor::paper();
  a.tau = 0.7;
  a.r = 0.3;
  CHECK(arch_from_json(arch_to_json(a)) == a);
}

TEST_CASE("explanation documents round trip") {
  std::vector<std::size_t> ids = {3, 7};
  std::vector<EdgeMask> masks = {EdgeMask({0.1, 0.25}), EdgeMask({1.0, 0.0, 0.3333333333333333})};
  auto back = explanations_from_json(explanations_json(ids, masks));
  REQUIRE(back.size() == 2);
  CHECK(back[0].first == 3);
  CHECK(back[1].second == masks[1]);
}

TEST_CASE("provenance records command line and seed") {
  std::vector<std::string> cmd = {"sdlab", "train", "--seed", "4"};
  auto p = make_provenance(cmd, 4);
  CHECK(p["seed"] == 4);
  CHECK(p["command_line"].size() == 4);
  CHECK(p["command_line"][1] == "train");
}
