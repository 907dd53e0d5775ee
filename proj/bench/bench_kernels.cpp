#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "sdlab/calibration.hpp"
#include "sdlab/consistency.hpp"
#include "sdlab/graph.hpp"
#include "sdlab/model.hpp"
#include "sdlab/parallel.hpp"
#include "sdlab/theory.hpp"
#include "sdlab/train.hpp"

using namespace sdlab;

namespace {

// Range argument 0 selects the serial path, 1 the OpenMP path.
Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

struct Fixture {
  Dataset dataset = generate_ba2motifs(200, 11);
  SiGnnModel model = init_model(ArchDescriptor::desk(), 4);
  std::vector<std::size_t> all;

  Fixture() {
    all.resize(dataset.graphs.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_ReExplainAll(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(re_explain_all(f.model, f.dataset, f.all, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.all.size()));
}

void BM_BatchGradient(benchmark::State& state) {
  const auto& f = fixture();
  const RngStream stream(7);
  for (auto _ : state)
    benchmark::DoNotOptimize(batch_gradient(f.model, f.dataset, f.all, stream, 0.0, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.all.size()));
}

void BM_CalibrateDataset(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(calibrate_dataset(f.model, f.dataset, 1.0, false, {}, exec_of(state)));
}

void BM_StochasticShift(benchmark::State& state) {
  const auto& f = fixture();
  const auto& g = f.dataset.graphs[0];
  const auto m1 = compute_edge_scores(f.model, g, EdgeMask::ones(g.num_edges()));
  const auto calibrated = EdgeMask::zeros(g.num_edges());
  const RngStream stream(9);
  constexpr std::size_t kSamples = 2000;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        stochastic_prediction_shift(f.model, g, m1, calibrated, 0, kSamples, stream, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kSamples));
}

void BM_MonteCarloBudget(benchmark::State& state) {
  SignalConfig config;
  config.n_pos = 4;
  config.n_ctx = 40;
  const RngStream stream(13);
  constexpr std::size_t kTrials = 20000;
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_budget(config, 24.0, kTrials, stream, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kTrials));
}

}  // namespace

BENCHMARK(BM_ReExplainAll)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchGradient)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CalibrateDataset)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StochasticShift)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloBudget)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
