#include <citygen/developers.hpp>
#include <citygen/engine.hpp>
#include <citygen/island.hpp>
#include <citygen/raster.hpp>
#include <citygen/rng.hpp>
#include <citygen/road_graph.hpp>
#include <citygen/roadnet.hpp>
#include <citygen/snapshot.hpp>

#include <benchmark/benchmark.h>

using namespace citygen;

namespace {

WorldState grown(int side, std::uint64_t ticks) {
  WorldState w(generate_island(side, side, 128), SimParams{}, 128);
  w.run(ticks);
  return w;
}

void BM_Step(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  WorldState base = grown(side, 500);
  for (auto _ : state) {
    state.PauseTiming();
    WorldState w = base;
    state.ResumeTiming();
    for (int i = 0; i < 100; ++i) w.step();
    benchmark::DoNotOptimize(w.tick());
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_Step)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Run2000(benchmark::State& state) {
  const Terrain t = generate_island(128, 128, 128);
  for (auto _ : state) {
    WorldState w(t, SimParams{}, 128);
    w.run(2000);
    benchmark::DoNotOptimize(w.roads().road_count());
  }
}
BENCHMARK(BM_Run2000)->Unit(benchmark::kMillisecond);

void BM_InfluenceStamp(benchmark::State& state) {
  const int cap = static_cast<int>(state.range(0));
  const WorldState w = grown(128, 2000);
  std::vector<Coord> roads;
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) {
      if (w.roads().is_road({x, y})) roads.push_back({x, y});
    }
  }
  for (auto _ : state) {
    InfluenceField f(128, 128, cap);
    f.stamp(roads);
    benchmark::DoNotOptimize(f.raw({64, 64}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(roads.size()));
}
BENCHMARK(BM_InfluenceStamp)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_LandValue(benchmark::State& state) {
  const WorldState w = grown(128, 2000);
  const WorldView v = w.view();
  const SimParams& p = w.base_params();
  std::vector<Coord> sites;
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) {
      if (v.serviced({x, y}) && w.terrain().is_land({x, y})) sites.push_back({x, y});
    }
  }
  for (auto _ : state) {
    double sum = 0;
    for (const Coord c : sites) sum += land_value(v, c, DeveloperKind::Commercial, p);
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sites.size()));
}
BENCHMARK(BM_LandValue)->Unit(benchmark::kMicrosecond);

void BM_Snapshot(benchmark::State& state) {
  const WorldState w = grown(128, 2000);
  for (auto _ : state) benchmark::DoNotOptimize(to_canonical_json(w.snapshot()));
}
BENCHMARK(BM_Snapshot)->Unit(benchmark::kMillisecond);

void BM_RenderAndGraph(benchmark::State& state) {
  const WorldState w = grown(128, 2000);
  const Snapshot s = w.snapshot();
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_raster(w.terrain(), s));
    benchmark::DoNotOptimize(export_road_graph(s.roads, w.terrain().seed()));
  }
}
BENCHMARK(BM_RenderAndGraph)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
