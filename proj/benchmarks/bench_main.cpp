#include <benchmark/benchmark.h>

#include "wardrop/compose.hpp"
#include "wardrop/game.hpp"
#include "wardrop/singleton.hpp"
#include "wardrop/solver.hpp"

namespace {

using namespace wardrop;

CongestionGame fisk_game() {
    std::vector<Resource> r{{"e1", CostFunction::affine(1, 0)},
                            {"e2", CostFunction::affine(1, 0)},
                            {"e3", CostFunction::affine(1, 90)}};
    std::vector<Commodity> c{{"ab", {{{"e1"}}}},
                             {"ac", {{{"e1", "e2"}}, {{"e3"}}}},
                             {"bc", {{{"e2"}}}}};
    return CongestionGame(std::move(r), std::move(c));
}

CongestionGame parallel_game(std::size_t n_resources, std::size_t n_commodities) {
    std::vector<Resource> resources;
    for (std::size_t i = 0; i < n_resources; ++i)
        resources.push_back({"r" + std::to_string(i),
                             CostFunction::affine(1.0 + 0.1 * static_cast<double>(i),
                                                  static_cast<double>(i % 5))});
    std::vector<Commodity> commodities;
    for (std::size_t h = 0; h < n_commodities; ++h) {
        Commodity c{"h" + std::to_string(h), {}};
        for (std::size_t i = h % 2; i < n_resources; i += 1 + h % 3)
            c.strategies.push_back({{resources[i].id}});
        if (c.strategies.empty()) c.strategies.push_back({{resources[0].id}});
        commodities.push_back(std::move(c));
    }
    return CongestionGame(std::move(resources), std::move(commodities));
}

void BM_SolveFisk(benchmark::State& state) {
    const CongestionGame game = fisk_game();
    const DemandVector mu{60, 30, 6};
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_beckmann(game, mu));
    }
}
BENCHMARK(BM_SolveFisk);

void BM_SolveMesParallel(benchmark::State& state) {
    const CongestionGame game =
        parallel_game(static_cast<std::size_t>(state.range(0)), 4);
    DemandVector mu(4, 1.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_mes(game, mu));
    }
}
BENCHMARK(BM_SolveMesParallel)->Arg(5)->Arg(10)->Arg(20);

void BM_WaterFill(benchmark::State& state) {
    std::vector<Resource> resources;
    for (int i = 0; i < state.range(0); ++i)
        resources.push_back({"r" + std::to_string(i),
                             CostFunction::affine(1.0 + 0.01 * i, 0.5 * (i % 7))});
    for (auto _ : state) {
        benchmark::DoNotOptimize(water_fill(resources, 100.0));
    }
}
BENCHMARK(BM_WaterFill)->Arg(8)->Arg(64)->Arg(512);

void BM_SpRecognize(benchmark::State& state) {
    const CongestionGame game = parallel_game(16, 2);
    const auto emb = embed_sp(game);
    for (auto _ : state) {
        benchmark::DoNotOptimize(is_series_parallel(emb.crg, "v0", "v16"));
    }
}
BENCHMARK(BM_SpRecognize);

}  // namespace

BENCHMARK_MAIN();
