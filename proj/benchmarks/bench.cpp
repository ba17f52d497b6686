#include <benchmark/benchmark.h>

#include <random>

#include "ff/arc/field.hpp"
#include "ff/search.hpp"
#include "ff/text.hpp"
#include "properties.hpp"

using namespace ff;

static void BM_Execute(benchmark::State& state) {
    auto field = arc::make_field();
    const auto t = arc::ArcTypes::resolve(field->types());
    std::mt19937_64 rng(1);
    const Value x = arc::grid_value(testing::random_grid(rng, static_cast<int>(state.range(0)), 6), t.grid);
    const Code code = compile("rotate_90\nmirror_horizontal\nconst color 1\nconst color 2\nrecolor\ntranspose", field->fsl());
    for (auto _ : state) benchmark::DoNotOptimize(run_code(*field, x, code));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(code.size()));
}
BENCHMARK(BM_Execute)->Arg(5)->Arg(15)->Arg(30);

static void BM_RandomCode(benchmark::State& state) {
    auto field = arc::make_field();
    const auto t = arc::ArcTypes::resolve(field->types());
    std::mt19937_64 rng(2);
    std::vector<Code> codes;
    for (int i = 0; i < 256; ++i) codes.push_back(testing::random_code(rng, *field, 12));
    const Value x = arc::grid_value(testing::random_grid(rng, 8, 4), t.grid);
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_code(*field, x, codes[i++ & 255]));
}
BENCHMARK(BM_RandomCode);

static void BM_Ucb(benchmark::State& state) {
    SearchConfig c;
    double n = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ucb_score(0.3, n, 0.5 * n, 1000.0, c));
        n = n > 500 ? 1.0 : n + 1.0;
    }
}
BENCHMARK(BM_Ucb);

static void BM_Expand(benchmark::State& state) {
    const auto fx = testing::search_fixture(testing::data_dir() / "easy" / "tasks" / "easy_05.json");
    SearchConfig c;
    c.width = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        SearchEngine e(fx.relation, fx.items, fx.examples, c, fx.task.id);
        benchmark::DoNotOptimize(e.expand(0));
    }
}
BENCHMARK(BM_Expand)->Arg(4)->Arg(16)->Arg(64);

static void BM_Search(benchmark::State& state) {
    const auto fx = testing::search_fixture(testing::data_dir() / "easy" / "tasks" / "easy_05.json");
    SearchConfig c;
    c.node_budget = static_cast<std::size_t>(state.range(0));
    c.max_solutions = 1000;
    for (auto _ : state) benchmark::DoNotOptimize(run_search(fx.relation, fx.examples, fx.items, c));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Search)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
