#include <benchmark/benchmark.h>

#include "embeval/rng.hpp"
#include "embeval/umap.hpp"

using namespace embeval;

namespace {

MatrixF random_points(std::size_t n, std::size_t dim) {
    Rng rng(11);
    MatrixF x(n, dim);
    for (auto& v : x.values()) v = static_cast<float>(rng.normal());
    return x;
}

}  // namespace

static void ExactKnnGraph(benchmark::State& state) {
    const auto x = random_points(static_cast<std::size_t>(state.range(0)), 256);
    for (auto _ : state) {
        auto g = exact_knn_graph(x, 15);
        benchmark::DoNotOptimize(g);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(ExactKnnGraph)->RangeMultiplier(2)->Range(500, 4000)->Unit(benchmark::kMillisecond)->Complexity();

static void FuzzySimplicialSet(benchmark::State& state) {
    const auto knn = exact_knn_graph(random_points(static_cast<std::size_t>(state.range(0)), 32), 15);
    for (auto _ : state) {
        auto g = fuzzy_simplicial_set(knn);
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(FuzzySimplicialSet)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

static void FitAB(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(fit_ab(0.1, 1.0));
}
BENCHMARK(FitAB);

static void Umap(benchmark::State& state) {
    const auto x = random_points(1000, 64);
    LayoutParams p;
    p.n_components = static_cast<std::size_t>(state.range(0));
    p.n_epochs = 200;
    for (auto _ : state) {
        auto r = umap(x, p);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(Umap)->Arg(2)->Arg(300)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
