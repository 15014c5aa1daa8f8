#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "embeval/contingency.hpp"
#include "embeval/kmeans.hpp"
#include "embeval/knn.hpp"
#include "embeval/rng.hpp"

using namespace embeval;

namespace {

MatrixF random_points(std::uint64_t seed, std::size_t n, std::size_t dim) {
    Rng rng(seed);
    MatrixF x(n, dim);
    for (auto& v : x.values()) v = static_cast<float>(rng.normal());
    return x;
}

std::vector<std::uint32_t> random_labels(std::uint64_t seed, std::size_t n, std::size_t classes) {
    Rng rng(seed);
    std::vector<std::uint32_t> y(n);
    for (auto& v : y) v = static_cast<std::uint32_t>(rng.below(classes));
    return y;
}

}  // namespace

static void AdjustedMutualInfo(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto u = random_labels(1, n, 11);
    const auto v = random_labels(2, n, 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(adjusted_mutual_info(std::span<const std::uint32_t>(u), std::span<const std::uint32_t>(v)));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(AdjustedMutualInfo)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void KnnPredict(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto train = random_points(3, n, 128);
    const auto query = random_points(4, n / 4, 128);
    LabelVector y;
    y.labels = random_labels(5, n, 11);
    for (int c = 0; c < 11; ++c) y.class_names.push_back("c" + std::to_string(c));
    KnnParams p;
    for (auto _ : state) {
        auto pred = knn_predict(train, y, query, p);
        benchmark::DoNotOptimize(pred);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(KnnPredict)->RangeMultiplier(2)->Range(512, 4096)->Unit(benchmark::kMillisecond);

static void KMeansFit(benchmark::State& state) {
    const auto x = random_points(6, static_cast<std::size_t>(state.range(0)), 64);
    KMeansParams p;
    p.k = 11;
    for (auto _ : state) {
        auto c = kmeans_fit(x, p);
        benchmark::DoNotOptimize(c);
    }
}
BENCHMARK(KMeansFit)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
