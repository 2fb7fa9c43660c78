// Separable running-sum kernels vs the serial brute-force references.

#include <benchmark/benchmark.h>

#include <random>

#include "cte/core_types.hpp"
#include "cte/encode3d.hpp"
#include "cte/reference.hpp"

namespace {

cte::BinaryMask make_mask(int h, int w) {
    std::mt19937_64 rng(12345);
    std::bernoulli_distribution bit(0.3);
    std::vector<std::uint8_t> data(static_cast<std::size_t>(h) * w);
    for (auto& v : data) v = bit(rng) ? 1 : 0;
    return cte::BinaryMask(h, w, std::move(data));
}

cte::VoxelTensor make_voxel(int t, int h, int w) {
    std::mt19937_64 rng(54321);
    std::bernoulli_distribution bit(0.3);
    cte::VoxelTensor out(1, t, h, w);
    for (auto& v : out.data) v = bit(rng) ? 1 : 0;
    return out;
}

void BM_box2d_separable(benchmark::State& state) {
    auto m = make_mask(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(cte::box_sum_2d(m));
}
BENCHMARK(BM_box2d_separable)->Arg(28)->Arg(128)->Arg(512);

void BM_box2d_reference(benchmark::State& state) {
    auto m = make_mask(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(cte::reference::box_sum_2d(m));
}
BENCHMARK(BM_box2d_reference)->Arg(28)->Arg(128)->Arg(512);

void BM_box3d_separable(benchmark::State& state) {
    auto v = make_voxel(32, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(cte::window_counts_3d(v, 7, 17, 17));
}
BENCHMARK(BM_box3d_separable)->Arg(28)->Arg(64);

void BM_box3d_reference(benchmark::State& state) {
    auto v = make_voxel(32, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(cte::reference::box_sum_3d(v, 7, 17, 17));
}
BENCHMARK(BM_box3d_reference)->Arg(28)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
