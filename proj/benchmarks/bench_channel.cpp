// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>

#include "ddsound/channel.hpp"
#include "ddsound/sync.hpp"

using namespace ddsound;

namespace {

IqBuffer random_buffer(std::size_t n) {
    IqBuffer buf;
    buf.sample_rate_hz = 100e6;
    buf.samples.resize(n);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : buf.samples) v = cplx(u(rng), u(rng));
    return buf;
}

void bm_apply_paths_integer(benchmark::State& state) {
    auto buf = random_buffer(state.range(0));
    PathSet p = pure_doppler_paths({0.0, 1e-6, 2e-6}, {0.0, -500.0, 1200.0}, {0.0, -5.0, -10.0});
    for (auto _ : state) benchmark::DoNotOptimize(apply_paths(buf, p));
    state.SetItemsProcessed(state.iterations() * buf.size());
}

void bm_apply_paths_fractional(benchmark::State& state) {
    auto buf = random_buffer(state.range(0));
    PathSet p = pure_doppler_paths({0.0, 1.0125e-6, 2.49e-6}, {0.0, -500.0, 1200.0},
                                   {0.0, -5.0, -10.0});
    for (auto _ : state) benchmark::DoNotOptimize(apply_paths(buf, p));
    state.SetItemsProcessed(state.iterations() * buf.size());
}

void bm_jakes_taps(benchmark::State& state) {
    auto buf = random_buffer(state.range(0));
    PathSet p = rayleigh_tap_paths({0.0, 2e-6, 4e-6}, {0.0, -5.0, -10.0},
                                   {953.67, 476.84, 238.42}, 64, 1);
    for (auto _ : state) benchmark::DoNotOptimize(apply_paths(buf, p));
    state.SetItemsProcessed(state.iterations() * buf.size());
}

void bm_sliding_correlation(benchmark::State& state) {
    auto rx = random_buffer(state.range(0));
    IqBuffer sync{std::vector<cplx>(rx.samples.begin(), rx.samples.begin() + rx.size() / 8),
                  rx.sample_rate_hz};
    const std::size_t window = rx.size() / 2;
    for (auto _ : state) benchmark::DoNotOptimize(sliding_correlation(rx, sync, window));
    state.SetItemsProcessed(state.iterations() * window);
}

}  // namespace

BENCHMARK(bm_apply_paths_integer)->Arg(1 << 18)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_apply_paths_fractional)->Arg(1 << 18)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_jakes_taps)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_sliding_correlation)->Arg(1 << 18)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
