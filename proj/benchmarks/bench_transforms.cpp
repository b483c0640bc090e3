// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>

#include "ddsound/pn.hpp"
#include "ddsound/waveform.hpp"

using namespace ddsound;

namespace {

FrameConfig cfg_for(std::size_t M, std::size_t N) {
    return make_frame_config(M, N, double(M) * 48828.125, M / 4);
}

DdGrid random_grid(const FrameConfig& cfg) {
    DdGrid g(cfg);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : g.data) v = cplx(u(rng), u(rng));
    return g;
}

void bm_isfft(benchmark::State& state) {
    auto cfg = cfg_for(state.range(0), state.range(1));
    auto g = random_grid(cfg);
    for (auto _ : state) benchmark::DoNotOptimize(isfft(g));
    state.SetItemsProcessed(state.iterations() * cfg.frame_samples());
}

void bm_tx_chain(benchmark::State& state) {
    auto cfg = cfg_for(state.range(0), state.range(1));
    auto pn = generate_pn(pn_cells_required(cfg));
    for (auto _ : state)
        benchmark::DoNotOptimize(heisenberg_modulate(isfft(build_sounding_grid(cfg, pn))));
    state.SetItemsProcessed(state.iterations() * cfg.frame_samples());
}

void bm_rx_chain(benchmark::State& state) {
    auto cfg = cfg_for(state.range(0), state.range(1));
    IqBuffer frame = synthesize_frame(cfg);
    for (auto _ : state) benchmark::DoNotOptimize(sfft(wigner_demodulate(frame, cfg)));
    state.SetItemsProcessed(state.iterations() * cfg.frame_samples());
}

}  // namespace

BENCHMARK(bm_isfft)->Args({512, 64})->Args({2048, 256})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_tx_chain)->Args({512, 64})->Args({2048, 256})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_rx_chain)->Args({512, 64})->Args({2048, 256})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
