// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "ddsound/estimator.hpp"

using namespace ddsound;

namespace {

Csf model_csf(const FrameConfig& cfg) {
    Csf csf(cfg);
    const double mn = double(cfg.M) * cfg.N;
    const struct {
        double g, k, l;
    } paths[] = {{1.0, 0.0, 0.0}, {0.56, -4.0, 100.0}, {0.32, 8.2, 199.2}};
    for (const auto& p : paths) {
        cplx hdd = p.g * std::polar(1.0, -2.0 * std::numbers::pi * p.k * p.l / mn);
        for (std::size_t r = 0; r < csf.rows(); ++r) {
            cplx kv = eq_channel_doppler(double(csf.doppler_tap(r)), p.k, cfg.N);
            for (std::size_t d = 0; d < csf.cols(); ++d)
                csf.at(r, d) += hdd * kv * eq_channel_delay(double(d), p.l, cfg.M) / mn;
        }
    }
    csf.noise_floor_estimate = 1e-8;
    return csf;
}

void bm_matched_filter_surface(benchmark::State& state) {
    auto cfg = make_frame_config(2048, 256, 80e6, 512);
    auto csf = model_csf(cfg);
    EstimatorConfig est;
    est.delay_step = 0.1;
    est.doppler_step = 1.0 / double(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(matched_filter_surface(csf, 8, 199, est));
}

void bm_estimate_three_paths(benchmark::State& state) {
    auto cfg = make_frame_config(2048, 256, 80e6, 512);
    auto csf = model_csf(cfg);
    EstimatorConfig est;
    est.delay_step = 0.1;
    est.doppler_step = 0.01;
    est.max_paths = 3;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_paths(csf, est));
}

}  // namespace

BENCHMARK(bm_matched_filter_surface)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_estimate_three_paths)->Unit(benchmark::kMillisecond);
