// SPDX-License-Identifier: Apache-2.0
#include "ddsound/frame.hpp"

#include <stdexcept>
#include <string>

namespace ddsound {

namespace {
bool is_pow2(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }
}  // namespace

int FrameConfig::signed_doppler_tap(std::size_t k) const {
    std::size_t shifted = (k + N - k_p + N / 2) % N;
    return static_cast<int>(shifted) - static_cast<int>(N / 2);
}

FrameConfig make_frame_config(std::size_t M, std::size_t N, double bandwidth_hz,
                              std::size_t l_tau, double pn_amplitude) {
    if (!is_pow2(M) || M < 16) throw std::invalid_argument("frame: M must be a power of two >= 16");
    if (!is_pow2(N) || N < 16) throw std::invalid_argument("frame: N must be a power of two >= 16");
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("frame: bandwidth must be positive");
    if (l_tau == 0 || l_tau > M / 2 - 1)
        throw std::invalid_argument("frame: l_tau out of range (guard band overflows the grid), got " +
                                    std::to_string(l_tau));

    FrameConfig cfg;
    cfg.M = M;
    cfg.N = N;
    cfg.bandwidth_hz = bandwidth_hz;
    cfg.delta_f_hz = bandwidth_hz / static_cast<double>(M);
    cfg.symbol_duration_s = 1.0 / cfg.delta_f_hz;
    cfg.l_tau = l_tau;
    cfg.k_p = N / 2;
    cfg.l_p = M / 2;
    cfg.pn_amplitude = pn_amplitude;
    return cfg;
}

FrameConfig make_frame_config(std::size_t M, std::size_t N, double bandwidth_hz) {
    return make_frame_config(M, N, bandwidth_hz, M / 4);
}

SoundingCapability capability_metrics(const FrameConfig& cfg) {
    SoundingCapability cap;
    cap.delay_resolution_s = cfg.delay_resolution_s();
    cap.doppler_resolution_hz = cfg.doppler_resolution_hz();
    cap.max_delay_s = static_cast<double>(cfg.l_tau) * cap.delay_resolution_s;
    cap.max_doppler_hz = cap.doppler_resolution_hz * static_cast<double>(cfg.N) / 2.0;
    cap.frame_length_s = cfg.frame_duration_s();
    cap.min_si_s = cap.frame_length_s;
    return cap;
}

}  // namespace ddsound
