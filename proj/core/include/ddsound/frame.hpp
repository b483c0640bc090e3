// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

namespace ddsound {

/// OTFS grid geometry of the sounding frame.
///
/// The delay-Doppler plane is discretized to N Doppler rows by M delay
/// columns. The grid is critically sampled (B = M * delta_f, T = 1 / delta_f),
/// so one frame spans N * T seconds and M * N baseband samples at rate B.
/// The pilot sits at the grid centre (k_p = N/2, l_p = M/2) inside a guard
/// band of 2 * l_tau + 1 delay columns; every cell outside the guard band
/// carries PN filling of amplitude `pn_amplitude`.
struct FrameConfig {
    std::size_t M = 0;             ///< delay taps (subcarriers), power of two
    std::size_t N = 0;             ///< Doppler taps (time slots), power of two
    double bandwidth_hz = 0.0;     ///< sounding bandwidth B
    double delta_f_hz = 0.0;       ///< subcarrier spacing, B / M
    double symbol_duration_s = 0.0;///< slot duration T = 1 / delta_f
    std::size_t l_tau = 0;         ///< measurable-delay tap span
    std::size_t k_p = 0;           ///< pilot Doppler row, N / 2
    std::size_t l_p = 0;           ///< pilot delay column, M / 2
    double pn_amplitude = 1.0;     ///< A_PN

    std::size_t frame_samples() const { return M * N; }
    double frame_duration_s() const { return static_cast<double>(N) * symbol_duration_s; }
    double delay_resolution_s() const { return 1.0 / bandwidth_hz; }
    double doppler_resolution_hz() const { return 1.0 / frame_duration_s(); }

    /// Signed Doppler tap of DD-grid row k, relative to the pilot row:
    /// ((k - k_p + N/2) mod N) - N/2. Row k_p maps to 0; rows below k_p to
    /// negative taps. With the centre pilot this reduces to k - N/2.
    int signed_doppler_tap(std::size_t k) const;

    /// Doppler frequency in Hz of DD-grid row k under the signed convention.
    double doppler_hz(std::size_t k) const {
        return signed_doppler_tap(k) * doppler_resolution_hz();
    }
};

/// Sounding capability of a frame configuration (delay/Doppler resolution,
/// unambiguous ranges, and the shortest stationarity interval it can observe).
struct SoundingCapability {
    double delay_resolution_s = 0.0;   ///< 1 / B
    double doppler_resolution_hz = 0.0;///< 1 / (N T)
    double max_delay_s = 0.0;          ///< l_tau / B
    double max_doppler_hz = 0.0;       ///< N/2 Doppler taps
    double frame_length_s = 0.0;       ///< N T
    double min_si_s = 0.0;             ///< equals the frame length
};

/// Builds a validated frame configuration. `l_tau` must satisfy
/// 0 < l_tau <= M/2 - 1 so that the guard band fits around the centre pilot.
/// Throws std::invalid_argument on non-power-of-two M or N, M or N < 16,
/// non-positive bandwidth, or an out-of-range l_tau.
FrameConfig make_frame_config(std::size_t M, std::size_t N, double bandwidth_hz,
                              std::size_t l_tau, double pn_amplitude = 1.0);

/// Same, with the default guard span l_tau = M / 4.
FrameConfig make_frame_config(std::size_t M, std::size_t N, double bandwidth_hz);

SoundingCapability capability_metrics(const FrameConfig& cfg);

}  // namespace ddsound
