// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "ddsound/grids.hpp"

namespace ddsound {

/// Measured channel spreading function over the pilot-relative window:
/// N Doppler rows by (l_tau + 1) delay columns. Row r holds the signed
/// Doppler tap r - N/2; column d holds delay tap d (offset from the pilot
/// column). A path with taps (k, l) therefore peaks at (N/2 + k, l) with
/// complex value h * e^{-j2pi nu tau}.
struct Csf {
    FrameConfig cfg;
    std::vector<cplx> data;             // row-major, N rows of (l_tau + 1) columns
    double noise_floor_estimate = 0.0;  // linear power per cell

    Csf() = default;
    explicit Csf(const FrameConfig& c)
        : cfg(c), data(c.N * (c.l_tau + 1), cplx(0.0, 0.0)) {}

    std::size_t rows() const { return cfg.N; }
    std::size_t cols() const { return cfg.l_tau + 1; }
    cplx& at(std::size_t r, std::size_t d) { return data[r * cols() + d]; }
    const cplx& at(std::size_t r, std::size_t d) const { return data[r * cols() + d]; }

    int doppler_tap(std::size_t r) const { return int(r) - int(cfg.N / 2); }
    double doppler_hz(std::size_t r) const {
        return doppler_tap(r) * cfg.doppler_resolution_hz();
    }
    double delay_s(std::size_t d) const { return double(d) * cfg.delay_resolution_s(); }

    /// Row index of a signed Doppler tap.
    std::size_t row_of(int doppler_tap) const { return std::size_t(doppler_tap + int(cfg.N / 2)); }
};

/// Demodulates one frame (Wigner then SFFT) and slices the measurement
/// window l in [l_p, l_p + l_tau]. The buffer must start on a frame boundary
/// and hold at least M*N samples.
///
/// Each cell is rotated by exp(-j 2pi dk l / (MN)), the deterministic phase
/// the rectangular-pulse receive chain adds relative to the ideal-window DD
/// model; after the rotation an integer-tap path (k, l) reads exactly
/// h * e^{-j2pi nu tau} at its cell. noise_floor_estimate is the median cell
/// power over the signal-free suffix of the guard columns [l_p - l_tau,
/// l_p - 1] (channel delays shift PN chips into the leading columns, so the
/// polluted prefix is detected and excluded).
Csf extract_csf(const IqBuffer& rx_frame, const FrameConfig& cfg);

/// 10*log10(max cell power / noise floor). +inf when the floor is zero.
double dynamic_range_db(const Csf& csf);

}  // namespace ddsound
