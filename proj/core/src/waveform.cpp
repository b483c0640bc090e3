// SPDX-License-Identifier: Apache-2.0
#include "ddsound/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ddsound/fft.hpp"
#include "ddsound/pn.hpp"

namespace ddsound {

std::size_t pn_cells_required(const FrameConfig& cfg) {
    return cfg.N * cfg.M - cfg.N * (2 * cfg.l_tau + 1);
}

DdGrid build_sounding_grid(const FrameConfig& cfg, std::span<const double> pn) {
    if (pn.size() < pn_cells_required(cfg))
        throw std::invalid_argument("waveform: PN sequence too short for the non-guard region");

    DdGrid grid(cfg);
    std::size_t guard_lo = cfg.l_p - cfg.l_tau;
    std::size_t guard_hi = cfg.l_p + cfg.l_tau;
    std::size_t next = 0;
    for (std::size_t k = 0; k < cfg.N; ++k)
        for (std::size_t l = 0; l < cfg.M; ++l) {
            if (l >= guard_lo && l <= guard_hi) continue;
            grid.at(k, l) = cplx(cfg.pn_amplitude * pn[next++], 0.0);
        }
    grid.at(cfg.k_p, cfg.l_p) = cplx(1.0, 0.0);
    return grid;
}

DdGrid single_pilot_grid(const FrameConfig& cfg) {
    DdGrid grid(cfg);
    grid.at(cfg.k_p, cfg.l_p) = cplx(1.0, 0.0);
    return grid;
}

DdGrid full_pn_grid(const FrameConfig& cfg, std::span<const double> pn) {
    if (pn.size() < cfg.N * cfg.M)
        throw std::invalid_argument("waveform: PN sequence too short for the full grid");
    DdGrid grid(cfg);
    // Row-major like the sounding grid. Any chip-balance stretch of the
    // generator then lands one chip per column instead of filling a column.
    for (std::size_t i = 0; i < cfg.N * cfg.M; ++i)
        grid.data[i] = cplx(cfg.pn_amplitude * pn[i], 0.0);
    return grid;
}

TfGrid isfft(const DdGrid& grid) {
    const auto& cfg = grid.cfg;
    TfGrid out(cfg);
    out.data = grid.data;
    // N-point inverse along Doppler (columns), M-point forward along delay (rows).
    fft::transform_many(out.data.data(), cfg.N, cfg.M, static_cast<std::ptrdiff_t>(cfg.M), 1,
                        fft::kBackward);
    fft::transform_many(out.data.data(), cfg.M, cfg.N, 1, static_cast<std::ptrdiff_t>(cfg.M),
                        fft::kForward);
    double scale = 1.0 / std::sqrt(double(cfg.N) * double(cfg.M));
    for (auto& v : out.data) v *= scale;
    return out;
}

DdGrid sfft(const TfGrid& grid) {
    const auto& cfg = grid.cfg;
    DdGrid out(cfg);
    out.data = grid.data;
    fft::transform_many(out.data.data(), cfg.N, cfg.M, static_cast<std::ptrdiff_t>(cfg.M), 1,
                        fft::kForward);
    fft::transform_many(out.data.data(), cfg.M, cfg.N, 1, static_cast<std::ptrdiff_t>(cfg.M),
                        fft::kBackward);
    double scale = 1.0 / std::sqrt(double(cfg.N) * double(cfg.M));
    for (auto& v : out.data) v *= scale;
    return out;
}

IqBuffer heisenberg_modulate(const TfGrid& grid) {
    const auto& cfg = grid.cfg;
    IqBuffer buf;
    buf.sample_rate_hz = cfg.bandwidth_hz;
    buf.samples = grid.data;  // row n becomes slot n
    fft::transform_many(buf.samples.data(), cfg.M, cfg.N, 1, static_cast<std::ptrdiff_t>(cfg.M),
                        fft::kBackward);
    return buf;
}

TfGrid wigner_demodulate(const IqBuffer& buf, const FrameConfig& cfg) {
    if (buf.size() < cfg.frame_samples())
        throw std::invalid_argument("waveform: buffer shorter than one frame");
    TfGrid out(cfg);
    std::copy_n(buf.samples.begin(), cfg.frame_samples(), out.data.begin());
    fft::transform_many(out.data.data(), cfg.M, cfg.N, 1, static_cast<std::ptrdiff_t>(cfg.M),
                        fft::kForward);
    double scale = 1.0 / double(cfg.M);
    for (auto& v : out.data) v *= scale;
    return out;
}

IqBuffer synthesize_frame(const FrameConfig& cfg) {
    auto pn = generate_pn(pn_cells_required(cfg));
    return heisenberg_modulate(isfft(build_sounding_grid(cfg, pn)));
}

double papr_db(const IqBuffer& buf) {
    if (buf.samples.empty()) throw std::invalid_argument("papr: empty buffer");
    double peak = 0.0, sum = 0.0;
    for (const auto& v : buf.samples) {
        double p = std::norm(v);
        peak = std::max(peak, p);
        sum += p;
    }
    if (sum == 0.0) throw std::invalid_argument("papr: all-zero buffer");
    double mean = sum / double(buf.samples.size());
    return 10.0 * std::log10(peak / mean);
}

}  // namespace ddsound
