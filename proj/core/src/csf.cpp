// SPDX-License-Identifier: Apache-2.0
#include "ddsound/csf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ddsound/waveform.hpp"

namespace ddsound {

namespace {
constexpr double kPi = std::numbers::pi;
}

Csf extract_csf(const IqBuffer& rx_frame, const FrameConfig& cfg) {
    if (rx_frame.size() < cfg.frame_samples())
        throw std::invalid_argument("csf: buffer shorter than one frame");

    DdGrid dd = sfft(wigner_demodulate(rx_frame, cfg));

    Csf csf(cfg);
    const double mn = double(cfg.M) * double(cfg.N);
    for (std::size_t r = 0; r < cfg.N; ++r) {
        // With the centre pilot (k_p = N/2), DD row r carries signed tap r - N/2.
        const double dk = double(csf.doppler_tap(r));
        for (std::size_t d = 0; d <= cfg.l_tau; ++d) {
            const std::size_t l = cfg.l_p + d;
            csf.at(r, d) = dd.at(r, l) * std::polar(1.0, -2.0 * kPi * dk * double(l) / mn);
        }
    }

    // Noise floor from the left guard band. Paths of delay lambda shift PN
    // chips into its leading lambda columns, so only a suffix of columns next
    // to the pilot is guaranteed signal-free. The pollution is contiguous
    // from the left; scan from the pilot side and stop at the first column
    // whose mean power breaks from the accepted suffix.
    std::vector<double> col_mean(cfg.l_tau, 0.0);
    for (std::size_t k = 0; k < cfg.N; ++k)
        for (std::size_t j = 0; j < cfg.l_tau; ++j)
            col_mean[j] += std::norm(dd.at(k, cfg.l_p - cfg.l_tau + j)) / double(cfg.N);

    std::vector<double> accepted_means;
    std::size_t first_clean = cfg.l_tau - 1;
    for (std::size_t j = cfg.l_tau; j-- > 0;) {
        if (!accepted_means.empty()) {
            std::vector<double> sorted = accepted_means;
            auto mid = sorted.begin() + sorted.size() / 2;
            std::nth_element(sorted.begin(), mid, sorted.end());
            if (col_mean[j] > 4.0 * *mid) break;
        }
        accepted_means.push_back(col_mean[j]);
        first_clean = j;
    }

    std::vector<double> guard_power;
    guard_power.reserve(cfg.N * (cfg.l_tau - first_clean));
    for (std::size_t k = 0; k < cfg.N; ++k)
        for (std::size_t j = first_clean; j < cfg.l_tau; ++j)
            guard_power.push_back(std::norm(dd.at(k, cfg.l_p - cfg.l_tau + j)));
    auto mid = guard_power.begin() + guard_power.size() / 2;
    std::nth_element(guard_power.begin(), mid, guard_power.end());
    csf.noise_floor_estimate = *mid;
    return csf;
}

double dynamic_range_db(const Csf& csf) {
    double peak = 0.0;
    for (const auto& v : csf.data) peak = std::max(peak, std::norm(v));
    if (csf.noise_floor_estimate <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak / csf.noise_floor_estimate);
}

}  // namespace ddsound
