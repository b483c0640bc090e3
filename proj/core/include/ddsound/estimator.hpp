// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ddsound/channel.hpp"
#include "ddsound/csf.hpp"

namespace ddsound {

/// One extracted multipath component. Tap indices split into the integer
/// cell and the fractional refinement, with delay = (l_int + l_frac) * dtau,
/// doppler = (k_int + k_frac) * dnu and phase = -2pi * doppler * delay.
struct PathEstimate {
    double gain = 0.0;       ///< linear magnitude
    double phase_rad = 0.0;  ///< -2pi * doppler * delay
    double delay_s = 0.0;
    double doppler_hz = 0.0;
    int k_int = 0;           ///< signed Doppler tap of the peak cell
    int l_int = 0;           ///< delay tap of the peak cell
    double k_frac = 0.0;     ///< in [-0.5, 0.5]
    double l_frac = 0.0;     ///< in [-0.5, 0.5]

    double power_db() const;
};

struct EstimatorConfig {
    double delay_step = 0.1;    ///< fractional-delay search step, in taps
    double doppler_step = 0.01; ///< fractional-Doppler search step, in taps
    /// Power threshold ending the extraction loop. When unset, 6 dB above the
    /// CSF noise-floor estimate (floored at 1e-12 of the strongest cell so a
    /// noiseless input still terminates).
    std::optional<double> power_threshold_linear;
    std::size_t max_paths = 60;
};

/// Doppler-domain equivalent channel function of a path at real tap k_i:
/// h_eq,v[dk] = sum_n e^{-j2pi (dk - k_i) n / N}
///            = e^{-j pi u (N-1)/N} sin(pi u) / sin(pi u / N),  u = dk - k_i,
/// with the removable singularity at u = 0 (mod N) evaluating to N.
cplx eq_channel_doppler(double delta_k, double k_i, std::size_t N);
std::vector<cplx> eq_channel_doppler(const std::vector<int>& delta_k, double k_i, std::size_t N);

/// Delay-domain twin with the conjugate-sign exponent and M in place of N.
cplx eq_channel_delay(double delta_l, double l_i, std::size_t M);
std::vector<cplx> eq_channel_delay(const std::vector<int>& delta_l, double l_i, std::size_t M);

/// Correlation of the measured CSF against the separable equivalent-channel
/// kernel over the fractional grid [-0.5, 0.5]^2 around the cell (k_int,
/// l_int). `values` holds the least-squares amplitude (the kernel is
/// normalized by its energy over the available window, so a matched path of
/// DD gain h reads h at its offset); `correlation` holds |<kernel, csf>|,
/// the unnormalized statistic whose argmax locates the path.
struct MatchedFilterSurface {
    std::vector<double> k_frac;  // Doppler offsets, size Kf
    std::vector<double> l_frac;  // delay offsets, size Lf
    std::vector<cplx> values;    // row-major Kf x Lf, LS amplitude
    std::vector<double> correlation;  // row-major Kf x Lf

    const cplx& value_at(std::size_t ik, std::size_t il) const {
        return values[ik * l_frac.size() + il];
    }
};

MatchedFilterSurface matched_filter_surface(const Csf& csf, int k_int, int l_int,
                                            const EstimatorConfig& cfg);

/// Joint fractional delay/Doppler extraction with serial interference
/// cancellation: repeatedly take the strongest residual cell, refine it over
/// the fractional grid, and subtract the reconstructed kernel, until the
/// detected power falls to the threshold or max_paths is reached. Estimates
/// return in extraction (descending-power) order.
std::vector<PathEstimate> estimate_paths(const Csf& csf, const EstimatorConfig& cfg);

/// Matched-pair NMSE of tap indices and amplitudes. Estimates pair to truth
/// paths by nearest (Doppler tap, delay tap) within a 1-tap gate; leftovers
/// on either side are counted, never silently dropped.
struct NmseReport {
    double index_nmse = 0.0;
    double amplitude_nmse = 0.0;
    std::size_t matched = 0;
    std::size_t unmatched_truth = 0;
    std::size_t unmatched_estimates = 0;
};

NmseReport nmse(const std::vector<PathEstimate>& estimates, const PathSet& truth,
                const FrameConfig& cfg);

}  // namespace ddsound
