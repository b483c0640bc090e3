// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "ddsound/csf.hpp"
#include "ddsound/estimator.hpp"

namespace ddsound {

/// Marginal power profile over delay (PDP) or Doppler (DPSD).
struct PowerProfile {
    enum class Kind { delay, doppler };
    Kind kind = Kind::delay;
    std::vector<double> axis;   // strictly increasing; seconds or Hz
    std::vector<double> power;  // linear, one per axis entry

    double total_power() const;
};

/// PDP from a raw CSF: power[l] = sum_k |h[k,l]|^2 per delay column.
PowerProfile pdp(const Csf& csf);

/// PDP from estimated paths: impulses at the estimated delays, accumulated
/// into bins of width `bin_width_s` (typically the refined delay step).
PowerProfile pdp(const std::vector<PathEstimate>& estimates, double bin_width_s);

/// DPSD, the Doppler-axis twins of the above.
PowerProfile dpsd(const Csf& csf);
PowerProfile dpsd(const std::vector<PathEstimate>& estimates, double bin_width_hz);

/// Number of paths within 20 dB of the strongest one (strict inequality).
std::size_t count_mpcs(const std::vector<PathEstimate>& estimates);

/// 10*log10(P_max / sum of the other path powers). Throws on fewer than two
/// paths; +inf when the other paths carry no power.
double k_factor_db(const std::vector<PathEstimate>& estimates);

/// sqrt of the second central moment of a delay profile. Throws on zero
/// total power or a Doppler profile.
double rms_delay_spread_s(const PowerProfile& profile);

/// Doppler twin of rms_delay_spread_s.
double rms_doppler_spread_hz(const PowerProfile& profile);

}  // namespace ddsound
