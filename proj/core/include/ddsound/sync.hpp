// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "ddsound/grids.hpp"

namespace ddsound {

/// Squared-magnitude sliding correlation R_c[k], k in [0, window).
struct CorrelationSeries {
    std::vector<double> values;
    std::size_t sync_length = 0;
};

/// R_c[k] = | sum_{i<L} rx[k+i] * conj(sync[i]) |^2 for k in [0, window).
/// Transform-accelerated; agrees with the direct double loop to rounding.
/// Throws if window + L exceeds the receive buffer.
CorrelationSeries sliding_correlation(const IqBuffer& rx, const IqBuffer& sync,
                                      std::size_t window);

/// Argmax of the correlation series; ties break toward the smallest index.
std::size_t find_frame_start(const CorrelationSeries& corr);

/// 10*log10(peak / NL) where NL is the mean of R_c outside +-guard samples
/// around the peak. Returns +inf when NL is zero; throws when the guard
/// swallows the whole series.
double sync_gain_db(const CorrelationSeries& corr, std::size_t guard);

}  // namespace ddsound
