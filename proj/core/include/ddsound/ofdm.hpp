// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "ddsound/analysis.hpp"
#include "ddsound/channel.hpp"

namespace ddsound {

struct OfdmSoundingResult {
    PowerProfile pdp;
    double dynamic_range_db = 0.0;
};

/// Frequency-domain reference sounder used for the dynamic-range comparison:
/// one OFDM symbol with unit-amplitude PN-modulated subcarriers and a cyclic
/// prefix of n_subcarriers/4 samples, sent through the path channel, CFO and
/// AWGN at the given time-domain SNR. The CTF is estimated by pilot division
/// and inverse-transformed to a PDP; the dynamic range is the PDP peak over
/// the median off-peak bin (the same floor estimator as the DD receiver).
/// Throws when the CP is shorter than the channel's maximum delay.
OfdmSoundingResult ofdm_reference_sounder(const PathSet& paths, double cfo_hz, double snr_db,
                                          std::size_t n_subcarriers, std::uint64_t seed,
                                          double sample_rate_hz);

}  // namespace ddsound
