// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "ddsound/grids.hpp"

namespace ddsound {

/// One discrete propagation path.
struct Path {
    cplx gain;               ///< complex linear gain
    double delay_s = 0.0;    ///< >= 0
    double doppler_hz = 0.0; ///< signed
};

struct PathSet {
    std::vector<Path> paths;

    std::size_t count() const { return paths.size(); }
    double max_delay_s() const;
};

/// Applies the sparse delay-Doppler channel in the time domain:
///   y(t) = sum_i h_i * x(t - tau_i) * e^{j2pi nu_i (t - tau_i)}.
///
/// The output grows by ceil(max_delay * fs) samples. Integer-sample delays are
/// exact shifts; fractional delays use frequency-domain linear phase over the
/// DFT bins [0, L) of the extended buffer, i.e. periodic band-limited
/// interpolation aligned with the modulator's subcarrier mapping. The Doppler
/// rotation is referenced to t - tau_i. Throws on negative delays or
/// non-finite gains.
IqBuffer apply_paths(const IqBuffer& buf, const PathSet& paths);

/// Adds circularly-symmetric complex Gaussian noise sized against the mean
/// power of `buf`: per-sample variance = mean_power / 10^(snr_db/10).
/// An infinite snr_db returns the input unchanged. Deterministic per seed.
IqBuffer add_awgn(const IqBuffer& buf, double snr_db, std::uint64_t seed);

/// Multiplies sample i by e^{j2pi cfo i / fs}.
IqBuffer apply_cfo(const IqBuffer& buf, double cfo_hz);

/// Sum-of-sinusoids Rayleigh taps with Jakes Doppler spectra. Each tap
/// expands to `n_sinusoids` paths at the tap delay with Dopplers
/// f_max * cos(theta_q), theta_q and the per-path phases drawn i.i.d.
/// uniform; per-path power = tap power / n_sinusoids. Deterministic per seed.
PathSet rayleigh_tap_paths(const std::vector<double>& delays_s,
                           const std::vector<double>& powers_db,
                           const std::vector<double>& max_dopplers_hz, std::size_t n_sinusoids,
                           std::uint64_t seed);

/// Deterministic pure-Doppler paths, one per entry, gain 10^(p_db/20) with
/// zero phase.
PathSet pure_doppler_paths(const std::vector<double>& delays_s,
                           const std::vector<double>& dopplers_hz,
                           const std::vector<double>& powers_db);

}  // namespace ddsound
