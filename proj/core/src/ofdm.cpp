// SPDX-License-Identifier: Apache-2.0
#include "ddsound/ofdm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ddsound/fft.hpp"
#include "ddsound/pn.hpp"

namespace ddsound {

OfdmSoundingResult ofdm_reference_sounder(const PathSet& paths, double cfo_hz, double snr_db,
                                          std::size_t n_subcarriers, std::uint64_t seed,
                                          double sample_rate_hz) {
    if (n_subcarriers < 16 || (n_subcarriers & (n_subcarriers - 1)) != 0)
        throw std::invalid_argument("ofdm: subcarrier count must be a power of two >= 16");
    const std::size_t cp = n_subcarriers / 4;
    const std::size_t max_delay_samples =
        static_cast<std::size_t>(std::ceil(paths.max_delay_s() * sample_rate_hz));
    if (max_delay_samples > cp)
        throw std::invalid_argument("ofdm: cyclic prefix shorter than the channel delay spread");

    // Pilot symbol: BPSK chips on every subcarrier.
    auto chips = generate_pn(n_subcarriers);
    std::vector<cplx> pilots(n_subcarriers);
    for (std::size_t m = 0; m < n_subcarriers; ++m) pilots[m] = cplx(chips[m], 0.0);

    std::vector<cplx> symbol = pilots;
    fft::transform(symbol, fft::kBackward);  // time-domain symbol, unnormalized

    IqBuffer tx;
    tx.sample_rate_hz = sample_rate_hz;
    tx.samples.resize(cp + n_subcarriers);
    std::copy(symbol.end() - static_cast<std::ptrdiff_t>(cp), symbol.end(), tx.samples.begin());
    std::copy(symbol.begin(), symbol.end(), tx.samples.begin() + static_cast<std::ptrdiff_t>(cp));

    IqBuffer rx = apply_paths(tx, paths);
    if (cfo_hz != 0.0) rx = apply_cfo(rx, cfo_hz);
    rx = add_awgn(rx, snr_db, seed);

    // Drop the CP, transform back, divide by the known pilots.
    std::vector<cplx> received(rx.samples.begin() + static_cast<std::ptrdiff_t>(cp),
                               rx.samples.begin() + static_cast<std::ptrdiff_t>(cp + n_subcarriers));
    fft::transform(received, fft::kForward);
    std::vector<cplx> ctf(n_subcarriers);
    for (std::size_t m = 0; m < n_subcarriers; ++m)
        ctf[m] = received[m] / (pilots[m] * double(n_subcarriers));

    // Delay profile.
    fft::transform(ctf, fft::kBackward);
    OfdmSoundingResult res;
    res.pdp.kind = PowerProfile::Kind::delay;
    res.pdp.axis.resize(n_subcarriers);
    res.pdp.power.resize(n_subcarriers);
    for (std::size_t d = 0; d < n_subcarriers; ++d) {
        res.pdp.axis[d] = double(d) / sample_rate_hz;
        res.pdp.power[d] = std::norm(ctf[d] / double(n_subcarriers));
    }

    const std::size_t peak =
        std::max_element(res.pdp.power.begin(), res.pdp.power.end()) - res.pdp.power.begin();
    std::vector<double> floor_bins;
    floor_bins.reserve(n_subcarriers);
    for (std::size_t d = 0; d < n_subcarriers; ++d) {
        std::size_t dist = std::min(d > peak ? d - peak : peak - d,
                                    n_subcarriers - (d > peak ? d - peak : peak - d));
        if (dist > 8) floor_bins.push_back(res.pdp.power[d]);
    }
    auto mid = floor_bins.begin() + floor_bins.size() / 2;
    std::nth_element(floor_bins.begin(), mid, floor_bins.end());
    res.dynamic_range_db = *mid <= 0.0 ? std::numeric_limits<double>::infinity()
                                       : 10.0 * std::log10(res.pdp.power[peak] / *mid);
    return res;
}

}  // namespace ddsound
