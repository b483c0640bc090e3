// SPDX-License-Identifier: Apache-2.0
#include "ddsound/sync.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ddsound/fft.hpp"

namespace ddsound {

CorrelationSeries sliding_correlation(const IqBuffer& rx, const IqBuffer& sync,
                                      std::size_t window) {
    const std::size_t L = sync.size();
    if (L == 0) throw std::invalid_argument("sync: empty synchronization signal");
    if (window == 0 || rx.size() < L || window > rx.size() - L)
        throw std::invalid_argument("sync: window too large for the receive buffer");

    CorrelationSeries out;
    out.sync_length = L;
    out.values.resize(window);

    if (std::size_t(window) * L < (1u << 20)) {
        // Small cases: the direct definition.
        for (std::size_t k = 0; k < window; ++k) {
            cplx acc(0.0, 0.0);
            for (std::size_t i = 0; i < L; ++i) acc += rx.samples[k + i] * std::conj(sync.samples[i]);
            out.values[k] = std::norm(acc);
        }
        return out;
    }

    // Cross-correlation via one full-size transform pair:
    // c[k] = IDFT( DFT(rx) * conj(DFT(sync_padded)) )[k] / n.
    const std::size_t need = window + L;
    std::size_t n = 1;
    while (n < need) n <<= 1;

    std::vector<cplx> a(n, cplx(0.0, 0.0)), b(n, cplx(0.0, 0.0));
    std::copy_n(rx.samples.begin(), std::min(rx.size(), n), a.begin());
    std::copy_n(sync.samples.begin(), L, b.begin());
    fft::transform(a, fft::kForward);
    fft::transform(b, fft::kForward);
    for (std::size_t i = 0; i < n; ++i) a[i] *= std::conj(b[i]);
    fft::transform(a, fft::kBackward);
    const double inv = 1.0 / double(n);
    for (std::size_t k = 0; k < window; ++k) out.values[k] = std::norm(a[k] * inv);
    return out;
}

std::size_t find_frame_start(const CorrelationSeries& corr) {
    if (corr.values.empty()) throw std::invalid_argument("sync: empty correlation series");
    std::size_t best = 0;
    for (std::size_t k = 1; k < corr.values.size(); ++k)
        if (corr.values[k] > corr.values[best]) best = k;
    return best;
}

double sync_gain_db(const CorrelationSeries& corr, std::size_t guard) {
    const std::size_t peak = find_frame_start(corr);
    const double peak_val = corr.values[peak];

    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < corr.values.size(); ++k) {
        std::size_t dist = k > peak ? k - peak : peak - k;
        if (dist <= guard) continue;
        sum += corr.values[k];
        ++count;
    }
    if (count == 0) throw std::invalid_argument("sync: guard excludes the entire series");
    if (sum == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak_val / (sum / double(count)));
}

}  // namespace ddsound
