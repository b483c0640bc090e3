// SPDX-License-Identifier: Apache-2.0
#include "ddsound/channel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

#include "ddsound/fft.hpp"

namespace ddsound {

namespace {
constexpr double kPi = std::numbers::pi;

// Per-path Doppler phasor advanced by recurrence; modulus re-pinned
// periodically so rounding drift stays out of the gain.
struct Rotator {
    cplx value;
    cplx step;
    double modulus;
};
}  // namespace

double PathSet::max_delay_s() const {
    double m = 0.0;
    for (const auto& p : paths) m = std::max(m, p.delay_s);
    return m;
}

IqBuffer apply_paths(const IqBuffer& buf, const PathSet& paths) {
    if (paths.paths.empty()) throw std::invalid_argument("channel: empty path set");
    for (const auto& p : paths.paths) {
        if (p.delay_s < 0.0) throw std::invalid_argument("channel: negative path delay");
        if (!std::isfinite(p.gain.real()) || !std::isfinite(p.gain.imag()) ||
            std::norm(p.gain) == 0.0)
            throw std::invalid_argument("channel: path gain must be finite and nonzero");
    }

    const double fs = buf.sample_rate_hz;
    const std::size_t in_len = buf.size();
    const std::size_t ext = static_cast<std::size_t>(std::ceil(paths.max_delay_s() * fs));
    const std::size_t out_len = in_len + ext;

    IqBuffer out;
    out.sample_rate_hz = fs;
    out.samples.assign(out_len, cplx(0.0, 0.0));

    // Group paths by delay; each distinct fractional delay costs one inverse
    // transform, integer delays are plain shifts.
    std::map<double, std::vector<const Path*>> groups;
    for (const auto& p : paths.paths) groups[p.delay_s].push_back(&p);

    std::vector<cplx> spectrum;  // forward DFT of the zero-padded input, lazily built
    std::vector<cplx> delayed(out_len);

    for (const auto& [delay_s, group] : groups) {
        const double lag = delay_s * fs;  // samples
        const double lag_int = std::round(lag);
        const bool integer_lag = std::abs(lag - lag_int) < 1e-9;

        if (integer_lag) {
            std::fill(delayed.begin(), delayed.end(), cplx(0.0, 0.0));
            auto shift = static_cast<std::size_t>(lag_int);
            std::copy(buf.samples.begin(), buf.samples.end(), delayed.begin() + shift);
        } else {
            if (spectrum.empty()) {
                spectrum.assign(out_len, cplx(0.0, 0.0));
                std::copy(buf.samples.begin(), buf.samples.end(), spectrum.begin());
                fft::transform(spectrum, fft::kForward);
            }
            for (std::size_t f = 0; f < out_len; ++f) {
                double ang = -2.0 * kPi * double(f) * lag / double(out_len);
                delayed[f] = spectrum[f] * std::polar(1.0, ang);
            }
            fft::transform(delayed, fft::kBackward);
            double inv = 1.0 / double(out_len);
            for (auto& v : delayed) v *= inv;
        }

        // Accumulate sum_p g_p e^{j2pi nu_p (t - tau)} over the group in one pass.
        std::vector<Rotator> rot(group.size());
        for (std::size_t p = 0; p < group.size(); ++p) {
            double w = 2.0 * kPi * group[p]->doppler_hz / fs;
            rot[p].value =
                group[p]->gain * std::polar(1.0, -2.0 * kPi * group[p]->doppler_hz * delay_s);
            rot[p].step = std::polar(1.0, w);
            rot[p].modulus = std::abs(rot[p].value);
        }
        for (std::size_t q = 0; q < out_len; ++q) {
            cplx mod(0.0, 0.0);
            for (auto& r : rot) {
                mod += r.value;
                r.value *= r.step;
            }
            out.samples[q] += mod * delayed[q];
            if ((q & 0xFFFFu) == 0xFFFFu)
                for (auto& r : rot) r.value *= r.modulus / std::abs(r.value);
        }
    }
    return out;
}

IqBuffer add_awgn(const IqBuffer& buf, double snr_db, std::uint64_t seed) {
    if (buf.samples.empty()) throw std::invalid_argument("channel: empty buffer");
    if (std::isinf(snr_db) && snr_db > 0) return buf;

    const double noise_var = buf.mean_power() / std::pow(10.0, snr_db / 10.0);
    const double sigma = std::sqrt(noise_var / 2.0);

    IqBuffer out = buf;
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        return (double(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);  // (0,1)
    };
    for (auto& v : out.samples) {
        // Box-Muller; hand-rolled so the stream is pinned by the seed alone.
        double r = sigma * std::sqrt(-2.0 * std::log(uniform()));
        double phi = 2.0 * kPi * uniform();
        v += cplx(r * std::cos(phi), r * std::sin(phi));
    }
    return out;
}

IqBuffer apply_cfo(const IqBuffer& buf, double cfo_hz) {
    IqBuffer out = buf;
    const double cycles_per_sample = cfo_hz / buf.sample_rate_hz;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        double turns = std::fmod(cycles_per_sample * double(i), 1.0);
        out.samples[i] *= std::polar(1.0, 2.0 * kPi * turns);
    }
    return out;
}

PathSet rayleigh_tap_paths(const std::vector<double>& delays_s,
                           const std::vector<double>& powers_db,
                           const std::vector<double>& max_dopplers_hz, std::size_t n_sinusoids,
                           std::uint64_t seed) {
    if (delays_s.size() != powers_db.size() || delays_s.size() != max_dopplers_hz.size())
        throw std::invalid_argument("channel: tap parameter lists must have equal length");
    if (n_sinusoids < 8) throw std::invalid_argument("channel: need at least 8 sinusoids per tap");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);

    PathSet set;
    set.paths.reserve(delays_s.size() * n_sinusoids);
    for (std::size_t t = 0; t < delays_s.size(); ++t) {
        double amp = std::sqrt(std::pow(10.0, powers_db[t] / 10.0) / double(n_sinusoids));
        for (std::size_t q = 0; q < n_sinusoids; ++q) {
            double theta = angle(rng);
            double phase = angle(rng);
            set.paths.push_back(
                {std::polar(amp, phase), delays_s[t], max_dopplers_hz[t] * std::cos(theta)});
        }
    }
    return set;
}

PathSet pure_doppler_paths(const std::vector<double>& delays_s,
                           const std::vector<double>& dopplers_hz,
                           const std::vector<double>& powers_db) {
    if (delays_s.size() != dopplers_hz.size() || delays_s.size() != powers_db.size())
        throw std::invalid_argument("channel: path parameter lists must have equal length");
    PathSet set;
    for (std::size_t i = 0; i < delays_s.size(); ++i)
        set.paths.push_back(
            {cplx(std::pow(10.0, powers_db[i] / 20.0), 0.0), delays_s[i], dopplers_hz[i]});
    return set;
}

}  // namespace ddsound
