// SPDX-License-Identifier: Apache-2.0
#include "ddsound/analysis.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace ddsound {

double PowerProfile::total_power() const {
    double s = 0.0;
    for (double p : power) s += p;
    return s;
}

namespace {

PowerProfile from_bins(const std::map<long long, double>& bins, double width,
                       PowerProfile::Kind kind) {
    PowerProfile prof;
    prof.kind = kind;
    for (const auto& [idx, p] : bins) {
        prof.axis.push_back(double(idx) * width);
        prof.power.push_back(p);
    }
    return prof;
}

PowerProfile impulses(const std::vector<PathEstimate>& estimates, double width,
                      PowerProfile::Kind kind) {
    if (estimates.empty()) throw std::invalid_argument("analysis: no estimates");
    if (!(width > 0.0)) throw std::invalid_argument("analysis: bin width must be positive");
    std::map<long long, double> bins;
    for (const auto& e : estimates) {
        double x = kind == PowerProfile::Kind::delay ? e.delay_s : e.doppler_hz;
        bins[static_cast<long long>(std::llround(x / width))] += e.gain * e.gain;
    }
    return from_bins(bins, width, kind);
}

}  // namespace

PowerProfile pdp(const Csf& csf) {
    if (csf.data.empty()) throw std::invalid_argument("analysis: empty CSF");
    PowerProfile prof;
    prof.kind = PowerProfile::Kind::delay;
    prof.axis.resize(csf.cols());
    prof.power.assign(csf.cols(), 0.0);
    for (std::size_t d = 0; d < csf.cols(); ++d) prof.axis[d] = csf.delay_s(d);
    for (std::size_t r = 0; r < csf.rows(); ++r)
        for (std::size_t d = 0; d < csf.cols(); ++d) prof.power[d] += std::norm(csf.at(r, d));
    return prof;
}

PowerProfile pdp(const std::vector<PathEstimate>& estimates, double bin_width_s) {
    return impulses(estimates, bin_width_s, PowerProfile::Kind::delay);
}

PowerProfile dpsd(const Csf& csf) {
    if (csf.data.empty()) throw std::invalid_argument("analysis: empty CSF");
    PowerProfile prof;
    prof.kind = PowerProfile::Kind::doppler;
    prof.axis.resize(csf.rows());
    prof.power.assign(csf.rows(), 0.0);
    for (std::size_t r = 0; r < csf.rows(); ++r) {
        prof.axis[r] = csf.doppler_hz(r);
        for (std::size_t d = 0; d < csf.cols(); ++d) prof.power[r] += std::norm(csf.at(r, d));
    }
    return prof;
}

PowerProfile dpsd(const std::vector<PathEstimate>& estimates, double bin_width_hz) {
    return impulses(estimates, bin_width_hz, PowerProfile::Kind::doppler);
}

std::size_t count_mpcs(const std::vector<PathEstimate>& estimates) {
    if (estimates.empty()) throw std::invalid_argument("analysis: no estimates");
    double peak = 0.0;
    for (const auto& e : estimates) peak = std::max(peak, e.gain * e.gain);
    const double cutoff = peak * 1e-2;  // 20 dB below the strongest path
    std::size_t n = 0;
    for (const auto& e : estimates)
        if (e.gain * e.gain > cutoff) ++n;
    return n;
}

double k_factor_db(const std::vector<PathEstimate>& estimates) {
    if (estimates.size() < 2)
        throw std::invalid_argument("analysis: K-factor needs at least two paths");
    double peak = 0.0, total = 0.0;
    for (const auto& e : estimates) {
        double p = e.gain * e.gain;
        peak = std::max(peak, p);
        total += p;
    }
    double others = total - peak;
    if (others <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak / others);
}

namespace {

double rms_spread(const PowerProfile& profile, PowerProfile::Kind want) {
    if (profile.kind != want) throw std::invalid_argument("analysis: profile kind mismatch");
    double total = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < profile.axis.size(); ++i) {
        total += profile.power[i];
        m1 += profile.power[i] * profile.axis[i];
        m2 += profile.power[i] * profile.axis[i] * profile.axis[i];
    }
    if (total <= 0.0) throw std::invalid_argument("analysis: zero total power");
    double mean = m1 / total;
    double var = m2 / total - mean * mean;
    return std::sqrt(std::max(var, 0.0));
}

}  // namespace

double rms_delay_spread_s(const PowerProfile& profile) {
    return rms_spread(profile, PowerProfile::Kind::delay);
}

double rms_doppler_spread_hz(const PowerProfile& profile) {
    return rms_spread(profile, PowerProfile::Kind::doppler);
}

}  // namespace ddsound
