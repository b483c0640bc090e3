// SPDX-License-Identifier: Apache-2.0
#include "ddsound/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ddsound {

namespace {

constexpr double kPi = std::numbers::pi;

cplx dirichlet(double u, std::size_t n, double exponent_sign) {
    // e^{sign * j pi u (n-1)/n} * sin(pi u) / sin(pi u / n); value n at u = 0 (mod n).
    const double nn = double(n);
    const double den = std::sin(kPi * u / nn);
    const cplx phase = std::polar(1.0, exponent_sign * kPi * u * (nn - 1.0) / nn);
    if (std::abs(den) < 1e-9 / nn) {
        // u at an integer multiple of n: the sum collapses to n terms of equal
        // phase; combined with the leading phase factor this is exactly n.
        return cplx(nn, 0.0);
    }
    return phase * (std::sin(kPi * u) / den);
}

// Fractional search grid from -0.5 to 0.5 inclusive.
std::vector<double> frac_grid(double step) {
    if (!(step > 0.0) || step > 0.5) throw std::invalid_argument("estimator: step must be in (0, 0.5]");
    std::vector<double> g;
    for (int i = 0;; ++i) {
        double v = -0.5 + double(i) * step;
        if (v > 0.5 + 1e-12) break;
        g.push_back(std::min(v, 0.5));
        if (v >= 0.5 - 1e-12) break;
    }
    return g;
}

}  // namespace

double PathEstimate::power_db() const { return 20.0 * std::log10(gain); }

cplx eq_channel_doppler(double delta_k, double k_i, std::size_t N) {
    return dirichlet(delta_k - k_i, N, -1.0);
}

std::vector<cplx> eq_channel_doppler(const std::vector<int>& delta_k, double k_i, std::size_t N) {
    std::vector<cplx> out(delta_k.size());
    for (std::size_t i = 0; i < delta_k.size(); ++i)
        out[i] = eq_channel_doppler(double(delta_k[i]), k_i, N);
    return out;
}

cplx eq_channel_delay(double delta_l, double l_i, std::size_t M) {
    return dirichlet(delta_l - l_i, M, +1.0);
}

std::vector<cplx> eq_channel_delay(const std::vector<int>& delta_l, double l_i, std::size_t M) {
    std::vector<cplx> out(delta_l.size());
    for (std::size_t i = 0; i < delta_l.size(); ++i)
        out[i] = eq_channel_delay(double(delta_l[i]), l_i, M);
    return out;
}

namespace {

// Correlation of the CSF against the kernel centred at (k_i, l_i), evaluated
// with the separable split: first reduce every Doppler row against the delay
// kernel, then contract over rows. The kernel is the unit-gain model response
// h_eq,v * h_eq,tau / (MN) truncated to the measurement window.
struct KernelAccumulator {
    const Csf& csf;
    std::vector<cplx> row_reduced;  // per Doppler row, for the current l_i
    double delay_energy = 0.0;      // sum |h_eq,tau|^2 over the window

    explicit KernelAccumulator(const Csf& c) : csf(c), row_reduced(c.rows()) {}

    void reduce_delay(double l_i) {
        const std::size_t cols = csf.cols();
        delay_energy = 0.0;
        std::vector<cplx> kd(cols);
        for (std::size_t d = 0; d < cols; ++d) {
            kd[d] = eq_channel_delay(double(d), l_i, csf.cfg.M);
            delay_energy += std::norm(kd[d]);
        }
        for (std::size_t r = 0; r < csf.rows(); ++r) {
            cplx acc(0.0, 0.0);
            const cplx* row = &csf.data[r * cols];
            for (std::size_t d = 0; d < cols; ++d) acc += std::conj(kd[d]) * row[d];
            row_reduced[r] = acc;
        }
    }

    // Returns (LS amplitude, |<kernel, csf>|) for Doppler tap k_i at the
    // delay tap fixed by the last reduce_delay call.
    std::pair<cplx, double> contract_doppler(double k_i) const {
        const std::size_t N = csf.rows();
        cplx acc(0.0, 0.0);
        double dop_energy = 0.0;
        for (std::size_t r = 0; r < N; ++r) {
            cplx kv = eq_channel_doppler(double(int(r) - int(N / 2)), k_i, N);
            acc += std::conj(kv) * row_reduced[r];
            dop_energy += std::norm(kv);
        }
        const double mn = double(csf.cfg.M) * double(csf.cfg.N);
        // <K, y> with K = h_eq / MN; ||K||^2 = dop_energy * delay_energy / MN^2.
        cplx inner = acc / mn;
        double kernel_energy = dop_energy * delay_energy / (mn * mn);
        return {inner / kernel_energy, std::abs(inner)};
    }
};

}  // namespace

MatchedFilterSurface matched_filter_surface(const Csf& csf, int k_int, int l_int,
                                            const EstimatorConfig& cfg) {
    if (l_int < 0 || std::size_t(l_int) >= csf.cols() || csf.row_of(k_int) >= csf.rows())
        throw std::invalid_argument("estimator: cell outside the CSF");

    MatchedFilterSurface surf;
    surf.k_frac = frac_grid(cfg.doppler_step);
    surf.l_frac = frac_grid(cfg.delay_step);
    surf.values.resize(surf.k_frac.size() * surf.l_frac.size());
    surf.correlation.resize(surf.values.size());

    KernelAccumulator acc(csf);
    for (std::size_t il = 0; il < surf.l_frac.size(); ++il) {
        acc.reduce_delay(double(l_int) + surf.l_frac[il]);
        for (std::size_t ik = 0; ik < surf.k_frac.size(); ++ik) {
            auto [amp, corr] = acc.contract_doppler(double(k_int) + surf.k_frac[ik]);
            surf.values[ik * surf.l_frac.size() + il] = amp;
            surf.correlation[ik * surf.l_frac.size() + il] = corr;
        }
    }
    return surf;
}

namespace {

void subtract_kernel(std::vector<cplx>& resid, const Csf& csf, cplx amplitude, double k_i,
                     double l_i) {
    const std::size_t cols = csf.cols();
    const std::size_t N = csf.rows();
    const double mn = double(csf.cfg.M) * double(csf.cfg.N);
    std::vector<cplx> kd(cols);
    for (std::size_t d = 0; d < cols; ++d) kd[d] = eq_channel_delay(double(d), l_i, csf.cfg.M);
    for (std::size_t r = 0; r < N; ++r) {
        cplx kv = eq_channel_doppler(double(int(r) - int(N / 2)), k_i, N) * amplitude / mn;
        for (std::size_t d = 0; d < cols; ++d) resid[r * cols + d] -= kv * kd[d];
    }
}

}  // namespace

std::vector<PathEstimate> estimate_paths(const Csf& csf, const EstimatorConfig& cfg) {
    if (csf.data.empty()) throw std::invalid_argument("estimator: empty CSF");

    Csf resid = csf;
    const std::size_t cols = csf.cols();

    double peak_power = 0.0;
    for (const auto& v : csf.data) peak_power = std::max(peak_power, std::norm(v));
    double threshold = cfg.power_threshold_linear
                           ? *cfg.power_threshold_linear
                           : std::max(csf.noise_floor_estimate, peak_power * 1e-12) *
                                 std::pow(10.0, 6.0 / 10.0);

    std::vector<PathEstimate> out;
    for (std::size_t iter = 0; iter < cfg.max_paths; ++iter) {
        // Strongest residual cell.
        std::size_t best = 0;
        double best_pow = 0.0;
        for (std::size_t i = 0; i < resid.data.size(); ++i) {
            double p = std::norm(resid.data[i]);
            if (p > best_pow) {
                best_pow = p;
                best = i;
            }
        }
        const int k_int = resid.doppler_tap(best / cols);
        const int l_int = int(best % cols);

        auto surf = matched_filter_surface(resid, k_int, l_int, cfg);

        // Peak of the correlation statistic over the fractional grid.
        std::size_t arg = 0;
        for (std::size_t i = 1; i < surf.correlation.size(); ++i)
            if (surf.correlation[i] > surf.correlation[arg]) arg = i;
        double k_frac = surf.k_frac[arg / surf.l_frac.size()];
        double l_frac = surf.l_frac[arg % surf.l_frac.size()];
        const cplx amp = surf.values[arg];

        if (std::norm(amp) <= threshold) break;

        PathEstimate est;
        est.k_int = k_int;
        est.l_int = l_int;
        // A +0.5 offset is the same point as -0.5 against the next cell.
        if (k_frac >= 0.5) { est.k_int += 1; k_frac = -0.5; }
        if (l_frac >= 0.5) { est.l_int += 1; l_frac = -0.5; }
        est.k_frac = k_frac;
        est.l_frac = l_frac;
        est.doppler_hz = (double(est.k_int) + est.k_frac) * csf.cfg.doppler_resolution_hz();
        est.delay_s = (double(est.l_int) + est.l_frac) * csf.cfg.delay_resolution_s();
        est.gain = std::abs(amp);
        est.phase_rad = -2.0 * kPi * est.doppler_hz * est.delay_s;
        out.push_back(est);

        // Cancellation uses the measured complex amplitude, not the reported
        // model phase: a path whose own phase differs from -2pi*nu*tau would
        // otherwise be re-added instead of removed, and the least-squares
        // value is what guarantees the residual energy shrinks every pass.
        subtract_kernel(resid.data, resid, amp, double(est.k_int) + est.k_frac,
                        double(est.l_int) + est.l_frac);
    }
    return out;
}

NmseReport nmse(const std::vector<PathEstimate>& estimates, const PathSet& truth,
                const FrameConfig& cfg) {
    const double dtau = cfg.delay_resolution_s();
    const double dnu = cfg.doppler_resolution_hz();

    struct TruthTap {
        double k, l, mag;
        bool taken = false;
    };
    std::vector<TruthTap> taps;
    for (const auto& p : truth.paths)
        taps.push_back({p.doppler_hz / dnu, p.delay_s / dtau, std::abs(p.gain), false});

    NmseReport rep;
    double err_idx = 0.0, ref_idx = 0.0, err_amp = 0.0, ref_amp = 0.0;
    for (const auto& est : estimates) {
        const double ek = est.doppler_hz / dnu;
        const double el = est.delay_s / dtau;
        double best_d2 = std::numeric_limits<double>::infinity();
        TruthTap* best = nullptr;
        for (auto& t : taps) {
            if (t.taken) continue;
            double d2 = (t.k - ek) * (t.k - ek) + (t.l - el) * (t.l - el);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = &t;
            }
        }
        if (best && best_d2 <= 1.0) {  // 1-tap gating radius
            best->taken = true;
            ++rep.matched;
            err_idx += best_d2;
            ref_idx += best->k * best->k + best->l * best->l;
            err_amp += (est.gain - best->mag) * (est.gain - best->mag);
            ref_amp += best->mag * best->mag;
        } else {
            ++rep.unmatched_estimates;
        }
    }
    for (const auto& t : taps)
        if (!t.taken) ++rep.unmatched_truth;

    const double inf = std::numeric_limits<double>::infinity();
    rep.index_nmse = rep.matched == 0 ? inf : (ref_idx == 0.0 ? (err_idx == 0.0 ? 0.0 : inf)
                                                              : err_idx / ref_idx);
    rep.amplitude_nmse = rep.matched == 0 ? inf : err_amp / ref_amp;
    return rep;
}

}  // namespace ddsound
