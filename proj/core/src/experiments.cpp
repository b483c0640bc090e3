// SPDX-License-Identifier: Apache-2.0
#include "ddsound/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ddsound/analysis.hpp"
#include "ddsound/io.hpp"
#include "ddsound/ofdm.hpp"
#include "ddsound/pn.hpp"
#include "ddsound/sync.hpp"
#include "ddsound/waveform.hpp"

namespace ddsound::experiments {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

FrameConfig frame_of(const Spec& spec) {
    return make_frame_config(spec.M, spec.N, spec.bandwidth_hz,
                             spec.l_tau == 0 ? spec.M / 4 : spec.l_tau, spec.pn_amplitude);
}

PathSet channel_of(const Spec& spec, std::uint64_t seed) {
    if (!spec.paths.paths.empty()) return spec.paths;
    if (!spec.tap_delays_s.empty())
        return rayleigh_tap_paths(spec.tap_delays_s, spec.tap_powers_db, spec.tap_max_dopplers_hz,
                                  spec.n_sinusoids, seed);
    throw std::invalid_argument("experiment: spec has no channel definition");
}

struct Check {
    std::vector<CheckResult>& sink;
    void operator()(const std::string& name, bool pass, const std::string& detail) {
        sink.push_back({name, pass, detail});
    }
};

// ---------------------------------------------------------------------------
// papr_sweep

void run_papr_sweep(const Spec& spec, const fs::path& dir, Result& res) {
    std::ofstream csv(dir / "papr.csv");
    csv << "M,N,seed,designed_db,single_pilot_db,full_pn_db\n";
    std::ofstream agg(dir / "papr_mean.csv");
    agg << "M,N,designed_db,single_pilot_db,full_pn_db\n";

    Check check{res.checks};
    bool ordering_ok = true;
    double designed_last = 0, pilot_last = 0, pn_last = 0;
    std::size_t m_last = 0;

    for (std::size_t M : spec.m_values) {
        const std::size_t N = M / 2;
        // Assembled directly: the sweep reaches below the sounding-frame
        // minimum grid (N = 8 at M = 16), which is fine for a pattern study.
        FrameConfig cfg;
        cfg.M = M;
        cfg.N = N;
        cfg.bandwidth_hz = spec.bandwidth_hz;
        cfg.delta_f_hz = spec.bandwidth_hz / double(M);
        cfg.symbol_duration_s = 1.0 / cfg.delta_f_hz;
        cfg.l_tau = M / 4;
        cfg.k_p = N / 2;
        cfg.l_p = M / 2;
        cfg.pn_amplitude = spec.pn_amplitude;

        // PAPR of one frame is a max statistic of the chip draw; average over
        // the seed list so small grids are not colored by one aligned column.
        double designed = 0, full = 0;
        double pilot = papr_db(heisenberg_modulate(isfft(single_pilot_grid(cfg))));
        for (std::uint64_t seed : spec.seeds) {
            auto chips = generate_pn(cfg.M * cfg.N, kDefaultPnPolynomial,
                                     std::uint32_t((seed * 0x9E3779B9u) & 0x7FFFFFFF) | 1u);
            double d = papr_db(heisenberg_modulate(isfft(build_sounding_grid(cfg, chips))));
            double f = papr_db(heisenberg_modulate(isfft(full_pn_grid(cfg, chips))));
            csv << M << ',' << N << ',' << seed << ',' << fmt(d) << ',' << fmt(pilot) << ','
                << fmt(f) << '\n';
            designed += d / double(spec.seeds.size());
            full += f / double(spec.seeds.size());
        }
        agg << M << ',' << N << ',' << fmt(designed) << ',' << fmt(pilot) << ',' << fmt(full)
            << '\n';
        ordering_ok = ordering_ok && pilot > designed && designed > full;
        designed_last = designed;
        pilot_last = pilot;
        pn_last = full;
        m_last = M;
    }
    res.outputs.push_back("papr.csv");
    res.outputs.push_back("papr_mean.csv");
    res.metrics["designed_papr_db_max_m"] = designed_last;
    res.metrics["single_pilot_papr_db_max_m"] = pilot_last;
    res.metrics["full_pn_papr_db_max_m"] = pn_last;

    check("papr ordering single-pilot > designed > full-PN at every M", ordering_ok, "");
    check("designed PAPR stabilizes below 15 dB", designed_last < 15.0,
          "designed @ M=" + std::to_string(m_last) + ": " + fmt3(designed_last) + " dB");
    double gap_pn = designed_last - pn_last;
    check("designed-vs-PN gap within 3 +- 1.5 dB", gap_pn >= 1.5 && gap_pn <= 4.5,
          "gap " + fmt3(gap_pn) + " dB");
    double gap_pilot = pilot_last - designed_last;
    check("single-pilot-vs-designed gap within 20 +- 3 dB", gap_pilot >= 17.0 && gap_pilot <= 23.0,
          "gap " + fmt3(gap_pilot) + " dB");
}

// ---------------------------------------------------------------------------
// sync_gain_sweep

void run_sync_gain_sweep(const Spec& spec, const fs::path& dir, Result& res) {
    std::ofstream csv(dir / "sync_gain.csv");
    csv << "M,N,snr_db,seed,gain_db\n";
    std::ofstream agg(dir / "sync_gain_mean.csv");
    agg << "M,N,snr_db,mean_gain_db\n";

    Check check{res.checks};

    // gains[size][snr]
    std::vector<std::vector<double>> gains(spec.frame_sizes.size(),
                                           std::vector<double>(spec.snr_values_db.size(), 0.0));

    for (std::size_t si = 0; si < spec.frame_sizes.size(); ++si) {
        auto [M, N] = spec.frame_sizes[si];
        auto cfg = make_frame_config(M, N, spec.bandwidth_hz, M / 4, spec.pn_amplitude);
        IqBuffer frame = synthesize_frame(cfg);
        IqBuffer tx = repeat_frames(frame, 4);
        const std::size_t mn = cfg.frame_samples();
        const std::size_t L = mn / 4;
        IqBuffer sync_sig{std::vector<cplx>(frame.samples.begin(), frame.samples.begin() + L),
                          cfg.bandwidth_hz};

        for (std::size_t ni = 0; ni < spec.snr_values_db.size(); ++ni) {
            double mean = 0.0;
            for (std::uint64_t seed : spec.seeds) {
                IqBuffer rx = add_awgn(tx, spec.snr_values_db[ni], seed ^ (M * 131 + ni));
                auto corr = sliding_correlation(rx, sync_sig, 2 * mn);
                double g = sync_gain_db(corr, L);
                mean += g;
                csv << M << ',' << N << ',' << fmt(spec.snr_values_db[ni]) << ',' << seed << ','
                    << fmt(g) << '\n';
            }
            mean /= double(spec.seeds.size());
            gains[si][ni] = mean;
            agg << M << ',' << N << ',' << fmt(spec.snr_values_db[ni]) << ',' << fmt(mean) << '\n';
        }
    }
    res.outputs.push_back("sync_gain.csv");
    res.outputs.push_back("sync_gain_mean.csv");

    bool snr_monotone = true, size_monotone = true;
    for (std::size_t si = 0; si < gains.size(); ++si)
        for (std::size_t ni = 1; ni < gains[si].size(); ++ni)
            snr_monotone = snr_monotone && gains[si][ni] > gains[si][ni - 1];
    // The gain integrates over the sync length, so it is ordered by frame
    // length M*N; configurations sharing a frame length must agree instead
    // (e.g. (1024,512) and (2048,256) are the same 5.24 ms frame).
    for (std::size_t ni = 0; ni < spec.snr_values_db.size(); ++ni)
        for (std::size_t si = 1; si < gains.size(); ++si) {
            std::size_t mn_prev = spec.frame_sizes[si - 1].first * spec.frame_sizes[si - 1].second;
            std::size_t mn = spec.frame_sizes[si].first * spec.frame_sizes[si].second;
            if (mn > mn_prev)
                size_monotone = size_monotone && gains[si][ni] > gains[si - 1][ni];
            else
                size_monotone =
                    size_monotone && std::abs(gains[si][ni] - gains[si - 1][ni]) < 0.5;
        }

    std::ostringstream detail;
    for (std::size_t si = 0; si < gains.size(); ++si) {
        detail << '(' << spec.frame_sizes[si].first << ',' << spec.frame_sizes[si].second << "):";
        for (double g : gains[si]) detail << ' ' << fmt3(g);
        detail << "  ";
    }
    check("sync gain strictly increases with SNR at fixed frame size", snr_monotone, detail.str());
    check("sync gain strictly increases with frame length at fixed SNR", size_monotone,
          detail.str());

    // Detection rate on the largest configured size at 0 dB.
    auto [M, N] = spec.frame_sizes.back();
    auto cfg = make_frame_config(M, N, spec.bandwidth_hz, M / 4, spec.pn_amplitude);
    IqBuffer frame = synthesize_frame(cfg);
    IqBuffer tx = repeat_frames(frame, 4);
    const std::size_t mn = cfg.frame_samples();
    const std::size_t L = mn / 4;
    IqBuffer sync_sig{std::vector<cplx>(frame.samples.begin(), frame.samples.begin() + L),
                      cfg.bandwidth_hz};

    std::size_t hits = 0;
    const std::size_t window = mn;  // one frame of timing uncertainty
    for (std::size_t t = 0; t < spec.detection_trials; ++t) {
        std::mt19937_64 rng(spec.seeds.front() * 7919 + t);
        std::size_t offset = rng() % mn;
        IqBuffer slice{std::vector<cplx>(tx.samples.begin() + std::ptrdiff_t(offset), tx.samples.end()),
                       cfg.bandwidth_hz};
        IqBuffer rx = add_awgn(slice, 0.0, rng());
        auto corr = sliding_correlation(rx, sync_sig, window);
        std::size_t k_to = find_frame_start(corr);
        if ((k_to + offset) % mn == 0) ++hits;
    }
    double rate = double(hits) / double(spec.detection_trials);
    res.metrics["detection_rate_0db"] = rate;
    check("frame start recovered in >= 99% of trials at 0 dB", rate >= 0.99,
          std::to_string(hits) + "/" + std::to_string(spec.detection_trials));
}

// ---------------------------------------------------------------------------
// dynamic_range_cfo

void run_dynamic_range_cfo(const Spec& spec, const fs::path& dir, Result& res) {
    auto cfg = frame_of(spec);
    const double dnu = cfg.doppler_resolution_hz();
    IqBuffer frame = synthesize_frame(cfg);
    PathSet ideal;
    ideal.paths.push_back({cplx(1.0, 0.0), 0.0, 0.0});

    std::ofstream csv(dir / "dynamic_range.csv");
    csv << "cfo_multiple,cfo_hz,seed,dd_dr_db,dd_peak_tap,ofdm_dr_db\n";
    std::ofstream agg(dir / "dynamic_range_mean.csv");
    agg << "cfo_multiple,cfo_hz,dd_dr_db,ofdm_dr_db\n";

    Check check{res.checks};
    std::vector<double> dd_mean, ofdm_mean;
    bool peak_shift_ok = true;

    for (double mult : spec.cfo_multiples) {
        const double cfo = mult * dnu;
        double dd_acc = 0.0, ofdm_acc = 0.0;
        for (std::uint64_t seed : spec.seeds) {
            Csf csf = sound_synthetic(cfg, frame, ideal, spec.snr_db, cfo, seed);
            double dr = dynamic_range_db(csf);
            std::size_t peak = 0;
            for (std::size_t i = 1; i < csf.data.size(); ++i)
                if (std::norm(csf.data[i]) > std::norm(csf.data[peak])) peak = i;
            int peak_tap = csf.doppler_tap(peak / csf.cols());
            peak_shift_ok = peak_shift_ok && peak_tap == int(std::lround(mult));

            auto ofdm = ofdm_reference_sounder(ideal, cfo, spec.snr_db, 2048, seed ^ 0x0fd3,
                                               cfg.bandwidth_hz);
            dd_acc += dr;
            ofdm_acc += ofdm.dynamic_range_db;
            csv << fmt(mult) << ',' << fmt(cfo) << ',' << seed << ',' << fmt(dr) << ','
                << peak_tap << ',' << fmt(ofdm.dynamic_range_db) << '\n';
        }
        dd_mean.push_back(dd_acc / double(spec.seeds.size()));
        ofdm_mean.push_back(ofdm_acc / double(spec.seeds.size()));
        agg << fmt(mult) << ',' << fmt(cfo) << ',' << fmt(dd_mean.back()) << ','
            << fmt(ofdm_mean.back()) << '\n';
    }
    res.outputs.push_back("dynamic_range.csv");
    res.outputs.push_back("dynamic_range_mean.csv");

    double dd_spread = *std::max_element(dd_mean.begin(), dd_mean.end()) -
                       *std::min_element(dd_mean.begin(), dd_mean.end());
    res.metrics["dd_dr_spread_db"] = dd_spread;
    check("DD dynamic range varies < 1 dB across the CFO sweep", dd_spread < 1.0,
          "spread " + fmt3(dd_spread) + " dB");
    check("DD peak relocates by exactly the CFO bin count", peak_shift_ok, "");

    bool ofdm_monotone = true;
    for (std::size_t i = 1; i < ofdm_mean.size(); ++i)
        ofdm_monotone = ofdm_monotone && ofdm_mean[i] < ofdm_mean[i - 1];
    double drop = ofdm_mean.front() - ofdm_mean.back();
    res.metrics["ofdm_dr_drop_db"] = drop;
    std::ostringstream od;
    for (double v : ofdm_mean) od << fmt3(v) << ' ';
    check("OFDM dynamic range strictly decreases with CFO", ofdm_monotone, od.str());
    check("OFDM dynamic range drops >= 10 dB at the largest CFO", drop >= 10.0,
          "drop " + fmt3(drop) + " dB");
}

// ---------------------------------------------------------------------------
// nmse_sweep

void run_nmse_sweep(const Spec& spec, const fs::path& dir, Result& res) {
    auto cfg = frame_of(spec);
    IqBuffer frame = synthesize_frame(cfg);
    const double dtau = cfg.delay_resolution_s();
    const double dnu = cfg.doppler_resolution_hz();

    std::ofstream csv(dir / "nmse.csv");
    csv << "snr_db,step,index_nmse,amplitude_nmse,matched,unmatched_truth,unmatched_estimates\n";

    Check check{res.checks};

    // index [step][snr]
    const std::size_t n_steps = spec.step_values.size();
    const std::size_t n_snrs = spec.snr_values_db.size();
    std::vector<std::vector<double>> idx(n_steps, std::vector<double>(n_snrs, 0.0));
    std::vector<std::vector<double>> amp(n_steps, std::vector<double>(n_snrs, 0.0));

    for (std::size_t si = 0; si < n_steps; ++si) {
        EstimatorConfig est = spec.estimator;
        est.delay_step = spec.step_values[si];
        est.doppler_step = spec.step_values[si];
        est.max_paths = 8;

        for (std::size_t ni = 0; ni < n_snrs; ++ni) {
            double err_idx = 0.0, ref_idx = 0.0, err_amp = 0.0, ref_amp = 0.0;
            std::size_t matched = 0, um_truth = 0, um_est = 0;
            for (std::uint64_t seed : spec.seeds) {
                // Common random numbers across the sweep: the path draw and the
                // noise stream depend on the seed only.
                std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 1);
                auto uni = [&rng](double lo, double hi) {
                    return lo + (hi - lo) * (double(rng() >> 11) / 9007199254740992.0);
                };
                int k_int = int(std::lround(uni(-double(cfg.N) / 4.0, double(cfg.N) / 4.0)));
                int l_int = int(std::lround(uni(4.0, double(cfg.l_tau) - 4.0)));
                double k_frac = uni(-0.4, 0.4);
                double l_frac = uni(-0.4, 0.4);
                PathSet truth;
                truth.paths.push_back({std::polar(1.0, uni(0.0, 2.0 * 3.14159265358979)),
                                       (l_int + l_frac) * dtau, (k_int + k_frac) * dnu});

                Csf csf = sound_synthetic(cfg, frame, truth, spec.snr_values_db[ni], 0.0, seed);
                auto estimates = estimate_paths(csf, est);
                auto rep = nmse(estimates, truth, cfg);
                if (rep.matched > 0) {
                    // Pool the raw sums so seeds with larger true taps do not
                    // dominate through the normalization.
                    double k = truth.paths[0].doppler_hz / dnu, l = truth.paths[0].delay_s / dtau;
                    ref_idx += k * k + l * l;
                    err_idx += rep.index_nmse * (k * k + l * l);
                    ref_amp += 1.0;
                    err_amp += rep.amplitude_nmse;
                    ++matched;
                }
                um_truth += rep.unmatched_truth;
                um_est += rep.unmatched_estimates;
            }
            idx[si][ni] = matched == 0 ? kInf : err_idx / ref_idx;
            amp[si][ni] = matched == 0 ? kInf : err_amp / ref_amp;
            csv << fmt(spec.snr_values_db[ni]) << ',' << fmt(spec.step_values[si]) << ','
                << fmt(idx[si][ni]) << ',' << fmt(amp[si][ni]) << ',' << matched << ',' << um_truth
                << ',' << um_est << '\n';
        }
    }
    res.outputs.push_back("nmse.csv");

    auto non_increasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (std::isinf(v[i - 1])) continue;
            if (v[i] > v[i - 1] * 1.05) return false;  // 5% slack on flat quantization floors
        }
        return true;
    };

    bool idx_snr = true, amp_snr = true;
    for (std::size_t si = 0; si < n_steps; ++si) {
        idx_snr = idx_snr && non_increasing(idx[si]);
        amp_snr = amp_snr && non_increasing(amp[si]);
    }
    // At the highest SNR, shrinking the step must not hurt.
    std::vector<double> idx_step(n_steps), amp_step(n_steps);
    for (std::size_t si = 0; si < n_steps; ++si) {
        idx_step[si] = idx[si][n_snrs - 1];
        amp_step[si] = amp[si][n_snrs - 1];
    }

    std::ostringstream detail;
    detail << "index ";
    for (const auto& row : idx) {
        for (double v : row) detail << fmt(v) << ' ';
        detail << "| ";
    }
    check("index NMSE non-increasing in SNR at every step", idx_snr, detail.str());
    check("amplitude NMSE non-increasing in SNR at every step", amp_snr, "");
    check("index NMSE non-increasing as the step shrinks at 30 dB", non_increasing(idx_step), "");
    check("amplitude NMSE non-increasing as the step shrinks at 30 dB", non_increasing(amp_step),
          "");
}

// ---------------------------------------------------------------------------
// verify_rayleigh

void run_verify_rayleigh(const Spec& spec, const fs::path& dir, Result& res) {
    auto cfg = frame_of(spec);
    IqBuffer frame = synthesize_frame(cfg);
    const double dnu = cfg.doppler_resolution_hz();

    const auto& delays = spec.tap_delays_s;
    std::vector<std::size_t> cols(delays.size());
    for (std::size_t t = 0; t < delays.size(); ++t)
        cols[t] = std::size_t(std::llround(delays[t] * cfg.bandwidth_hz));

    // Seed-averaged per-row power at each ridge column.
    std::vector<std::vector<double>> ridge(delays.size(), std::vector<double>(cfg.N, 0.0));
    Csf last;
    for (std::uint64_t seed : spec.seeds) {
        PathSet channel = rayleigh_tap_paths(spec.tap_delays_s, spec.tap_powers_db,
                                             spec.tap_max_dopplers_hz, spec.n_sinusoids, seed);
        Csf csf = sound_synthetic(cfg, frame, channel, spec.snr_db, spec.cfo_hz, seed);
        for (std::size_t t = 0; t < delays.size(); ++t)
            for (std::size_t r = 0; r < cfg.N; ++r)
                ridge[t][r] += std::norm(csf.at(r, cols[t])) / double(spec.seeds.size());
        last = std::move(csf);
    }

    std::ofstream csv(dir / "ridges.csv");
    csv << "delay_s,rel_power_db,expected_db,doppler_edge_neg_hz,doppler_edge_pos_hz,expected_edge_hz\n";

    Check check{res.checks};
    std::vector<double> ridge_power(delays.size(), 0.0);
    for (std::size_t t = 0; t < delays.size(); ++t)
        for (double p : ridge[t]) ridge_power[t] += p;

    bool powers_ok = true, edges_ok = true;
    for (std::size_t t = 0; t < delays.size(); ++t) {
        double rel = 10.0 * std::log10(ridge_power[t] / ridge_power[0]);
        double expect = spec.tap_powers_db[t] - spec.tap_powers_db[0];
        powers_ok = powers_ok && std::abs(rel - expect) <= 0.5;

        double peak = *std::max_element(ridge[t].begin(), ridge[t].end());
        int edge_neg = 0, edge_pos = 0;
        for (std::size_t r = 0; r < cfg.N; ++r) {
            if (ridge[t][r] < peak * 0.1) continue;
            int tap = int(r) - int(cfg.N / 2);
            edge_neg = std::min(edge_neg, tap);
            edge_pos = std::max(edge_pos, tap);
        }
        double expect_tap = spec.tap_max_dopplers_hz[t] / dnu;
        edges_ok = edges_ok && std::abs(edge_pos - expect_tap) <= 1.0 &&
                   std::abs(-edge_neg - expect_tap) <= 1.0;

        csv << fmt(delays[t]) << ',' << fmt(rel) << ',' << fmt(expect) << ','
            << fmt(edge_neg * dnu) << ',' << fmt(edge_pos * dnu) << ','
            << fmt(spec.tap_max_dopplers_hz[t]) << '\n';
        res.metrics["ridge_" + std::to_string(t) + "_rel_db"] = rel;
        res.metrics["ridge_" + std::to_string(t) + "_edge_pos_hz"] = edge_pos * dnu;
    }
    res.outputs.push_back("ridges.csv");

    io::write_csf(last, dir / "csf.ddcf");
    io::write_profile_csv(pdp(last), dir / "pdp.csv");
    io::write_profile_csv(dpsd(last), dir / "dpsd.csv");
    res.outputs.insert(res.outputs.end(), {"csf.ddcf", "pdp.csv", "dpsd.csv"});

    check("ridge powers match the tap configuration within 0.5 dB", powers_ok, "");
    check("Doppler support edges within one Doppler bin of each f_max", edges_ok, "");
}

// ---------------------------------------------------------------------------
// verify_pure_doppler

void run_verify_pure_doppler(const Spec& spec, const fs::path& dir, Result& res) {
    auto cfg = frame_of(spec);
    IqBuffer frame = synthesize_frame(cfg);
    const double dtau = cfg.delay_resolution_s();
    const double dnu = cfg.doppler_resolution_hz();
    const PathSet& truth = spec.paths;

    Csf csf = sound_synthetic(cfg, frame, truth, spec.snr_db, spec.cfo_hz, spec.seeds.front());
    io::write_csf(csf, dir / "csf.ddcf");
    io::write_csf_csv(csf, dir / "csf.csv");

    Check check{res.checks};

    // Raw CSF peaks at the nearest integer cells.
    std::ofstream peaks(dir / "peaks.csv");
    peaks << "path,doppler_tap,delay_tap,power_db,rel_power_db\n";
    std::vector<double> cell_power(truth.paths.size());
    for (std::size_t i = 0; i < truth.paths.size(); ++i) {
        int k = int(std::lround(truth.paths[i].doppler_hz / dnu));
        int l = int(std::lround(truth.paths[i].delay_s / dtau));
        cell_power[i] = std::norm(csf.at(csf.row_of(k), std::size_t(l)));
        peaks << i << ',' << k << ',' << l << ',' << fmt(10.0 * std::log10(cell_power[i])) << ','
              << fmt(10.0 * std::log10(cell_power[i] / cell_power[0])) << '\n';
    }
    double third_rel = 10.0 * std::log10(cell_power[2] / cell_power[0]);
    res.metrics["third_path_rel_db"] = third_rel;
    check("raw CSF third path at -13.37 dB +- 1 dB relative to the first",
          std::abs(third_rel - (-13.37)) <= 1.0, "measured " + fmt3(third_rel) + " dB");

    // Refined estimation.
    auto estimates = estimate_paths(csf, spec.estimator);
    io::write_estimates_csv(estimates, dir / "estimates.csv");
    res.outputs.insert(res.outputs.end(), {"csf.ddcf", "csf.csv", "peaks.csv", "estimates.csv"});

    bool delays_ok = true, dopplers_ok = true, powers_ok = true;
    std::ostringstream detail;
    for (std::size_t i = 0; i < truth.paths.size(); ++i) {
        const auto& t = truth.paths[i];
        const PathEstimate* best = nullptr;
        double best_d = kInf;
        for (std::size_t e = 0; e < std::min<std::size_t>(estimates.size(), truth.paths.size());
             ++e) {
            double d = std::abs(estimates[e].delay_s - t.delay_s) / dtau +
                       std::abs(estimates[e].doppler_hz - t.doppler_hz) / dnu;
            if (d < best_d) {
                best_d = d;
                best = &estimates[e];
            }
        }
        if (!best) {
            delays_ok = dopplers_ok = powers_ok = false;
            break;
        }
        double derr = std::abs(best->delay_s - t.delay_s);
        double verr = std::abs(best->doppler_hz - t.doppler_hz);
        double perr = std::abs(best->power_db() - 20.0 * std::log10(std::abs(t.gain)));
        delays_ok = delays_ok && derr <= 1.25e-9 + 1e-15;
        dopplers_ok = dopplers_ok && verr <= 2.0;
        powers_ok = powers_ok && perr <= 0.5;
        detail << "p" << i << " derr=" << fmt(derr) << "s verr=" << fmt3(verr)
               << "Hz perr=" << fmt3(perr) << "dB  ";
    }
    check("refined delays within 1.25 ns", delays_ok, detail.str());
    check("refined Dopplers within 2 Hz", dopplers_ok, "");
    check("refined powers within 0.5 dB", powers_ok, "");
}

// ---------------------------------------------------------------------------
// sound

void run_sound(const Spec& spec, const fs::path& dir, Result& res) {
    auto cfg = frame_of(spec);
    IqBuffer frame =
        spec.pn_seed == 0
            ? synthesize_frame(cfg)
            : heisenberg_modulate(isfft(build_sounding_grid(
                  cfg, generate_pn(pn_cells_required(cfg), kDefaultPnPolynomial, spec.pn_seed))));
    const std::size_t mn = cfg.frame_samples();

    IqBuffer rx;
    if (!spec.input_iq.empty()) {
        rx = io::read_iq(spec.input_iq);
        if (std::abs(rx.sample_rate_hz - cfg.bandwidth_hz) > 1e-3 * cfg.bandwidth_hz)
            throw std::invalid_argument(
                "sound: capture sample rate " + std::to_string(rx.sample_rate_hz) +
                " Hz does not match the configured bandwidth");
    } else {
        PathSet channel = channel_of(spec, spec.seeds.front());
        rx = repeat_frames(frame, 4);
        rx = apply_paths(rx, channel);
        if (spec.cfo_hz != 0.0) rx = apply_cfo(rx, spec.cfo_hz);
        rx = add_awgn(rx, spec.snr_db, spec.seeds.front());
        io::write_iq(rx, dir / "capture.ddiq");
        res.outputs.push_back("capture.ddiq");
    }

    const std::size_t L = mn / 4;
    if (rx.size() < mn + L)
        throw std::invalid_argument("sound: capture shorter than one frame plus sync length");
    IqBuffer sync_sig{std::vector<cplx>(frame.samples.begin(), frame.samples.begin() + L),
                      cfg.bandwidth_hz};
    const std::size_t window = std::min(2 * mn, rx.size() - L);
    auto corr = sliding_correlation(rx, sync_sig, window);
    std::size_t k_to = find_frame_start(corr);
    res.metrics["k_to"] = double(k_to);
    res.metrics["sync_gain_db"] = sync_gain_db(corr, L);

    // Prefer the next frame boundary so the extracted frame sits in the
    // channel's steady state.
    std::size_t start = (k_to + 2 * mn <= rx.size()) ? k_to + mn : k_to;
    IqBuffer aligned{std::vector<cplx>(rx.samples.begin() + std::ptrdiff_t(start),
                                       rx.samples.begin() + std::ptrdiff_t(start + mn)),
                     rx.sample_rate_hz};
    Csf csf = extract_csf(aligned, cfg);
    io::write_csf(csf, dir / "csf.ddcf");
    io::write_csf_csv(csf, dir / "csf.csv");
    res.metrics["dynamic_range_db"] = dynamic_range_db(csf);

    auto estimates = estimate_paths(csf, spec.estimator);
    io::write_estimates_csv(estimates, dir / "estimates.csv");

    std::vector<io::StatsRow> stats;
    if (estimates.size() >= 2) {
        auto prof_d = pdp(estimates, spec.estimator.delay_step * cfg.delay_resolution_s());
        auto prof_v = dpsd(estimates, spec.estimator.doppler_step * cfg.doppler_resolution_hz());
        io::write_profile_csv(prof_d, dir / "pdp.csv");
        io::write_profile_csv(prof_v, dir / "dpsd.csv");
        stats.push_back({0, count_mpcs(estimates), k_factor_db(estimates),
                         rms_delay_spread_s(prof_d), rms_doppler_spread_hz(prof_v)});
        io::write_stats_csv(stats, dir / "stats.csv");
        res.outputs.insert(res.outputs.end(), {"pdp.csv", "dpsd.csv", "stats.csv"});
    }
    res.outputs.insert(res.outputs.end(), {"csf.ddcf", "csf.csv", "estimates.csv"});

    Check check{res.checks};
    check("synchronization found a frame start", true, "k_TO = " + std::to_string(k_to));
    check("paths extracted", !estimates.empty(),
          std::to_string(estimates.size()) + " estimates");
}

}  // namespace

IqBuffer repeat_frames(const IqBuffer& frame, std::size_t count) {
    IqBuffer out;
    out.sample_rate_hz = frame.sample_rate_hz;
    out.samples.reserve(frame.size() * count);
    for (std::size_t i = 0; i < count; ++i)
        out.samples.insert(out.samples.end(), frame.samples.begin(), frame.samples.end());
    return out;
}

Csf sound_synthetic(const FrameConfig& cfg, const IqBuffer& tx_frame, const PathSet& paths,
                    double snr_db, double cfo_hz, std::uint64_t seed) {
    IqBuffer tx = repeat_frames(tx_frame, 2);
    IqBuffer rx = apply_paths(tx, paths);
    if (cfo_hz != 0.0) rx = apply_cfo(rx, cfo_hz);
    if (!std::isinf(snr_db)) rx = add_awgn(rx, snr_db, seed);
    const std::size_t mn = cfg.frame_samples();
    IqBuffer steady{std::vector<cplx>(rx.samples.begin() + std::ptrdiff_t(mn),
                                      rx.samples.begin() + std::ptrdiff_t(2 * mn)),
                    rx.sample_rate_hz};
    return extract_csf(steady, cfg);
}

Spec default_spec(const std::string& kind) {
    Spec s;
    s.kind = kind;
    if (kind == "papr_sweep") {
        for (std::size_t m = 16; m <= 4096; m *= 2) s.m_values.push_back(m);
        s.bandwidth_hz = 100e6;
        s.seeds = {1, 2, 3, 4, 5};
    } else if (kind == "sync_gain_sweep") {
        s.frame_sizes = {{256, 128}, {1024, 512}, {2048, 256}};
        s.snr_values_db = {-10.0, 0.0, 10.0};
        s.seeds.clear();
        for (std::uint64_t i = 1; i <= 10; ++i) s.seeds.push_back(i);
        s.detection_trials = 100;
    } else if (kind == "dynamic_range_cfo") {
        s.M = 2048;
        s.N = 256;
        s.bandwidth_hz = 100e6;
        s.snr_db = 30.0;
        s.cfo_multiples = {0.0, 1.0, 4.0, 16.0};
        s.seeds.clear();
        for (std::uint64_t i = 1; i <= 8; ++i) s.seeds.push_back(i);
    } else if (kind == "nmse_sweep") {
        s.M = 1024;
        s.N = 128;
        s.bandwidth_hz = 100e6;
        s.snr_values_db = {0.0, 10.0, 20.0, 30.0};
        s.step_values = {0.1, 0.05, 0.01};
        s.seeds.clear();
        for (std::uint64_t i = 1; i <= 60; ++i) s.seeds.push_back(i);
    } else if (kind == "verify_rayleigh") {
        s.M = 4096;
        s.N = 2048;
        s.bandwidth_hz = 100e6;
        s.tap_delays_s = {0.0, 2e-6, 4e-6};
        s.tap_powers_db = {0.0, -5.0, -10.0};
        s.tap_max_dopplers_hz = {953.67, 476.84, 238.42};
        s.n_sinusoids = 64;
        // Ridge powers fade within one frame (edge-clustered sinusoid pairs
        // stay coherent over the frame), so the per-seed ridge estimate has a
        // few-tenths-dB spread; a 30-seed ensemble brings the mean inside the
        // half-dB acceptance window.
        s.seeds.clear();
        for (std::uint64_t i = 1; i <= 30; ++i) s.seeds.push_back(i);
    } else if (kind == "verify_pure_doppler") {
        s.M = 2048;
        s.N = 256;
        s.bandwidth_hz = 80e6;
        s.paths = pure_doppler_paths({0.0, 1.25e-6, 2.49e-6}, {0.0, -610.35, 1251.22},
                                     {0.0, -5.0, -10.0});
        // Noiseless, like the cabled back-to-back run it reproduces; the
        // remaining estimation error is the PN leakage dragged across the
        // guard band by the fractional delay of the third path.
        s.snr_db = std::numeric_limits<double>::infinity();
        s.estimator.delay_step = 0.1;
        s.estimator.doppler_step = 0.01;
    } else if (kind == "sound") {
        s.M = 2048;
        s.N = 256;
        s.bandwidth_hz = 100e6;
        s.snr_db = 30.0;
    } else {
        throw std::invalid_argument("experiment: unknown kind '" + kind + "'");
    }
    return s;
}

Spec parse_spec(const std::string& text) {
    json j = json::parse(text);
    Spec s = default_spec(j.at("kind").get<std::string>());

    if (j.contains("frame")) {
        const auto& f = j["frame"];
        s.M = f.value("M", s.M);
        s.N = f.value("N", s.N);
        s.bandwidth_hz = f.value("bandwidth_hz", s.bandwidth_hz);
        s.l_tau = f.value("l_tau", s.l_tau);
        s.pn_amplitude = f.value("pn_amplitude", s.pn_amplitude);
        s.pn_seed = f.value("pn_seed", s.pn_seed);
    }
    if (j.contains("channel")) {
        const auto& c = j["channel"];
        if (c.contains("paths")) {
            s.paths = io::path_set_from_json(c["paths"].dump());
        }
        if (c.contains("rayleigh")) {
            const auto& r = c["rayleigh"];
            s.tap_delays_s = r.at("delays_s").get<std::vector<double>>();
            s.tap_powers_db = r.at("powers_db").get<std::vector<double>>();
            s.tap_max_dopplers_hz = r.at("max_dopplers_hz").get<std::vector<double>>();
            s.n_sinusoids = r.value("n_sinusoids", s.n_sinusoids);
        }
        if (c.contains("pure_doppler")) {
            const auto& p = c["pure_doppler"];
            s.paths = pure_doppler_paths(p.at("delays_s").get<std::vector<double>>(),
                                         p.at("dopplers_hz").get<std::vector<double>>(),
                                         p.at("powers_db").get<std::vector<double>>());
        }
    }
    if (j.contains("impairments")) {
        const auto& i = j["impairments"];
        if (i.contains("snr_db") && !i["snr_db"].is_null()) s.snr_db = i["snr_db"].get<double>();
        s.cfo_hz = i.value("cfo_hz", s.cfo_hz);
    }
    if (j.contains("estimator")) {
        const auto& e = j["estimator"];
        s.estimator.delay_step = e.value("delay_step", s.estimator.delay_step);
        s.estimator.doppler_step = e.value("doppler_step", s.estimator.doppler_step);
        s.estimator.max_paths = e.value("max_paths", s.estimator.max_paths);
        if (e.contains("power_threshold_db"))
            s.estimator.power_threshold_linear =
                std::pow(10.0, e["power_threshold_db"].get<double>() / 10.0);
    }
    if (j.contains("seeds")) s.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("detection_trials")) s.detection_trials = j["detection_trials"];
    if (j.contains("m_values")) s.m_values = j["m_values"].get<std::vector<std::size_t>>();
    if (j.contains("snr_values_db")) s.snr_values_db = j["snr_values_db"].get<std::vector<double>>();
    if (j.contains("cfo_multiples")) s.cfo_multiples = j["cfo_multiples"].get<std::vector<double>>();
    if (j.contains("step_values")) s.step_values = j["step_values"].get<std::vector<double>>();
    if (j.contains("frame_sizes")) {
        s.frame_sizes.clear();
        for (const auto& p : j["frame_sizes"])
            s.frame_sizes.emplace_back(p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>());
    }
    if (j.contains("input_iq")) s.input_iq = j["input_iq"].get<std::string>();
    if (s.seeds.empty()) throw std::invalid_argument("experiment: seed list must not be empty");
    return s;
}

Result run(const Spec& spec, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    Result res;
    auto t0 = std::chrono::steady_clock::now();

    if (spec.kind == "papr_sweep")
        run_papr_sweep(spec, out_dir, res);
    else if (spec.kind == "sync_gain_sweep")
        run_sync_gain_sweep(spec, out_dir, res);
    else if (spec.kind == "dynamic_range_cfo")
        run_dynamic_range_cfo(spec, out_dir, res);
    else if (spec.kind == "nmse_sweep")
        run_nmse_sweep(spec, out_dir, res);
    else if (spec.kind == "verify_rayleigh")
        run_verify_rayleigh(spec, out_dir, res);
    else if (spec.kind == "verify_pure_doppler")
        run_verify_pure_doppler(spec, out_dir, res);
    else if (spec.kind == "sound")
        run_sound(spec, out_dir, res);
    else
        throw std::invalid_argument("experiment: unknown kind '" + spec.kind + "'");

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json manifest;
    manifest["tool"] = "ddsound";
    manifest["version"] = "0.1.0";
    manifest["kind"] = spec.kind;
    manifest["frame"] = {{"M", spec.M}, {"N", spec.N}, {"bandwidth_hz", spec.bandwidth_hz},
                         {"l_tau", spec.l_tau}};
    manifest["seeds"] = spec.seeds;
    manifest["wall_time_s"] = wall;
    manifest["outputs"] = res.outputs;
    for (const auto& [k, v] : res.metrics)
        manifest["metrics"][k] = std::isfinite(v) ? json(v) : json(nullptr);
    for (const auto& c : res.checks)
        manifest["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    std::ofstream mf(out_dir / "manifest.json");
    mf << manifest.dump(2) << '\n';
    res.outputs.push_back("manifest.json");
    return res;
}

bool all_passed(const Result& result) {
    for (const auto& c : result.checks)
        if (!c.pass) return false;
    return true;
}

}  // namespace ddsound::experiments
