// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

#include "ddsound/estimator.hpp"

using namespace ddsound;

namespace {

constexpr double kPi = std::numbers::pi;

FrameConfig small_cfg() { return make_frame_config(64, 32, 64e5, 16); }

// Model CSF for a list of (gain, k_i, l_i) triples: each path contributes
// hdd * h_eq,v * h_eq,tau / (MN) over the window, hdd = g * e^{-j2pi nu tau}.
Csf model_csf(const FrameConfig& cfg, const std::vector<std::tuple<double, double, double>>& paths) {
    Csf csf(cfg);
    const double mn = double(cfg.M) * double(cfg.N);
    for (auto [g, ki, li] : paths) {
        cplx hdd = g * std::polar(1.0, -2.0 * kPi * ki * li / mn);
        for (std::size_t r = 0; r < csf.rows(); ++r) {
            cplx kv = eq_channel_doppler(double(csf.doppler_tap(r)), ki, cfg.N);
            for (std::size_t d = 0; d < csf.cols(); ++d)
                csf.at(r, d) += hdd * kv * eq_channel_delay(double(d), li, cfg.M) / mn;
        }
    }
    return csf;
}

}  // namespace

TEST_CASE("doppler kernel trivia and direct-sum oracle") {
    CHECK(std::abs(eq_channel_doppler(0.0, 0.0, 16) - cplx(16.0, 0.0)) < 1e-12);
    CHECK(std::abs(eq_channel_doppler(3.0, 0.0, 16)) < 1e-9);

    // k_i = 0.5, dk = 0, N = 16 against sum_n e^{j pi n / 16}.
    cplx direct = 0;
    for (int n = 0; n < 16; ++n) direct += std::polar(1.0, kPi * n / 16.0);
    CHECK(std::abs(eq_channel_doppler(0.0, 0.5, 16) - direct) < 1e-12);

    // Periodicity across the wrap.
    CHECK(std::abs(eq_channel_doppler(-8.0, 7.7, 16) - eq_channel_doppler(8.0, 7.7, 16)) < 1e-9);
}

TEST_CASE("delay kernel trivia and direct-sum oracle") {
    CHECK(std::abs(eq_channel_delay(0.0, 0.0, 16) - cplx(16.0, 0.0)) < 1e-12);
    CHECK(std::abs(eq_channel_delay(5.0, 2.0, 16)) < 1e-9);

    cplx direct = 0;
    for (int m = 0; m < 16; ++m) direct += std::polar(1.0, 2.0 * kPi * (1.0 - 0.2) * m / 16.0);
    CHECK(std::abs(eq_channel_delay(1.0, 0.2, 16) - direct) < 1e-12);
}

TEST_CASE("kernel energy satisfies the Parseval identity") {
    for (double ki : {0.0, 0.37, -3.2, 7.5}) {
        double acc = 0;
        for (int dk = 0; dk < 32; ++dk) acc += std::norm(eq_channel_doppler(double(dk), ki, 32));
        CHECK(std::abs(acc - 32.0 * 32.0) / (32.0 * 32.0) < 1e-9);
    }
    for (double li : {0.0, 0.5, 12.25}) {
        double acc = 0;
        for (int dl = 0; dl < 64; ++dl) acc += std::norm(eq_channel_delay(double(dl), li, 64));
        CHECK(std::abs(acc - 64.0 * 64.0) / (64.0 * 64.0) < 1e-9);
    }
}

TEST_CASE("surface peaks at the true offset with the DD gain") {
    auto cfg = small_cfg();
    const double mn = double(cfg.M) * cfg.N;

    SUBCASE("integer path in the interior") {
        auto csf = model_csf(cfg, {{0.7, 3.0, 5.0}});
        EstimatorConfig est;
        est.delay_step = 0.25;
        est.doppler_step = 0.25;
        auto surf = matched_filter_surface(csf, 3, 5, est);
        // Centre of the 5x5 grid is (0, 0).
        auto centre = surf.value_at(2, 2);
        cplx want = 0.7 * std::polar(1.0, -2.0 * kPi * 3.0 * 5.0 / mn);
        CHECK(std::abs(centre - want) < 1e-9);
        // |R| strictly decreases away from the centre along both axes.
        for (int step = 1; step <= 2; ++step) {
            CHECK(std::abs(surf.value_at(2, 2 + step)) < std::abs(surf.value_at(2, 2 + step - 1)));
            CHECK(std::abs(surf.value_at(2 + step, 2)) < std::abs(surf.value_at(2 + step - 1, 2)));
        }
    }

    SUBCASE("fractional Doppler argmax lands on the nearest grid point") {
        auto csf = model_csf(cfg, {{1.0, 4.3, 7.0}});
        EstimatorConfig est;
        est.delay_step = 0.1;
        est.doppler_step = 0.1;
        auto surf = matched_filter_surface(csf, 4, 7, est);
        std::size_t arg = 0;
        for (std::size_t i = 1; i < surf.correlation.size(); ++i)
            if (surf.correlation[i] > surf.correlation[arg]) arg = i;
        CHECK(surf.k_frac[arg / surf.l_frac.size()] == doctest::Approx(0.3));
        CHECK(surf.l_frac[arg % surf.l_frac.size()] == doctest::Approx(0.0));
    }

    SUBCASE("scaling the CSF scales the surface linearly") {
        auto csf = model_csf(cfg, {{0.5, 2.0, 4.0}});
        EstimatorConfig est;
        est.delay_step = 0.5;
        est.doppler_step = 0.5;
        auto a = matched_filter_surface(csf, 2, 4, est);
        for (auto& v : csf.data) v *= 3.0;
        auto b = matched_filter_surface(csf, 2, 4, est);
        for (std::size_t i = 0; i < a.values.size(); ++i)
            CHECK(std::abs(b.values[i] - 3.0 * a.values[i]) < 1e-9);
    }

    CHECK_THROWS(matched_filter_surface(model_csf(cfg, {{1.0, 0.0, 0.0}}), 0, 99,
                                        EstimatorConfig{}));
}

TEST_CASE("a single on-grid fractional path is recovered exactly") {
    auto cfg = small_cfg();
    EstimatorConfig est;
    est.delay_step = 0.1;
    est.doppler_step = 0.1;
    est.max_paths = 4;

    for (auto [g, ki, li] : std::vector<std::tuple<double, double, double>>{
             {1.0, 2.3, 5.0}, {0.6, -4.0, 7.4}, {0.9, 0.5, 0.0}, {0.4, -15.5, 14.9}}) {
        auto csf = model_csf(cfg, {{g, ki, li}});
        auto paths = estimate_paths(csf, est);
        REQUIRE(paths.size() >= 1);
        const auto& p = paths[0];
        double k_hat = p.doppler_hz / cfg.doppler_resolution_hz();
        double l_hat = p.delay_s / cfg.delay_resolution_s();
        CHECK(k_hat == doctest::Approx(ki).epsilon(1e-9));
        CHECK(l_hat == doctest::Approx(li).epsilon(1e-9));
        CHECK(p.gain == doctest::Approx(g).epsilon(1e-6));
        CHECK(p.phase_rad == doctest::Approx(-2.0 * kPi * p.doppler_hz * p.delay_s));
    }
}

TEST_CASE("single integer path: exactly one estimate with zero fractionals") {
    auto cfg = small_cfg();
    auto csf = model_csf(cfg, {{0.8, -3.0, 6.0}});
    EstimatorConfig est;
    est.delay_step = 0.1;
    est.doppler_step = 0.1;
    auto paths = estimate_paths(csf, est);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].k_int == -3);
    CHECK(paths[0].l_int == 6);
    CHECK(paths[0].k_frac == doctest::Approx(0.0));
    CHECK(paths[0].l_frac == doctest::Approx(0.0));
    CHECK(paths[0].gain == doctest::Approx(0.8).epsilon(1e-6));
}

TEST_CASE("interference cancellation strictly shrinks the residual") {
    auto cfg = small_cfg();
    auto csf = model_csf(cfg, {{1.0, 2.2, 4.0}, {0.5, -5.0, 9.6}, {0.25, 8.4, 12.0}});
    EstimatorConfig est;
    est.delay_step = 0.1;
    est.doppler_step = 0.1;
    est.max_paths = 3;

    // Re-run the loop manually to watch the residual energy.
    Csf resid = csf;
    double last = 0;
    for (auto& v : resid.data) last += std::norm(v);
    auto paths = estimate_paths(csf, est);
    REQUIRE(paths.size() == 3);
    for (const auto& p : paths) {
        const double mn = double(cfg.M) * cfg.N;
        double ki = p.doppler_hz / cfg.doppler_resolution_hz();
        double li = p.delay_s / cfg.delay_resolution_s();
        cplx amp = p.gain * std::polar(1.0, p.phase_rad);
        for (std::size_t r = 0; r < resid.rows(); ++r) {
            cplx kv = eq_channel_doppler(double(resid.doppler_tap(r)), ki, cfg.N) * amp / mn;
            for (std::size_t d = 0; d < resid.cols(); ++d)
                resid.at(r, d) -= kv * eq_channel_delay(double(d), li, cfg.M);
        }
        double now = 0;
        for (auto& v : resid.data) now += std::norm(v);
        CHECK(now < last);
        last = now;
    }

    // The three reported paths match the three injected ones.
    CHECK(paths[0].gain == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(paths[1].gain == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(paths[2].gain == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("scaling the CSF rescales gains but not locations") {
    auto cfg = small_cfg();
    auto csf = model_csf(cfg, {{1.0, 3.4, 6.0}, {0.4, -7.0, 11.2}});
    EstimatorConfig est;
    est.delay_step = 0.2;
    est.doppler_step = 0.2;
    est.max_paths = 2;
    auto a = estimate_paths(csf, est);
    for (auto& v : csf.data) v *= 5.0;
    auto b = estimate_paths(csf, est);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].k_int == b[i].k_int);
        CHECK(a[i].l_int == b[i].l_int);
        CHECK(a[i].k_frac == b[i].k_frac);
        CHECK(a[i].l_frac == b[i].l_frac);
        CHECK(b[i].gain == doctest::Approx(5.0 * a[i].gain).epsilon(1e-9));
    }
}

TEST_CASE("a +0.5 tie normalizes to -0.5 against the next cell") {
    auto cfg = small_cfg();
    auto csf = model_csf(cfg, {{1.0, 0.0, 4.5}});
    EstimatorConfig est;
    est.delay_step = 0.5;
    est.doppler_step = 0.5;
    auto paths = estimate_paths(csf, est);
    REQUIRE(!paths.empty());
    CHECK(paths[0].l_frac == doctest::Approx(-0.5));
    CHECK(paths[0].delay_s ==
          doctest::Approx(4.5 * cfg.delay_resolution_s()).epsilon(1e-12));
}

TEST_CASE("empty result when the first peak sits below a fixed threshold") {
    auto cfg = small_cfg();
    auto csf = model_csf(cfg, {{0.1, 2.0, 3.0}});
    EstimatorConfig est;
    est.power_threshold_linear = 1.0;
    CHECK(estimate_paths(csf, est).empty());
}

TEST_CASE("nmse bookkeeping") {
    auto cfg = small_cfg();
    const double dnu = cfg.doppler_resolution_hz();
    const double dtau = cfg.delay_resolution_s();

    PathSet truth;
    truth.paths.push_back({cplx(1.0, 0.0), 8.0 * dtau, 4.0 * dnu});

    SUBCASE("perfect estimate -> zeros") {
        PathEstimate e;
        e.gain = 1.0;
        e.doppler_hz = 4.0 * dnu;
        e.delay_s = 8.0 * dtau;
        auto rep = nmse({e}, truth, cfg);
        CHECK(rep.index_nmse == 0.0);
        CHECK(rep.amplitude_nmse == 0.0);
        CHECK(rep.matched == 1);
    }

    SUBCASE("index error (0.1, 0) at true (4, 8)") {
        PathEstimate e;
        e.gain = 1.0;
        e.doppler_hz = 4.1 * dnu;
        e.delay_s = 8.0 * dtau;
        auto rep = nmse({e}, truth, cfg);
        CHECK(rep.index_nmse == doctest::Approx(0.01 / 80.0).epsilon(1e-9));
    }

    SUBCASE("far estimates and spare truths are counted, not dropped") {
        PathEstimate e;
        e.gain = 1.0;
        e.doppler_hz = 20.0 * dnu;
        e.delay_s = 1.0 * dtau;
        auto rep = nmse({e}, truth, cfg);
        CHECK(rep.matched == 0);
        CHECK(rep.unmatched_estimates == 1);
        CHECK(rep.unmatched_truth == 1);
        CHECK(std::isinf(rep.index_nmse));
    }
}
