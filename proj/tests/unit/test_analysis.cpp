// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "ddsound/analysis.hpp"

using namespace ddsound;

namespace {

PathEstimate mk(double gain, double delay_s, double doppler_hz) {
    PathEstimate e;
    e.gain = gain;
    e.delay_s = delay_s;
    e.doppler_hz = doppler_hz;
    return e;
}

std::vector<PathEstimate> fig9_like() {
    return {mk(1.0, 0.0, 0.0), mk(std::pow(10.0, -0.25), 1.25e-6, -610.35),
            mk(std::pow(10.0, -0.5), 2.49e-6, 1251.22)};
}

}  // namespace

TEST_CASE("pdp and dpsd from impulses") {
    auto single = std::vector<PathEstimate>{mk(1.0, 0.0, 0.0)};
    auto prof = pdp(single, 1e-9);
    REQUIRE(prof.axis.size() == 1);
    CHECK(prof.axis[0] == 0.0);
    CHECK(prof.power[0] == doctest::Approx(1.0));

    auto d = dpsd(single, 1.0);
    REQUIRE(d.axis.size() == 1);
    CHECK(d.axis[0] == 0.0);

    auto three = fig9_like();
    auto dp = dpsd(three, 1.0);
    REQUIRE(dp.axis.size() == 3);
    CHECK(dp.axis[0] == doctest::Approx(-610.0));  // 1 Hz bins
    CHECK(dp.axis[1] == 0.0);
    CHECK(dp.axis[2] == doctest::Approx(1251.0));

    auto pd = pdp(three, 1e-9);
    REQUIRE(pd.axis.size() == 3);
    CHECK(pd.power[0] == doctest::Approx(1.0));
    CHECK(10.0 * std::log10(pd.power[1]) == doctest::Approx(-5.0));
    CHECK(10.0 * std::log10(pd.power[2]) == doctest::Approx(-10.0));

    CHECK_THROWS(pdp(std::vector<PathEstimate>{}, 1e-9));
}

TEST_CASE("profiles share the total power with the estimate set") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<PathEstimate> est;
        double total = 0;
        int n = 1 + int(rng() % 6);
        for (int i = 0; i < n; ++i) {
            double g = u(rng);
            est.push_back(mk(g, u(rng) * 1e-6, (u(rng) - 0.5) * 2000.0));
            total += g * g;
        }
        auto p = pdp(est, 1e-9);
        auto d = dpsd(est, 1.0);
        CHECK(p.total_power() == doctest::Approx(total).epsilon(1e-9));
        CHECK(d.total_power() == doctest::Approx(total).epsilon(1e-9));
    }
}

TEST_CASE("mpc count applies the strict 20 dB rule") {
    CHECK(count_mpcs(fig9_like()) == 3);
    CHECK(count_mpcs({mk(1.0, 0, 0)}) == 1);

    auto edge = std::vector<PathEstimate>{mk(1.0, 0, 0), mk(std::pow(10.0, -19.9 / 20.0), 1e-9, 0),
                                          mk(std::pow(10.0, -20.1 / 20.0), 2e-9, 0)};
    CHECK(count_mpcs(edge) == 2);
}

TEST_CASE("k-factor") {
    auto equal = std::vector<PathEstimate>{mk(1.0, 0, 0), mk(1.0, 1e-9, 0)};
    CHECK(k_factor_db(equal) == doctest::Approx(0.0));

    auto three = std::vector<PathEstimate>{mk(1.0, 0, 0), mk(std::sqrt(0.5), 1e-9, 0),
                                           mk(std::sqrt(0.5), 2e-9, 0)};
    CHECK(k_factor_db(three) == doctest::Approx(0.0));

    CHECK(k_factor_db(fig9_like()) ==
          doctest::Approx(10.0 * std::log10(1.0 / (std::pow(10.0, -0.5) + 0.1))).epsilon(1e-9));

    CHECK_THROWS(k_factor_db({mk(1.0, 0, 0)}));
}

TEST_CASE("rms spreads against direct moments") {
    PowerProfile single;
    single.kind = PowerProfile::Kind::delay;
    single.axis = {3e-6};
    single.power = {2.0};
    CHECK(rms_delay_spread_s(single) == doctest::Approx(0.0));

    PowerProfile two;
    two.kind = PowerProfile::Kind::delay;
    two.axis = {0.0, 1e-6};
    two.power = {1.0, 1.0};
    CHECK(rms_delay_spread_s(two) == doctest::Approx(0.5e-6));

    // Direct moment arithmetic for taps (0, 2, 4) us at (0, -5, -10) dB.
    PowerProfile taps;
    taps.kind = PowerProfile::Kind::delay;
    taps.axis = {0.0, 2e-6, 4e-6};
    taps.power = {1.0, std::pow(10.0, -0.5), 0.1};
    double tot = taps.power[0] + taps.power[1] + taps.power[2];
    double m1 = (2e-6 * taps.power[1] + 4e-6 * taps.power[2]) / tot;
    double m2 = (4e-12 * taps.power[1] + 16e-12 * taps.power[2]) / tot;
    CHECK(rms_delay_spread_s(taps) == doctest::Approx(std::sqrt(m2 - m1 * m1)).epsilon(1e-12));

    PowerProfile dop;
    dop.kind = PowerProfile::Kind::doppler;
    dop.axis = {-100.0, 100.0};
    dop.power = {1.0, 1.0};
    CHECK(rms_doppler_spread_hz(dop) == doctest::Approx(100.0));

    CHECK_THROWS(rms_delay_spread_s(dop));  // kind mismatch
    PowerProfile zero;
    zero.kind = PowerProfile::Kind::delay;
    zero.axis = {0.0};
    zero.power = {0.0};
    CHECK_THROWS(rms_delay_spread_s(zero));
}

TEST_CASE("shift invariance and scale equivariance") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<PathEstimate> est;
        int n = 2 + int(rng() % 5);
        for (int i = 0; i < n; ++i)
            est.push_back(mk(u(rng), u(rng) * 1e-6, (u(rng) - 0.5) * 2000.0));

        auto base_pdp = pdp(est, 1e-9);
        auto base_ds = rms_delay_spread_s(base_pdp);
        auto base_k = k_factor_db(est);
        auto base_n = count_mpcs(est);

        // Common delay offset leaves the spread unchanged.
        auto shifted = est;
        for (auto& e : shifted) e.delay_s += 5e-7;  // a whole number of 1 ns bins
        CHECK(rms_delay_spread_s(pdp(shifted, 1e-9)) == doctest::Approx(base_ds).epsilon(1e-9));

        // Common power scale changes nothing that is ratio-based.
        auto scaled = est;
        for (auto& e : scaled) e.gain *= 3.7;
        CHECK(count_mpcs(scaled) == base_n);
        CHECK(k_factor_db(scaled) == doctest::Approx(base_k).epsilon(1e-9));
        CHECK(rms_delay_spread_s(pdp(scaled, 1e-9)) == doctest::Approx(base_ds).epsilon(1e-9));

        auto base_dpsd = dpsd(est, 1.0);
        auto base_dps = rms_doppler_spread_hz(base_dpsd);
        auto dshift = est;
        for (auto& e : dshift) e.doppler_hz += 500.0;
        CHECK(rms_doppler_spread_hz(dpsd(dshift, 1.0)) == doctest::Approx(base_dps).epsilon(1e-9));
    }
}
