// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ddsound/pn.hpp"
#include "ddsound/sync.hpp"
#include "ddsound/waveform.hpp"

using namespace ddsound;

namespace {

constexpr double kPi = std::numbers::pi;

DdGrid random_dd(const FrameConfig& cfg, std::uint64_t seed) {
    DdGrid g(cfg);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : g.data) v = cplx(u(rng), u(rng));
    return g;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Term-by-term evaluation of the ISFFT double sum.
TfGrid isfft_direct(const DdGrid& g) {
    const auto& c = g.cfg;
    TfGrid out(c);
    double scale = 1.0 / std::sqrt(double(c.N) * c.M);
    for (std::size_t n = 0; n < c.N; ++n)
        for (std::size_t m = 0; m < c.M; ++m) {
            cplx acc = 0;
            for (std::size_t k = 0; k < c.N; ++k)
                for (std::size_t l = 0; l < c.M; ++l)
                    acc += g.at(k, l) * std::polar(1.0, 2.0 * kPi * (double(n * k) / c.N -
                                                                     double(m * l) / c.M));
            out.at(n, m) = acc * scale;
        }
    return out;
}

}  // namespace

TEST_CASE("sounding grid layout follows the pilot/guard/PN pattern") {
    auto cfg = make_frame_config(16, 16, 16e6, 4);  // guard columns [4, 12]
    REQUIRE(pn_cells_required(cfg) == 16 * 16 - 16 * 9);
    auto pn = generate_pn(pn_cells_required(cfg));
    auto grid = build_sounding_grid(cfg, pn);

    CHECK(grid.at(cfg.k_p, cfg.l_p) == cplx(1.0, 0.0));
    cplx guard_sum = 0;
    std::size_t pn_count = 0, zero_count = 0;
    for (std::size_t k = 0; k < cfg.N; ++k)
        for (std::size_t l = 0; l < cfg.M; ++l) {
            if (k == cfg.k_p && l == cfg.l_p) continue;
            if (l >= cfg.l_p - cfg.l_tau && l <= cfg.l_p + cfg.l_tau) {
                guard_sum += grid.at(k, l);
                ++zero_count;
                CHECK(grid.at(k, l) == cplx(0.0, 0.0));
            } else {
                CHECK(std::abs(std::abs(grid.at(k, l).real()) - cfg.pn_amplitude) < 1e-15);
                ++pn_count;
            }
        }
    CHECK(guard_sum == cplx(0.0, 0.0));
    CHECK(pn_count == pn_cells_required(cfg));
    CHECK(zero_count == 16 * 9 - 1);

    CHECK_THROWS(build_sounding_grid(cfg, std::span<const double>(pn.data(), 10)));
}

TEST_CASE("tiny 4x8 grid: pilot at (2,4), 12 PN cells") {
    FrameConfig cfg;
    cfg.M = 8;
    cfg.N = 4;
    cfg.bandwidth_hz = 8e6;
    cfg.delta_f_hz = 1e6;
    cfg.symbol_duration_s = 1e-6;
    cfg.l_tau = 2;
    cfg.k_p = 2;
    cfg.l_p = 4;
    REQUIRE(pn_cells_required(cfg) == 12);
    auto grid = build_sounding_grid(cfg, generate_pn(12));
    CHECK(grid.at(2, 4) == cplx(1.0, 0.0));
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t l = 2; l <= 6; ++l)
            if (!(k == 2 && l == 4)) CHECK(grid.at(k, l) == cplx(0.0, 0.0));
    std::size_t pn = 0;
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t l = 0; l < 8; ++l)
            if (std::abs(grid.at(k, l)) == 1.0 && !(k == 2 && l == 4)) ++pn;
    CHECK(pn == 12);
}

TEST_CASE("PN cell count matches the reference configuration") {
    auto cfg = make_frame_config(2048, 256, 100e6, 512);
    CHECK(pn_cells_required(cfg) == 261888);
}

TEST_CASE("isfft of zeros and of a corner impulse") {
    auto cfg = make_frame_config(16, 16, 16e6, 4);
    DdGrid zeros(cfg);
    auto Z = isfft(zeros);
    for (auto& v : Z.data) CHECK(std::abs(v) == 0.0);

    DdGrid impulse(cfg);
    impulse.at(0, 0) = 1.0;
    auto X = isfft(impulse);
    double want = 1.0 / std::sqrt(16.0 * 16.0);
    for (auto& v : X.data) {
        CHECK(v.real() == doctest::Approx(want).epsilon(1e-12));
        CHECK(std::abs(v.imag()) < 1e-12);
    }
}

TEST_CASE("isfft matches the brute-force double sum on a 16x8 grid") {
    // The transforms accept any geometry; only make_frame_config enforces the
    // sounding-frame minima.
    FrameConfig cfg;
    cfg.N = 16;
    cfg.M = 8;
    cfg.bandwidth_hz = 8e6;
    cfg.delta_f_hz = 1e6;
    cfg.symbol_duration_s = 1e-6;
    auto g = random_dd(cfg, 42);
    auto fast = isfft(g);
    auto slow = isfft_direct(g);
    double ref = 0;
    for (auto& v : slow.data) ref = std::max(ref, std::abs(v));
    CHECK(max_abs_diff(fast.data, slow.data) / ref < 1e-9);

    // And the conjugate-kernel inverse agrees with its own direct sum via the
    // round trip.
    auto back = sfft(fast);
    CHECK(max_abs_diff(back.data, g.data) < 1e-10);
}

TEST_CASE("sfft inverts isfft and resolves a constant grid to the corner") {
    auto cfg = make_frame_config(64, 64, 64e6, 16);
    auto g = random_dd(cfg, 7);
    auto back = sfft(isfft(g));
    CHECK(max_abs_diff(back.data, g.data) < 1e-10);

    TfGrid constant(cfg);
    for (auto& v : constant.data) v = 1.0 / std::sqrt(64.0 * 64.0);
    auto dd = sfft(constant);
    CHECK(std::abs(dd.at(0, 0) - cplx(1.0, 0.0)) < 1e-10);
    dd.at(0, 0) = 0;
    for (auto& v : dd.data) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("isfft conserves energy") {
    auto cfg = make_frame_config(32, 16, 32e6, 8);
    auto g = random_dd(cfg, 3);
    double ein = 0, eout = 0;
    for (auto& v : g.data) ein += std::norm(v);
    auto X = isfft(g);
    for (auto& v : X.data) eout += std::norm(v);
    CHECK(eout == doctest::Approx(ein).epsilon(1e-12));
}

TEST_CASE("heisenberg of zeros, of a DC row, and against direct evaluation") {
    auto cfg = make_frame_config(16, 16, 16e6, 4);
    TfGrid zeros(cfg);
    auto z = heisenberg_modulate(zeros);
    CHECK(z.size() == cfg.frame_samples());
    for (auto& v : z.samples) CHECK(std::abs(v) == 0.0);

    TfGrid dc(cfg);
    for (std::size_t n = 0; n < cfg.N; ++n) dc.at(n, 0) = 1.0;
    auto s = heisenberg_modulate(dc);
    for (auto& v : s.samples) CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-12);

    // Direct evaluation of the modulation sum at t = (nM + i)/B.
    auto cfg2 = make_frame_config(16, 16, 16e6, 4);
    auto X = random_dd(cfg2, 5);  // reuse as arbitrary TF content
    TfGrid tf(cfg2);
    tf.data = X.data;
    auto buf = heisenberg_modulate(tf);
    for (std::size_t n = 0; n < cfg2.N; ++n)
        for (std::size_t i = 0; i < cfg2.M; ++i) {
            cplx acc = 0;
            for (std::size_t m = 0; m < cfg2.M; ++m)
                acc += tf.at(n, m) * std::polar(1.0, 2.0 * kPi * double(m * i) / cfg2.M);
            CHECK(std::abs(acc - buf.samples[n * cfg2.M + i]) < 1e-10);
        }
}

TEST_CASE("wigner inverts heisenberg; a constant buffer demodulates to m = 0") {
    auto cfg = make_frame_config(64, 32, 64e6, 16);
    auto g = random_dd(cfg, 11);
    TfGrid tf(cfg);
    tf.data = g.data;
    auto back = wigner_demodulate(heisenberg_modulate(tf), cfg);
    CHECK(max_abs_diff(back.data, tf.data) < 1e-10);

    IqBuffer ones{std::vector<cplx>(cfg.frame_samples(), cplx(1.0, 0.0)), cfg.bandwidth_hz};
    auto dc = wigner_demodulate(ones, cfg);
    for (std::size_t n = 0; n < cfg.N; ++n)
        for (std::size_t m = 0; m < cfg.M; ++m) {
            if (m == 0)
                CHECK(std::abs(dc.at(n, m) - cplx(1.0, 0.0)) < 1e-12);
            else
                CHECK(std::abs(dc.at(n, m)) < 1e-12);
        }

    IqBuffer tooShort{std::vector<cplx>(10, cplx(0.0, 0.0)), cfg.bandwidth_hz};
    CHECK_THROWS(wigner_demodulate(tooShort, cfg));
}

TEST_CASE("full transmit chain round-trips through the receiver transforms") {
    auto cfg = make_frame_config(64, 32, 64e6, 16);
    auto pn = generate_pn(pn_cells_required(cfg));
    auto grid = build_sounding_grid(cfg, pn);
    auto tf = isfft(grid);
    auto rxtf = wigner_demodulate(heisenberg_modulate(tf), cfg);
    CHECK(max_abs_diff(rxtf.data, tf.data) < 1e-10);
    auto dd = sfft(rxtf);
    CHECK(max_abs_diff(dd.data, grid.data) < 1e-10);
}

TEST_CASE("papr basics") {
    IqBuffer cm{std::vector<cplx>(64, std::polar(2.0, 0.3)), 1.0};
    CHECK(papr_db(cm) == doctest::Approx(0.0));

    IqBuffer spike{std::vector<cplx>(128, cplx(0.0, 0.0)), 1.0};
    spike.samples[17] = cplx(0.0, 3.0);
    CHECK(papr_db(spike) == doctest::Approx(10.0 * std::log10(128.0)));

    IqBuffer zero{std::vector<cplx>(8, cplx(0.0, 0.0)), 1.0};
    CHECK_THROWS(papr_db(zero));
    CHECK_THROWS(papr_db(IqBuffer{}));
}

TEST_CASE("papr ordering single-pilot > designed > full-PN") {
    for (std::size_t M : {64u, 256u}) {
        auto cfg = make_frame_config(M, M / 2, 1e6 * M, M / 4);
        auto chips = generate_pn(cfg.M * cfg.N);
        double designed = papr_db(heisenberg_modulate(isfft(build_sounding_grid(cfg, chips))));
        double pilot = papr_db(heisenberg_modulate(isfft(single_pilot_grid(cfg))));
        double full = papr_db(heisenberg_modulate(isfft(full_pn_grid(cfg, chips))));
        CHECK(pilot > designed);
        CHECK(designed > full);
    }
}

TEST_CASE("sounding frame autocorrelation peaks at lag zero by over 10 dB") {
    auto cfg = make_frame_config(256, 64, 256e5, 64);
    IqBuffer frame = synthesize_frame(cfg);
    IqBuffer two;
    two.sample_rate_hz = frame.sample_rate_hz;
    two.samples = frame.samples;
    two.samples.insert(two.samples.end(), frame.samples.begin(), frame.samples.end());

    auto corr = sliding_correlation(two, frame, cfg.frame_samples());
    CHECK(find_frame_start(corr) == 0);
    double peak = corr.values[0], side = 0;
    for (std::size_t k = 1; k < corr.values.size(); ++k) side = std::max(side, corr.values[k]);
    CHECK(10.0 * std::log10(peak / side) > 10.0);
}
