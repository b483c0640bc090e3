// SPDX-License-Identifier: Apache-2.0
//
// ddsound — delay-Doppler domain channel sounding toolkit.
//
//   capability   print the sounding capability of a frame configuration
//   generate     synthesize a sounding frame and write a DDIQ recording
//   sound        synchronize + extract the CSF + estimate paths from IQ
//   estimate     run the path estimator on a stored DDCF matrix
//   analyze      channel statistics from an estimates CSV
//   experiment   run a JSON-described experiment bundle

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddsound/analysis.hpp"
#include "ddsound/experiments.hpp"
#include "ddsound/io.hpp"
#include "ddsound/pn.hpp"
#include "ddsound/waveform.hpp"

namespace fs = std::filesystem;
using namespace ddsound;

namespace {

// One PN stream per user seed, shared by `generate` and `sound` so the
// sounder's sync replica matches a generated capture with the same seed.
std::vector<double> chips_for_seed(std::size_t count, std::uint64_t seed, bool seed_given) {
    if (!seed_given) return generate_pn(count);
    return generate_pn(count, kDefaultPnPolynomial,
                       std::uint32_t((seed * 0x9E3779B9u) & 0x7FFFFFFF) | 1u);
}

void write_error_record(const fs::path& dir, const std::string& what,
                        const std::vector<experiments::CheckResult>* checks = nullptr) {
    nlohmann::json err;
    err["error"] = what;
    if (checks) {
        for (const auto& c : *checks)
            if (!c.pass) err["failed_checks"].push_back({{"name", c.name}, {"detail", c.detail}});
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream os(dir / "error.json");
    os << err.dump(2) << '\n';
}

int run_checks_and_report(const experiments::Result& res, const fs::path& out_dir, bool check) {
    for (const auto& c : res.checks)
        std::printf("[%s] %s%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.detail.empty() ? "" : " — ", c.detail.c_str());
    if (check && !experiments::all_passed(res)) {
        write_error_record(out_dir, "acceptance checks failed", &res.checks);
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delay-Doppler domain channel sounder"};
    app.require_subcommand(1);

    std::size_t M = 2048, N = 256, l_tau = 0;
    double bandwidth = 100e6, amplitude = 1.0;
    std::string output_dir = "out";
    std::string input, output;
    std::uint64_t seed = 1;
    bool check = false;
    std::size_t frames = 1;
    EstimatorConfig est;
    double threshold_db = 0.0;
    bool have_threshold = false;

    auto add_frame_opts = [&](CLI::App* cmd) {
        cmd->add_option("--m", M, "delay taps (power of two)");
        cmd->add_option("--n", N, "Doppler taps (power of two)");
        cmd->add_option("--bandwidth", bandwidth, "bandwidth in Hz");
        cmd->add_option("--l-tau", l_tau, "measurable-delay tap span (default M/4)");
        cmd->add_option("--amplitude", amplitude, "PN symbol amplitude");
    };
    auto add_est_opts = [&](CLI::App* cmd) {
        cmd->add_option("--delay-step", est.delay_step, "fractional delay search step");
        cmd->add_option("--doppler-step", est.doppler_step, "fractional Doppler search step");
        cmd->add_option("--max-paths", est.max_paths, "extraction cap");
        cmd->add_option("--threshold-db", threshold_db, "fixed power threshold in dB")
            ->each([&](const std::string&) { have_threshold = true; });
    };

    auto* cap = app.add_subcommand("capability", "sounding capability of a frame configuration");
    add_frame_opts(cap);
    std::string cap_json;
    cap->add_option("--json", cap_json, "also write the metrics to this JSON file");

    auto* gen = app.add_subcommand("generate", "synthesize a sounding frame into a DDIQ file");
    add_frame_opts(gen);
    gen->add_option("--frames", frames, "number of concatenated frames");
    gen->add_option("--seed", seed, "LFSR seed for the PN filling");
    gen->add_option("--output", output, "output DDIQ path")->required();

    auto* snd = app.add_subcommand("sound", "synchronize, extract the CSF and estimate paths");
    add_frame_opts(snd);
    add_est_opts(snd);
    snd->add_option("--input", input, "DDIQ capture")->required();
    snd->add_option("--seed", seed, "PN seed of the transmitted frame");
    snd->add_option("--output-dir", output_dir, "result directory");
    snd->add_flag("--check", check, "fail on built-in sanity checks");

    auto* estc = app.add_subcommand("estimate", "path extraction from a DDCF matrix");
    add_est_opts(estc);
    estc->add_option("--input", input, "DDCF file")->required();
    estc->add_option("--output-dir", output_dir, "result directory");

    auto* ana = app.add_subcommand("analyze", "statistics from an estimates CSV");
    ana->add_option("--input", input, "estimates CSV")->required();
    ana->add_option("--output-dir", output_dir, "result directory");
    double delay_bin = 1.25e-9, doppler_bin = 1.9073486328125;
    ana->add_option("--delay-bin", delay_bin, "PDP bin width in seconds");
    ana->add_option("--doppler-bin", doppler_bin, "DPSD bin width in Hz");

    auto* exp = app.add_subcommand("experiment", "run a JSON experiment spec");
    std::string spec_path;
    exp->add_option("spec", spec_path, "experiment spec (JSON file or builtin kind name)")
        ->required();
    exp->add_option("--output-dir", output_dir, "result directory");
    exp->add_option("--seed", seed, "override the first seed");
    exp->add_flag("--check", check, "return nonzero unless every built-in assertion passes");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cap->parsed()) {
            auto cfg = l_tau ? make_frame_config(M, N, bandwidth, l_tau, amplitude)
                             : make_frame_config(M, N, bandwidth);
            auto c = capability_metrics(cfg);
            std::printf("frame length        %.6g ms\n", c.frame_length_s * 1e3);
            std::printf("delay resolution    %.6g ns\n", c.delay_resolution_s * 1e9);
            std::printf("Doppler resolution  %.6g Hz\n", c.doppler_resolution_hz);
            std::printf("max delay           %.6g us\n", c.max_delay_s * 1e6);
            std::printf("max Doppler         %.6g kHz\n", c.max_doppler_hz * 1e-3);
            std::printf("min SI              %.6g ms\n", c.min_si_s * 1e3);
            if (!cap_json.empty()) {
                nlohmann::json j = {{"frame_length_s", c.frame_length_s},
                                    {"delay_resolution_s", c.delay_resolution_s},
                                    {"doppler_resolution_hz", c.doppler_resolution_hz},
                                    {"max_delay_s", c.max_delay_s},
                                    {"max_doppler_hz", c.max_doppler_hz},
                                    {"min_si_s", c.min_si_s}};
                std::ofstream(cap_json) << j.dump(2) << '\n';
            }
            return 0;
        }

        if (gen->parsed()) {
            auto cfg = l_tau ? make_frame_config(M, N, bandwidth, l_tau, amplitude)
                             : make_frame_config(M, N, bandwidth);
            auto chips = chips_for_seed(pn_cells_required(cfg), seed, gen->count("--seed") > 0);
            IqBuffer frame = heisenberg_modulate(isfft(build_sounding_grid(cfg, chips)));
            io::write_iq(experiments::repeat_frames(frame, frames), output);
            std::printf("wrote %zu samples at %.6g MHz to %s\n", frame.size() * frames,
                        cfg.bandwidth_hz * 1e-6, output.c_str());
            return 0;
        }

        if (snd->parsed()) {
            experiments::Spec s = experiments::default_spec("sound");
            s.M = M;
            s.N = N;
            s.bandwidth_hz = bandwidth;
            s.l_tau = l_tau;
            s.pn_amplitude = amplitude;
            if (snd->count("--seed"))
                s.pn_seed = std::uint32_t((seed * 0x9E3779B9u) & 0x7FFFFFFF) | 1u;
            s.estimator = est;
            if (have_threshold)
                s.estimator.power_threshold_linear = std::pow(10.0, threshold_db / 10.0);
            s.input_iq = input;
            auto res = experiments::run(s, output_dir);
            std::printf("k_TO = %zu, dynamic range %.2f dB, results in %s\n",
                        std::size_t(res.metrics.at("k_to")), res.metrics.at("dynamic_range_db"),
                        output_dir.c_str());
            return run_checks_and_report(res, output_dir, check);
        }

        if (estc->parsed()) {
            Csf csf = io::read_csf(input);
            if (have_threshold) est.power_threshold_linear = std::pow(10.0, threshold_db / 10.0);
            auto estimates = estimate_paths(csf, est);
            fs::create_directories(output_dir);
            io::write_estimates_csv(estimates, fs::path(output_dir) / "estimates.csv");
            std::printf("extracted %zu paths -> %s/estimates.csv\n", estimates.size(),
                        output_dir.c_str());
            return 0;
        }

        if (ana->parsed()) {
            auto estimates = io::read_estimates_csv(input);
            fs::create_directories(output_dir);
            auto prof_d = pdp(estimates, delay_bin);
            auto prof_v = dpsd(estimates, doppler_bin);
            io::write_profile_csv(prof_d, fs::path(output_dir) / "pdp.csv");
            io::write_profile_csv(prof_v, fs::path(output_dir) / "dpsd.csv");
            std::vector<io::StatsRow> rows{
                {0, count_mpcs(estimates),
                 estimates.size() >= 2 ? k_factor_db(estimates)
                                       : std::numeric_limits<double>::infinity(),
                 rms_delay_spread_s(prof_d), rms_doppler_spread_hz(prof_v)}};
            io::write_stats_csv(rows, fs::path(output_dir) / "stats.csv");
            std::printf("%zu MPCs, K %.2f dB, RMS DS %.4g s, RMS DPS %.4g Hz\n", rows[0].n_mpcs,
                        rows[0].k_factor_db, rows[0].rms_delay_spread_s,
                        rows[0].rms_doppler_spread_hz);
            return 0;
        }

        if (exp->parsed()) {
            experiments::Spec s;
            if (fs::exists(spec_path)) {
                std::ifstream is(spec_path);
                std::stringstream ss;
                ss << is.rdbuf();
                s = experiments::parse_spec(ss.str());
            } else {
                s = experiments::default_spec(spec_path);
            }
            if (exp->count("--seed")) s.seeds[0] = seed;
            auto res = experiments::run(s, output_dir);
            return run_checks_and_report(res, output_dir, check);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        write_error_record(output_dir, e.what());
        return 1;
    }
    return 0;
}
