// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ddsound/channel.hpp"
#include "ddsound/csf.hpp"
#include "ddsound/estimator.hpp"

namespace ddsound::experiments {

/// Experiment kinds understood by run().
///   papr_sweep          PAPR of the designed / single-pilot / full-PN patterns vs M
///   sync_gain_sweep     synchronization gain vs SNR and frame size, plus detection rate
///   dynamic_range_cfo   DD vs OFDM dynamic range under a CFO sweep
///   nmse_sweep          estimator NMSE vs SNR and search step
///   verify_rayleigh     Jakes-tap Rayleigh channel reproduction
///   verify_pure_doppler three-path pure-Doppler channel reproduction
///   sound               full pipeline on an IQ recording or a synthetic path set
struct Spec {
    std::string kind;

    std::size_t M = 2048;
    std::size_t N = 256;
    double bandwidth_hz = 100e6;
    std::size_t l_tau = 0;  ///< 0 selects the default M/4
    double pn_amplitude = 1.0;
    std::uint32_t pn_seed = 0;  ///< LFSR register seed; 0 selects the default stream

    PathSet paths;  ///< explicit channel, used when non-empty
    std::vector<double> tap_delays_s, tap_powers_db, tap_max_dopplers_hz;
    std::size_t n_sinusoids = 64;

    double snr_db = std::numeric_limits<double>::infinity();
    double cfo_hz = 0.0;
    EstimatorConfig estimator;

    std::vector<std::uint64_t> seeds = {1};
    std::size_t detection_trials = 100;

    std::vector<std::size_t> m_values;                       // papr_sweep
    std::vector<std::pair<std::size_t, std::size_t>> frame_sizes;  // sync_gain_sweep
    std::vector<double> snr_values_db;                       // sync/nmse sweeps
    std::vector<double> cfo_multiples;                       // dynamic_range_cfo
    std::vector<double> step_values;                         // nmse_sweep

    std::string input_iq;  ///< sound: read this DDIQ file instead of synthesizing
};

/// Parses the versioned JSON schema (see README). Unknown kinds throw.
Spec parse_spec(const std::string& json_text);

/// Canonical parameter sets per kind; these are what the built-in checks and
/// the acceptance suite run.
Spec default_spec(const std::string& kind);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Result {
    std::map<std::string, double> metrics;
    std::vector<CheckResult> checks;
    std::vector<std::string> outputs;  // file names written under the run directory
};

/// Runs the experiment, writing result CSVs plus manifest.json under
/// `out_dir` (created if missing). Deterministic for a fixed spec and seed
/// list, manifest wall time aside.
Result run(const Spec& spec, const std::filesystem::path& out_dir);

bool all_passed(const Result& result);

/// Synthetic end-to-end sounding: two concatenated frames through the
/// channel (+ optional CFO / AWGN), steady-state frame extracted on the true
/// second frame boundary. `tx_frame` must be one synthesized frame for `cfg`.
Csf sound_synthetic(const FrameConfig& cfg, const IqBuffer& tx_frame, const PathSet& paths,
                    double snr_db, double cfo_hz, std::uint64_t seed);

IqBuffer repeat_frames(const IqBuffer& frame, std::size_t count);

}  // namespace ddsound::experiments
