// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ddsound/analysis.hpp"
#include "ddsound/channel.hpp"
#include "ddsound/csf.hpp"
#include "ddsound/estimator.hpp"

namespace ddsound::io {

/// DDIQ recording: 32-byte little-endian header
///   "DDIQ" | version u32 | sample_rate f64 | sample_count u64 | 8 reserved bytes
/// followed by sample_count interleaved (I, Q) float32 pairs.
void write_iq(const IqBuffer& buf, const std::filesystem::path& path);
IqBuffer read_iq(const std::filesystem::path& path);

/// DDCF matrix: "DDCF" followed by N, columns, delay resolution and Doppler
/// resolution as little-endian f64, then row-major complex64 cells.
void write_csf(const Csf& csf, const std::filesystem::path& path);

/// Loads a DDCF file. The frame geometry is reconstructed from the header
/// (M from the resolutions, bandwidth from delta_tau); the noise floor is
/// re-estimated as the median cell power of the stored window, since the
/// guard band is not part of the file.
Csf read_csf(const std::filesystem::path& path);

void write_profile_csv(const PowerProfile& profile, const std::filesystem::path& path);
void write_estimates_csv(const std::vector<PathEstimate>& estimates,
                         const std::filesystem::path& path);
std::vector<PathEstimate> read_estimates_csv(const std::filesystem::path& path);
void write_csf_csv(const Csf& csf, const std::filesystem::path& path);

/// One channel-statistics row: frame index, MPC count, K-factor, RMS spreads.
struct StatsRow {
    std::size_t frame_index = 0;
    std::size_t n_mpcs = 0;
    double k_factor_db = 0.0;
    double rms_delay_spread_s = 0.0;
    double rms_doppler_spread_hz = 0.0;
};
void write_stats_csv(const std::vector<StatsRow>& rows, const std::filesystem::path& path);

/// JSON codecs for the experiment config schema.
std::string path_set_to_json(const PathSet& paths);
PathSet path_set_from_json(const std::string& text);
std::string frame_config_to_json(const FrameConfig& cfg);
FrameConfig frame_config_from_json(const std::string& text);

}  // namespace ddsound::io
