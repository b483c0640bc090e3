// SPDX-License-Identifier: Apache-2.0
#include "ddsound/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ddsound::io {

namespace {

using nlohmann::json;

void put_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void get_bytes(std::istream& is, void* p, std::size_t n, const char* what) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (std::size_t(is.gcount()) != n)
        throw std::runtime_error(std::string("io: truncated ") + what);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void write_iq(const IqBuffer& buf, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("io: cannot open " + path.string() + " for writing");
    const char magic[4] = {'D', 'D', 'I', 'Q'};
    const std::uint32_t version = 1;
    const double rate = buf.sample_rate_hz;
    const std::uint64_t count = buf.size();
    const char reserved[8] = {};
    put_bytes(os, magic, 4);
    put_bytes(os, &version, 4);
    put_bytes(os, &rate, 8);
    put_bytes(os, &count, 8);
    put_bytes(os, reserved, 8);
    std::vector<float> inter(2 * buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        inter[2 * i] = float(buf.samples[i].real());
        inter[2 * i + 1] = float(buf.samples[i].imag());
    }
    put_bytes(os, inter.data(), inter.size() * sizeof(float));
    if (!os) throw std::runtime_error("io: short write to " + path.string());
}

IqBuffer read_iq(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("io: cannot open " + path.string());
    char magic[4];
    get_bytes(is, magic, 4, "DDIQ header");
    if (std::memcmp(magic, "DDIQ", 4) != 0)
        throw std::runtime_error("io: bad magic in " + path.string() + " (expected DDIQ)");
    std::uint32_t version = 0;
    double rate = 0.0;
    std::uint64_t count = 0;
    char reserved[8];
    get_bytes(is, &version, 4, "DDIQ header");
    get_bytes(is, &rate, 8, "DDIQ header");
    get_bytes(is, &count, 8, "DDIQ header");
    get_bytes(is, reserved, 8, "DDIQ header");
    if (version != 1) throw std::runtime_error("io: unsupported DDIQ version");
    if (!(rate > 0.0)) throw std::runtime_error("io: non-positive sample rate in DDIQ header");

    std::vector<float> inter(2 * count);
    if (count > 0) {
        is.read(reinterpret_cast<char*>(inter.data()),
                static_cast<std::streamsize>(inter.size() * sizeof(float)));
        std::size_t got = std::size_t(is.gcount()) / sizeof(float);
        if (got != inter.size())
            throw std::runtime_error("io: DDIQ payload holds " + std::to_string(got / 2) +
                                     " samples, header declares " + std::to_string(count));
    }
    IqBuffer buf;
    buf.sample_rate_hz = rate;
    buf.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        buf.samples[i] = cplx(inter[2 * i], inter[2 * i + 1]);
        if (!std::isfinite(inter[2 * i]) || !std::isfinite(inter[2 * i + 1]))
            throw std::runtime_error("io: non-finite sample in " + path.string());
    }
    return buf;
}

void write_csf(const Csf& csf, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("io: cannot open " + path.string() + " for writing");
    const char magic[4] = {'D', 'D', 'C', 'F'};
    const double header[4] = {double(csf.rows()), double(csf.cols()),
                              csf.cfg.delay_resolution_s(), csf.cfg.doppler_resolution_hz()};
    put_bytes(os, magic, 4);
    put_bytes(os, header, sizeof header);
    std::vector<float> inter(2 * csf.data.size());
    for (std::size_t i = 0; i < csf.data.size(); ++i) {
        inter[2 * i] = float(csf.data[i].real());
        inter[2 * i + 1] = float(csf.data[i].imag());
    }
    put_bytes(os, inter.data(), inter.size() * sizeof(float));
    if (!os) throw std::runtime_error("io: short write to " + path.string());
}

Csf read_csf(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("io: cannot open " + path.string());
    char magic[4];
    get_bytes(is, magic, 4, "DDCF header");
    if (std::memcmp(magic, "DDCF", 4) != 0)
        throw std::runtime_error("io: bad magic in " + path.string() + " (expected DDCF)");
    double header[4];
    get_bytes(is, header, sizeof header, "DDCF header");
    const auto N = std::size_t(header[0]);
    const auto cols = std::size_t(header[1]);
    const double dtau = header[2], dnu = header[3];
    if (N == 0 || cols == 0 || !(dtau > 0.0) || !(dnu > 0.0))
        throw std::runtime_error("io: malformed DDCF header");

    FrameConfig cfg;
    cfg.N = N;
    cfg.l_tau = cols - 1;
    cfg.bandwidth_hz = 1.0 / dtau;
    cfg.M = std::size_t(std::llround(cfg.bandwidth_hz / (dnu * double(N))));
    cfg.delta_f_hz = cfg.bandwidth_hz / double(cfg.M);
    cfg.symbol_duration_s = 1.0 / cfg.delta_f_hz;
    cfg.k_p = N / 2;
    cfg.l_p = cfg.M / 2;

    Csf csf(cfg);
    std::vector<float> inter(2 * csf.data.size());
    get_bytes(is, inter.data(), inter.size() * sizeof(float), "DDCF payload");
    std::vector<double> powers(csf.data.size());
    for (std::size_t i = 0; i < csf.data.size(); ++i) {
        csf.data[i] = cplx(inter[2 * i], inter[2 * i + 1]);
        powers[i] = std::norm(csf.data[i]);
    }
    auto mid = powers.begin() + powers.size() / 2;
    std::nth_element(powers.begin(), mid, powers.end());
    csf.noise_floor_estimate = *mid;
    return csf;
}

void write_profile_csv(const PowerProfile& profile, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("io: cannot open " + path.string() + " for writing");
    os << (profile.kind == PowerProfile::Kind::delay ? "delay_s" : "doppler_hz") << ",power_db\n";
    for (std::size_t i = 0; i < profile.axis.size(); ++i)
        os << fmt(profile.axis[i]) << ',' << fmt(10.0 * std::log10(std::max(profile.power[i], 1e-300)))
           << '\n';
}

void write_estimates_csv(const std::vector<PathEstimate>& estimates,
                         const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("io: cannot open " + path.string() + " for writing");
    os << "path_index,delay_s,doppler_hz,gain_db,phase_rad,k_I,l_I,k_F,l_F\n";
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const auto& e = estimates[i];
        os << i << ',' << fmt(e.delay_s) << ',' << fmt(e.doppler_hz) << ',' << fmt(e.power_db())
           << ',' << fmt(e.phase_rad) << ',' << e.k_int << ',' << e.l_int << ',' << fmt(e.k_frac)
           << ',' << fmt(e.l_frac) << '\n';
    }
}

std::vector<PathEstimate> read_estimates_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("io: cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("io: empty estimates file");
    std::vector<PathEstimate> out;
    while (std::getline(is, line)) {
        PathEstimate e;
        long idx = 0;
        double gain_db = 0.0;
        if (std::sscanf(line.c_str(), "%ld,%lf,%lf,%lf,%lf,%d,%d,%lf,%lf", &idx, &e.delay_s,
                        &e.doppler_hz, &gain_db, &e.phase_rad, &e.k_int, &e.l_int, &e.k_frac,
                        &e.l_frac) != 9)
            throw std::runtime_error("io: malformed estimates row: " + line);
        e.gain = std::pow(10.0, gain_db / 20.0);
        out.push_back(e);
    }
    return out;
}

void write_csf_csv(const Csf& csf, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("io: cannot open " + path.string() + " for writing");
    os << "doppler_hz,delay_s,power_db,phase_rad\n";
    for (std::size_t r = 0; r < csf.rows(); ++r)
        for (std::size_t d = 0; d < csf.cols(); ++d) {
            const cplx& v = csf.at(r, d);
            os << fmt(csf.doppler_hz(r)) << ',' << fmt(csf.delay_s(d)) << ','
               << fmt(10.0 * std::log10(std::max(std::norm(v), 1e-300))) << ','
               << fmt(std::arg(v)) << '\n';
        }
}

void write_stats_csv(const std::vector<StatsRow>& rows, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("io: cannot open " + path.string() + " for writing");
    os << "frame_index,n_mpcs,kf_db,rms_ds_s,rms_dps_hz\n";
    for (const auto& r : rows)
        os << r.frame_index << ',' << r.n_mpcs << ',' << fmt(r.k_factor_db) << ','
           << fmt(r.rms_delay_spread_s) << ',' << fmt(r.rms_doppler_spread_hz) << '\n';
}

std::string path_set_to_json(const PathSet& paths) {
    json arr = json::array();
    for (const auto& p : paths.paths) {
        arr.push_back({{"gain_db", 20.0 * std::log10(std::abs(p.gain))},
                       {"phase_rad", std::arg(p.gain)},
                       {"delay_s", p.delay_s},
                       {"doppler_hz", p.doppler_hz}});
    }
    return arr.dump(2);
}

PathSet path_set_from_json(const std::string& text) {
    json arr = json::parse(text);
    if (!arr.is_array()) throw std::runtime_error("io: path set JSON must be an array");
    PathSet set;
    for (const auto& item : arr) {
        Path p;
        double gain_db = item.at("gain_db").get<double>();
        double phase = item.value("phase_rad", 0.0);
        p.gain = std::polar(std::pow(10.0, gain_db / 20.0), phase);
        p.delay_s = item.at("delay_s").get<double>();
        p.doppler_hz = item.at("doppler_hz").get<double>();
        set.paths.push_back(p);
    }
    return set;
}

std::string frame_config_to_json(const FrameConfig& cfg) {
    json j = {{"M", cfg.M},
              {"N", cfg.N},
              {"bandwidth_hz", cfg.bandwidth_hz},
              {"l_tau", cfg.l_tau},
              {"pn_amplitude", cfg.pn_amplitude}};
    return j.dump(2);
}

FrameConfig frame_config_from_json(const std::string& text) {
    json j = json::parse(text);
    std::size_t M = j.at("M").get<std::size_t>();
    std::size_t N = j.at("N").get<std::size_t>();
    double B = j.at("bandwidth_hz").get<double>();
    std::size_t l_tau = j.value("l_tau", M / 4);
    double a = j.value("pn_amplitude", 1.0);
    return make_frame_config(M, N, B, l_tau, a);
}

}  // namespace ddsound::io
