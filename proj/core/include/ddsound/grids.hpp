// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "ddsound/frame.hpp"

namespace ddsound {

using cplx = std::complex<double>;

/// N x M delay-Doppler grid, row k = Doppler tap, column l = delay tap.
struct DdGrid {
    FrameConfig cfg;
    std::vector<cplx> data;  // row-major, N rows of M columns

    DdGrid() = default;
    explicit DdGrid(const FrameConfig& c) : cfg(c), data(c.N * c.M, cplx(0.0, 0.0)) {}

    cplx& at(std::size_t k, std::size_t l) { return data[k * cfg.M + l]; }
    const cplx& at(std::size_t k, std::size_t l) const { return data[k * cfg.M + l]; }
};

/// N x M time-frequency grid, row n = time slot, column m = subcarrier.
struct TfGrid {
    FrameConfig cfg;
    std::vector<cplx> data;  // row-major, N rows of M columns

    TfGrid() = default;
    explicit TfGrid(const FrameConfig& c) : cfg(c), data(c.N * c.M, cplx(0.0, 0.0)) {}

    cplx& at(std::size_t n, std::size_t m) { return data[n * cfg.M + m]; }
    const cplx& at(std::size_t n, std::size_t m) const { return data[n * cfg.M + m]; }
};

/// Contiguous complex baseband samples at a fixed sample rate.
struct IqBuffer {
    std::vector<cplx> samples;
    double sample_rate_hz = 0.0;

    IqBuffer() = default;
    IqBuffer(std::vector<cplx> s, double rate) : samples(std::move(s)), sample_rate_hz(rate) {}

    std::size_t size() const { return samples.size(); }

    double energy() const {
        double e = 0.0;
        for (const auto& v : samples) e += std::norm(v);
        return e;
    }
    double mean_power() const { return samples.empty() ? 0.0 : energy() / double(samples.size()); }
};

}  // namespace ddsound
