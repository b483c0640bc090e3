// SPDX-License-Identifier: Apache-2.0
#include "ddsound/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace ddsound::fft {

namespace {
// The FFTW planner is not thread-safe; execution of a built plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

void transform_many(std::complex<double>* data, std::size_t n, std::size_t howmany,
                    std::ptrdiff_t stride, std::ptrdiff_t dist, int sign) {
    if (n == 0 || howmany == 0) return;
    auto* p = reinterpret_cast<fftw_complex*>(data);
    int ni = static_cast<int>(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_many_dft(1, &ni, static_cast<int>(howmany), p, nullptr,
                                  static_cast<int>(stride), static_cast<int>(dist), p, nullptr,
                                  static_cast<int>(stride), static_cast<int>(dist),
                                  sign == kForward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fftw: failed to create plan");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
}

void transform(std::vector<std::complex<double>>& data, int sign) {
    transform_many(data.data(), data.size(), 1, 1, 0, sign);
}

}  // namespace ddsound::fft
