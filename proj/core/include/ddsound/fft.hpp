// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ddsound::fft {

inline constexpr int kForward = -1;
inline constexpr int kBackward = +1;

/// In-place batched 1-D DFT on strided data. Unnormalized in both directions:
/// forward multiplies by e^{-j2pi kt/n}, backward by e^{+j2pi kt/n}.
/// `howmany` transforms of length `n`, element stride `stride`, batch distance `dist`.
void transform_many(std::complex<double>* data, std::size_t n, std::size_t howmany,
                    std::ptrdiff_t stride, std::ptrdiff_t dist, int sign);

/// In-place unnormalized DFT of a whole buffer (any length, including primes).
void transform(std::vector<std::complex<double>>& data, int sign);

}  // namespace ddsound::fft
