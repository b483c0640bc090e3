// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ddsound {

/// x^31 + x^9 + x^7 + x^6 + x^4 + x + 1, primitive; period 2^31 - 1. Restarted
/// per frame. Two properties matter beyond the usual correlation quality:
/// the period exceeds the largest grid (no chip reuse within a frame, and
/// distinct seeds give genuinely distinct fillings), and the dense feedback
/// keeps every window of the sequence balanced. Sparse trinomials emit a
/// long low-density stretch around the near-empty register states, which
/// shows up as a DC spike in grid columns.
inline constexpr std::uint32_t kDefaultPnPolynomial =
    (1u << 31) | (1u << 9) | (1u << 7) | (1u << 6) | (1u << 4) | (1u << 1) | 1u;

/// Maximal-length LFSR chips mapped {0 -> +1, 1 -> -1}.
///
/// `polynomial` holds the feedback taps with bit i = coefficient of x^i
/// (degree = highest set bit, bit 0 must be set). `seed` is the nonzero
/// initial register state. A Fibonacci register is stepped `length` times;
/// beyond one period the sequence repeats. Throws on a zero seed (the
/// register would stay all-zero) or a malformed polynomial.
std::vector<double> generate_pn(std::size_t length, std::uint32_t polynomial, std::uint32_t seed);

std::vector<double> generate_pn(std::size_t length);

}  // namespace ddsound
