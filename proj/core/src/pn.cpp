// SPDX-License-Identifier: Apache-2.0
#include "ddsound/pn.hpp"

#include <bit>
#include <stdexcept>

namespace ddsound {

std::vector<double> generate_pn(std::size_t length, std::uint32_t polynomial, std::uint32_t seed) {
    if (polynomial < 2 || (polynomial & 1u) == 0)
        throw std::invalid_argument("pn: polynomial must have degree >= 1 and an x^0 term");
    int degree = 31 - std::countl_zero(polynomial);
    std::uint32_t mask = (degree == 32) ? ~0u : ((1u << degree) - 1u);
    std::uint32_t taps = polynomial & mask;  // feedback taps below x^degree
    std::uint32_t state = seed & mask;
    if (state == 0) throw std::invalid_argument("pn: seed must be nonzero");

    std::vector<double> out(length);
    for (std::size_t i = 0; i < length; ++i) {
        std::uint32_t bit = state & 1u;
        out[i] = bit ? -1.0 : 1.0;
        std::uint32_t fb = std::popcount(state & taps) & 1u;
        state = (state >> 1) | (fb << (degree - 1));
    }
    return out;
}

std::vector<double> generate_pn(std::size_t length) {
    return generate_pn(length, kDefaultPnPolynomial, 1u);
}

}  // namespace ddsound
