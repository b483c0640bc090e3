// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "ddsound/grids.hpp"

namespace ddsound {

/// Number of PN chips needed to fill every non-pilot, non-guard cell:
/// N * M - N * (2 * l_tau + 1).
std::size_t pn_cells_required(const FrameConfig& cfg);

/// Assembles the sounding grid: unit pilot at (k_p, l_p), zeros on the guard
/// columns [l_p - l_tau, l_p + l_tau], and +-A_PN chips elsewhere, filled
/// row-major over the non-guard region. Throws if `pn` is too short.
DdGrid build_sounding_grid(const FrameConfig& cfg, std::span<const double> pn);

/// Reference pattern with only the centre pilot (rest of the grid zero).
DdGrid single_pilot_grid(const FrameConfig& cfg);

/// Reference pattern with every cell carrying a PN chip (no pilot, no guard).
DdGrid full_pn_grid(const FrameConfig& cfg, std::span<const double> pn);

/// Inverse symplectic finite Fourier transform:
/// X[n,m] = (1/sqrt(NM)) sum_k sum_l x[k,l] e^{j2pi(nk/N - ml/M)}.
TfGrid isfft(const DdGrid& grid);

/// Forward SFFT, the exact inverse of isfft.
DdGrid sfft(const TfGrid& grid);

/// Heisenberg transform with a rectangular transmit pulse of duration T,
/// critically sampled: slot n emits the unnormalized M-point inverse DFT of
/// row n of X. Output is the M*N-sample frame at rate B.
IqBuffer heisenberg_modulate(const TfGrid& grid);

/// Matched Wigner transform: per-slot forward M-point DFT scaled by 1/M.
/// Uses the first M*N samples; throws if the buffer is shorter.
TfGrid wigner_demodulate(const IqBuffer& buf, const FrameConfig& cfg);

/// Transmit chain shorthand: pn -> grid -> ISFFT -> Heisenberg.
IqBuffer synthesize_frame(const FrameConfig& cfg);

/// Peak-to-average power ratio, 10*log10(max|s|^2 / mean|s|^2), on the
/// critically sampled buffer. Throws on an empty or all-zero buffer.
double papr_db(const IqBuffer& buf);

}  // namespace ddsound
