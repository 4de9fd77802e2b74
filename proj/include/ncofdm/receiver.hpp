// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <vector>

#include "ncofdm/channel.hpp"
#include "ncofdm/constellation.hpp"
#include "ncofdm/precoder.hpp"
#include "ncofdm/waveform.hpp"

namespace ncofdm {

struct RxReport {
    double ber = 0.0;
    double evm = 0.0; // rms error over rms reference, linear
    double sinr_est_db = 0.0;
    std::size_t bits_compared = 0;
    std::size_t bit_errors = 0;
};

/// Drops the CP of every data symbol, applies the unnormalized size-M FFT and
/// keeps the occupied bins. A tail slot, if present, is ignored. Throws
/// SizeError when the block is shorter than its declared layout or does not
/// match cfg.
SymbolGrid demodulate(const SampleBlock& block, const OfdmConfig& cfg, const Modulation& mod = Modulation{16});

/// H(k_r) = sum_l h_l exp(-j2pi k_r d_l / M).
CVec channel_response(const PathRealization& h, const ChannelProfile& profile, const OfdmConfig& cfg);

/// One-tap zero-forcing equalizer with known channel. Bins with
/// |H| < 1e-12 are erased (set to 0) and marked in `erased` when given.
SymbolGrid equalize_zf(const SymbolGrid& grid, const PathRealization& h, const ChannelProfile& profile,
                       const OfdmConfig& cfg, std::vector<bool>* erased = nullptr);

/// Hard decisions (constellation points) for every entry of the grid.
SymbolGrid slice_grid(const SymbolGrid& grid);

/// Decision-feedback removal of the precoder distortion. Per symbol the
/// memory term P Phi^H xbar_{i-1} (rebuilt from earlier decisions) is
/// subtracted, then L_R passes of d = slice(x), x = z + P d restore the
/// component projected out by (I - P). With `first_unprecoded` the first
/// symbol is sliced directly (frequency-domain precoder convention); otherwise
/// it is treated as precoded against silence (time-domain full-span frames).
/// Returns the final decisions. Throws ParameterError for L_R < 1.
SymbolGrid recover_iterative(const SymbolGrid& grid, const PrecoderMatrices& pm, int L_R,
                             bool first_unprecoded = true);

/// BER from hard decisions on `rx`, EVM of `rx` against `tx`, and the SINR
/// estimate -20 log10(evm). Throws DimensionError on shape mismatch and
/// EstimationError when there are no bits.
RxReport measure(const SymbolGrid& tx, const SymbolGrid& rx);

/// Signal and error energies at the FFT output before equalization,
/// accumulated over frames so the SINR is a ratio of sums.
struct SinrAccumulator {
    double signal = 0.0;
    double error = 0.0;

    /// Adds symbols [first, end) of one frame: signal |H x|^2, error |Y - H x|^2.
    void add(const SymbolGrid& rx, const SymbolGrid& tx, const CVec& H, std::size_t first = 0);
    void merge(const SinrAccumulator& o) noexcept { signal += o.signal, error += o.error; }
    /// Throws EstimationError before any error energy was recorded.
    double sinr_db() const;
};

} // namespace ncofdm
