// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ncofdm/types.hpp"

namespace ncofdm {

/// Gray-labeled square QAM with unit average energy (QPSK, 16-QAM, 64-QAM).
///
/// The first half of each label selects the in-phase level and the second half
/// the quadrature level; each axis uses the reflected binary Gray code so that
/// 00, 01, 11, 10 map to -3, -1, +1, +3 for 16-QAM.
class Modulation {
public:
    explicit Modulation(int order);
    static Modulation from_name(const std::string& name);

    int order() const noexcept { return order_; }
    int bits_per_symbol() const noexcept { return bits_; }
    std::string name() const;

    /// Constellation point for label `label` (MSB first).
    cplx point(unsigned label) const { return points_[label]; }
    const std::vector<cplx>& alphabet() const noexcept { return points_; }

    /// Nearest-point hard decision; returns the label.
    unsigned decide(cplx z) const noexcept;
    cplx slice(cplx z) const noexcept { return points_[decide(z)]; }

    bool operator==(const Modulation& o) const noexcept { return order_ == o.order_; }

private:
    int axis_level(double v) const noexcept;

    int order_;
    int bits_;
    int side_;     // levels per axis
    double scale_; // 1/sqrt(average energy of the integer grid)
    std::vector<cplx> points_;
    std::vector<unsigned> label_of_level_; // per-axis Gray label for level index
};

/// Frequency-domain data vectors, one length-K vector per OFDM symbol.
struct SymbolGrid {
    std::vector<CVec> symbols;
    Modulation modulation{16};

    std::size_t size() const noexcept { return symbols.size(); }
    bool empty() const noexcept { return symbols.empty(); }
};

/// Maps a bit sequence onto `K`-subcarrier symbols. Throws SizeError when the
/// bit count is not a multiple of K * bits_per_symbol.
SymbolGrid map_bits(std::span<const std::uint8_t> bits, const Modulation& mod, int K);

/// Hard-decision demapping of every point in the grid back to bits.
std::vector<std::uint8_t> demap_bits(const SymbolGrid& grid);

} // namespace ncofdm
