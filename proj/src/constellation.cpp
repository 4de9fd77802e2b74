// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#include "ncofdm/constellation.hpp"

#include <algorithm>
#include <cmath>

namespace ncofdm {

namespace {

unsigned gray_to_binary(unsigned g) {
    unsigned b = g;
    for (unsigned s = g >> 1; s != 0; s >>= 1) b ^= s;
    return b;
}

} // namespace

Modulation::Modulation(int order) : order_(order) {
    switch (order) {
    case 4: bits_ = 2; break;
    case 16: bits_ = 4; break;
    case 64: bits_ = 6; break;
    default: throw ConfigError("unsupported constellation order " + std::to_string(order) + " (valid: 4, 16, 64)");
    }
    const int half = bits_ / 2;
    side_ = 1 << half;
    // mean of (2i - (side-1))^2 over i, times two axes
    const double axis_energy = (static_cast<double>(side_) * side_ - 1.0) / 3.0;
    scale_ = 1.0 / std::sqrt(2.0 * axis_energy);

    label_of_level_.assign(static_cast<std::size_t>(side_), 0);
    for (unsigned g = 0; g < static_cast<unsigned>(side_); ++g) label_of_level_[gray_to_binary(g)] = g;

    points_.resize(static_cast<std::size_t>(order_));
    const unsigned mask = (1u << half) - 1u;
    for (unsigned label = 0; label < static_cast<unsigned>(order_); ++label) {
        const unsigned gi = label >> half;
        const unsigned gq = label & mask;
        const double i = 2.0 * gray_to_binary(gi) - (side_ - 1);
        const double q = 2.0 * gray_to_binary(gq) - (side_ - 1);
        points_[label] = cplx(i, q) * scale_;
    }
}

Modulation Modulation::from_name(const std::string& name) {
    if (name == "qpsk" || name == "4qam" || name == "4-qam") return Modulation(4);
    if (name == "16qam" || name == "16-qam") return Modulation(16);
    if (name == "64qam" || name == "64-qam") return Modulation(64);
    throw ConfigError("unknown modulation '" + name + "' (valid: qpsk, 16qam, 64qam)");
}

std::string Modulation::name() const {
    return order_ == 4 ? "qpsk" : std::to_string(order_) + "qam";
}

int Modulation::axis_level(double v) const noexcept {
    const double idx = std::round((v / scale_ + (side_ - 1)) / 2.0);
    return static_cast<int>(std::clamp(idx, 0.0, static_cast<double>(side_ - 1)));
}

unsigned Modulation::decide(cplx z) const noexcept {
    const int half = bits_ / 2;
    const unsigned gi = label_of_level_[static_cast<std::size_t>(axis_level(z.real()))];
    const unsigned gq = label_of_level_[static_cast<std::size_t>(axis_level(z.imag()))];
    return (gi << half) | gq;
}

SymbolGrid map_bits(std::span<const std::uint8_t> bits, const Modulation& mod, int K) {
    if (K <= 0) throw DimensionError("K must be positive");
    const std::size_t per_symbol = static_cast<std::size_t>(K) * static_cast<std::size_t>(mod.bits_per_symbol());
    if (bits.size() % per_symbol != 0)
        throw SizeError("bit count " + std::to_string(bits.size()) + " is not a multiple of K*bits_per_symbol = " +
                        std::to_string(per_symbol));
    SymbolGrid grid;
    grid.modulation = mod;
    grid.symbols.reserve(bits.size() / per_symbol);
    std::size_t pos = 0;
    while (pos < bits.size()) {
        CVec x(K);
        for (int r = 0; r < K; ++r) {
            unsigned label = 0;
            for (int b = 0; b < mod.bits_per_symbol(); ++b) label = (label << 1) | (bits[pos++] & 1u);
            x[r] = mod.point(label);
        }
        grid.symbols.push_back(std::move(x));
    }
    return grid;
}

std::vector<std::uint8_t> demap_bits(const SymbolGrid& grid) {
    const int bps = grid.modulation.bits_per_symbol();
    std::vector<std::uint8_t> out;
    for (const auto& x : grid.symbols) {
        for (Eigen::Index r = 0; r < x.size(); ++r) {
            const unsigned label = grid.modulation.decide(x[r]);
            for (int b = bps - 1; b >= 0; --b) out.push_back(static_cast<std::uint8_t>((label >> b) & 1u));
        }
    }
    return out;
}

} // namespace ncofdm
