// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#include "ncofdm/waveform.hpp"

#include <algorithm>
#include <cmath>

namespace ncofdm {

Modulator::Modulator(OfdmConfig cfg) : cfg_(std::move(cfg)), ifft_(cfg_.M(), Fft::Direction::Inverse) {}

void Modulator::modulate_into(const CVec& x, std::span<cplx> out) const {
    const int K = cfg_.K(), M = cfg_.M(), cp = cfg_.Mcp();
    if (x.size() != K) throw DimensionError("symbol length " + std::to_string(x.size()) + " != K = " + std::to_string(K));
    if (static_cast<int>(out.size()) != M + cp) throw DimensionError("output span must hold M + M_cp samples");
    Samples bins(static_cast<std::size_t>(M), cplx{});
    for (int r = 0; r < K; ++r) bins[static_cast<std::size_t>(cfg_.bin(r))] = x[r];
    std::span<cplx> useful = out.subspan(static_cast<std::size_t>(cp));
    ifft_.execute(bins, useful);
    const double scale = 1.0 / M;
    for (auto& v : useful) v *= scale;
    std::copy(useful.end() - cp, useful.end(), out.begin());
}

SampleBlock Modulator::modulate_symbol(const CVec& x) const {
    SampleBlock b;
    b.symbol_length = cfg_.symbol_length();
    b.symbol_count = 1;
    b.sample_rate = cfg_.sample_rate();
    b.samples.resize(static_cast<std::size_t>(b.symbol_length));
    modulate_into(x, b.samples);
    return b;
}

SampleBlock Modulator::modulate(const SymbolGrid& grid) const {
    SampleBlock b;
    b.symbol_length = cfg_.symbol_length();
    b.symbol_count = static_cast<int>(grid.size());
    b.sample_rate = cfg_.sample_rate();
    b.samples.resize(grid.size() * static_cast<std::size_t>(b.symbol_length));
    for (std::size_t i = 0; i < grid.size(); ++i) modulate_into(grid.symbols[i], b.slot(i));
    return b;
}

SampleBlock modulate_symbol(const CVec& x, const OfdmConfig& cfg) { return Modulator(cfg).modulate_symbol(x); }

SampleBlock assemble_frame(std::span<const SampleBlock> blocks) {
    SampleBlock out;
    if (blocks.empty()) return out;
    out.symbol_length = blocks.front().symbol_length;
    out.sample_rate = blocks.front().sample_rate;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        if (b.symbol_length != out.symbol_length || b.sample_rate != out.sample_rate)
            throw ConfigError("assemble_frame: blocks built with different configurations");
        if (b.has_tail && i + 1 != blocks.size()) throw ConfigError("assemble_frame: tail block must come last");
        out.samples.insert(out.samples.end(), b.samples.begin(), b.samples.end());
        out.symbol_count += b.symbol_count;
        out.has_tail = b.has_tail;
    }
    return out;
}

CMat derivative_matrix(int max_order, double m, PhaseRef phase_ref, const OfdmConfig& cfg) {
    if (max_order < 0) throw ParameterError("derivative order must be >= 0");
    const int K = cfg.K();
    const double M = cfg.M();
    CMat D(max_order + 1, K);
    for (int r = 0; r < K; ++r) {
        const double k = cfg.subcarrier(r);
        double arg = 2.0 * kPi * k * m / M;
        if (phase_ref == PhaseRef::Phi) arg += cfg.phi() * k;
        else if (phase_ref == PhaseRef::PhiConj) arg -= cfg.phi() * k;
        cplx v = std::polar(1.0 / M, arg);
        const cplx step = kJ * (2.0 * kPi * k / M);
        for (int n = 0; n <= max_order; ++n) {
            D(n, r) = v;
            v *= step;
        }
    }
    return D;
}

CVec eval_derivatives(const CVec& x, int max_order, double m, PhaseRef phase_ref, const OfdmConfig& cfg) {
    if (x.size() != cfg.K()) throw DimensionError("symbol length != K");
    return derivative_matrix(max_order, m, phase_ref, cfg) * x;
}

cplx eval_derivative(const CVec& x, int n, double m, PhaseRef phase_ref, const OfdmConfig& cfg) {
    if (n < 0) throw ParameterError("derivative order must be >= 0");
    return eval_derivatives(x, n, m, phase_ref, cfg)[n];
}

} // namespace ncofdm
