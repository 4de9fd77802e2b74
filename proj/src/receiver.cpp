// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#include "ncofdm/receiver.hpp"

#include <cmath>

#include "ncofdm/fft.hpp"

namespace ncofdm {

namespace {

void check_same_shape(const SymbolGrid& a, const SymbolGrid& b) {
    if (a.size() != b.size()) throw DimensionError("grids have different symbol counts");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.symbols[i].size() != b.symbols[i].size()) throw DimensionError("grids have different subcarrier counts");
}

} // namespace

SymbolGrid demodulate(const SampleBlock& block, const OfdmConfig& cfg, const Modulation& mod) {
    if (block.symbol_length != cfg.symbol_length())
        throw SizeError("block symbol length " + std::to_string(block.symbol_length) + " does not match M + M_cp = " +
                        std::to_string(cfg.symbol_length()));
    if (block.symbol_count < 0 || block.samples.size() < block.slots() * static_cast<std::size_t>(block.symbol_length))
        throw SizeError("truncated sample block");
    const Fft fft(cfg.M(), Fft::Direction::Forward);
    std::vector<cplx> out(static_cast<std::size_t>(cfg.M()));
    SymbolGrid grid;
    grid.modulation = mod;
    grid.symbols.reserve(static_cast<std::size_t>(block.symbol_count));
    for (int i = 0; i < block.symbol_count; ++i) {
        const auto slot = block.slot(static_cast<std::size_t>(i));
        fft.execute(slot.subspan(static_cast<std::size_t>(cfg.Mcp())), out);
        CVec x(cfg.K());
        for (int r = 0; r < cfg.K(); ++r) x[r] = out[static_cast<std::size_t>(cfg.bin(r))];
        grid.symbols.push_back(std::move(x));
    }
    return grid;
}

CVec channel_response(const PathRealization& h, const ChannelProfile& profile, const OfdmConfig& cfg) {
    if (h.gains.size() != profile.taps()) throw DimensionError("realization and profile tap counts differ");
    CVec H = CVec::Zero(cfg.K());
    for (int r = 0; r < cfg.K(); ++r)
        for (std::size_t l = 0; l < profile.taps(); ++l)
            H[r] += h.gains[l] *
                    std::exp(-kJ * (2.0 * kPi * cfg.subcarrier(r) * profile.delays_samples[l] / static_cast<double>(cfg.M())));
    return H;
}

SymbolGrid equalize_zf(const SymbolGrid& grid, const PathRealization& h, const ChannelProfile& profile,
                       const OfdmConfig& cfg, std::vector<bool>* erased) {
    const CVec H = channel_response(h, profile, cfg);
    if (erased) erased->assign(static_cast<std::size_t>(cfg.K()), false);
    CVec inv(cfg.K());
    for (int r = 0; r < cfg.K(); ++r) {
        const bool bad = std::abs(H[r]) < 1e-12;
        inv[r] = bad ? cplx{} : 1.0 / H[r];
        if (bad && erased) (*erased)[static_cast<std::size_t>(r)] = true;
    }
    SymbolGrid out;
    out.modulation = grid.modulation;
    out.symbols.reserve(grid.size());
    for (const CVec& y : grid.symbols) {
        if (y.size() != cfg.K()) throw DimensionError("symbol length != K");
        out.symbols.push_back(y.cwiseProduct(inv));
    }
    return out;
}

SymbolGrid slice_grid(const SymbolGrid& grid) {
    SymbolGrid out = grid;
    for (CVec& x : out.symbols)
        for (auto& v : x) v = grid.modulation.slice(v);
    return out;
}

SymbolGrid recover_iterative(const SymbolGrid& grid, const PrecoderMatrices& pm, int L_R, bool first_unprecoded) {
    if (L_R < 1) throw ParameterError("recovery needs L_R >= 1 iterations, got " + std::to_string(L_R));
    const Modulation& mod = grid.modulation;
    auto slice = [&](const CVec& v) {
        CVec d(v.size());
        for (Eigen::Index r = 0; r < v.size(); ++r) d[r] = mod.slice(v[r]);
        return d;
    };
    SymbolGrid out;
    out.modulation = mod;
    out.symbols.reserve(grid.size());
    CVec prev_tx = CVec::Zero(pm.phi_diag.size()); // re-precoded previous decision
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const CVec& y = grid.symbols[i];
        if (y.size() != pm.phi_diag.size()) throw DimensionError("symbol length does not match the precoder");
        if (i == 0 && first_unprecoded) {
            CVec d = slice(y);
            prev_tx = d;
            out.symbols.push_back(std::move(d));
            continue;
        }
        const CVec memory = pm.apply_P(pm.phi_diag.conjugate().cwiseProduct(prev_tx));
        const CVec z = y - memory;
        CVec x = z;
        CVec d;
        for (int it = 0; it < L_R; ++it) {
            d = slice(x);
            x = z + pm.apply_P(d);
        }
        d = slice(x);
        prev_tx = d - pm.apply_P(d) + memory;
        out.symbols.push_back(std::move(d));
    }
    return out;
}

RxReport measure(const SymbolGrid& tx, const SymbolGrid& rx) {
    check_same_shape(tx, rx);
    const auto tx_bits = demap_bits(tx);
    const auto rx_bits = demap_bits(rx);
    if (tx_bits.empty()) throw EstimationError("measure: no bits to compare");
    RxReport rep;
    rep.bits_compared = tx_bits.size();
    for (std::size_t b = 0; b < tx_bits.size(); ++b) rep.bit_errors += tx_bits[b] != rx_bits[b];
    rep.ber = static_cast<double>(rep.bit_errors) / static_cast<double>(rep.bits_compared);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        err += (rx.symbols[i] - tx.symbols[i]).squaredNorm();
        ref += tx.symbols[i].squaredNorm();
    }
    rep.evm = ref > 0.0 ? std::sqrt(err / ref) : 0.0;
    rep.sinr_est_db = rep.evm > 0.0 ? -20.0 * std::log10(rep.evm) : INFINITY;
    return rep;
}

void SinrAccumulator::add(const SymbolGrid& rx, const SymbolGrid& tx, const CVec& H, std::size_t first) {
    check_same_shape(rx, tx);
    for (std::size_t i = first; i < rx.size(); ++i) {
        const CVec s = H.cwiseProduct(tx.symbols[i]);
        signal += s.squaredNorm();
        error += (rx.symbols[i] - s).squaredNorm();
    }
}

double SinrAccumulator::sinr_db() const {
    if (!(error > 0.0)) throw EstimationError("SINR estimate needs nonzero error energy");
    return 10.0 * std::log10(signal / error);
}

} // namespace ncofdm
