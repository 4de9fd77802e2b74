// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#pragma once

#include <span>
#include <vector>

#include "ncofdm/config.hpp"
#include "ncofdm/constellation.hpp"
#include "ncofdm/fft.hpp"

namespace ncofdm {

/// Time-domain samples of one or more CP-inclusive OFDM symbols.
///
/// Sample 0 of each symbol slot corresponds to m = -M_cp. When `has_tail` is
/// set the final slot is a smoother termination block, not a data symbol, and
/// is not counted in `symbol_count`.
struct SampleBlock {
    Samples samples;
    int symbol_length = 0; // M_cp + M
    int symbol_count = 0;
    bool has_tail = false;
    double sample_rate = 0.0;

    std::size_t slots() const noexcept { return static_cast<std::size_t>(symbol_count + (has_tail ? 1 : 0)); }
    std::span<const cplx> slot(std::size_t i) const {
        return {samples.data() + i * static_cast<std::size_t>(symbol_length), static_cast<std::size_t>(symbol_length)};
    }
    std::span<cplx> slot(std::size_t i) {
        return {samples.data() + i * static_cast<std::size_t>(symbol_length), static_cast<std::size_t>(symbol_length)};
    }
};

/// IFFT-based OFDM modulator with the 1/M scaling convention:
/// y(m) = (1/M) sum_r x_r exp(j2pi k_r m / M), m in {-M_cp, ..., M-1}.
class Modulator {
public:
    explicit Modulator(OfdmConfig cfg);

    const OfdmConfig& config() const noexcept { return cfg_; }

    /// Writes M_cp + M samples (CP first) into `out`.
    void modulate_into(const CVec& x, std::span<cplx> out) const;
    SampleBlock modulate_symbol(const CVec& x) const;
    SampleBlock modulate(const SymbolGrid& grid) const;

private:
    OfdmConfig cfg_;
    Fft ifft_;
};

SampleBlock modulate_symbol(const CVec& x, const OfdmConfig& cfg);

/// Concatenates blocks in order. Blocks must agree on layout and sample rate
/// and none may carry a tail except the last.
SampleBlock assemble_frame(std::span<const SampleBlock> blocks);

/// Extra per-subcarrier phase applied before evaluation: none, e^{j phi k_r},
/// or its conjugate e^{-j phi k_r}.
enum class PhaseRef { None, Phi, PhiConj };

/// n-th derivative (with respect to the sample index) of the analytic OFDM
/// symbol built from x, evaluated at real-valued m:
/// (1/M)(j2pi/M)^n sum_r k_r^n x_r [e^{j phi k_r}] e^{j2pi k_r m/M}.
cplx eval_derivative(const CVec& x, int n, double m, PhaseRef phase_ref, const OfdmConfig& cfg);

/// Same quantity for all orders 0..max_order at once.
CVec eval_derivatives(const CVec& x, int max_order, double m, PhaseRef phase_ref, const OfdmConfig& cfg);

/// Matrix D with D(n, r) = (1/M)(j2pi k_r/M)^n [e^{j phi k_r}] e^{j2pi k_r m/M}, so D*x
/// gives derivatives 0..max_order of the symbol at m.
CMat derivative_matrix(int max_order, double m, PhaseRef phase_ref, const OfdmConfig& cfg);

} // namespace ncofdm
