// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#pragma once

#include "ncofdm/config.hpp"
#include "ncofdm/constellation.hpp"

namespace ncofdm {

inline constexpr int kMaxContinuityOrder = 6;

/// Frequency-domain N-continuous precoder.
///
/// P = Phi^H A^H (A A^H)^{-1} A Phi is the orthogonal projector onto the
/// (N+1)-dimensional space whose symbols violate continuity; it is also kept in
/// factored form P = V V^H so it can be applied in O((N+1)K).
struct PrecoderMatrices {
    int N = 0;
    CMat A;        // (N+1) x K, A(n, r) = k_r^n
    CVec phi_diag; // diag(Phi)
    CMat P;        // K x K
    CMat V;        // K x (N+1), orthonormal columns spanning range(P)
    double gram_condition = 1.0;

    CVec apply_P(const CVec& v) const { return V * (V.adjoint() * v); }
};

/// Throws RankError when N + 1 > K, ParameterError when N is outside
/// [0, kMaxContinuityOrder], ConditioningError when the row-scaled Gram
/// matrix A A^H cannot be inverted reliably.
PrecoderMatrices build_precoder(const OfdmConfig& cfg, int N);

/// x'_0 = x_0; x'_i = (I - P) x_i + P Phi^H x'_{i-1}.
SymbolGrid precode_sequence(const SymbolGrid& grid, const PrecoderMatrices& pm);

/// residual[n] = y_next^(n)(-M_cp) - y_prev^(n)(M) for n = 0..N.
CVec continuity_residual(const CVec& prev, const CVec& next, int N, const OfdmConfig& cfg);

/// RMS n-th derivative of a symbol with unit-energy data,
/// sqrt(sum_r (2pi k_r/M)^(2n)) / M; the yardstick for relative mismatch.
double derivative_scale(const OfdmConfig& cfg, int n);

/// max_n |residual[n]| / derivative_scale(cfg, n).
double relative_mismatch(const CVec& residual, const OfdmConfig& cfg);

} // namespace ncofdm
