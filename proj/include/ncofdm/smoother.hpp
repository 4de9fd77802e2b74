// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ncofdm/config.hpp"
#include "ncofdm/constellation.hpp"
#include "ncofdm/waveform.hpp"

namespace ncofdm {

enum class WindowKind { Blackman, Hanning, Triangular, AllOnes };

WindowKind window_kind_from_name(const std::string& name);
std::string window_kind_name(WindowKind kind);

struct WindowSpec {
    WindowKind kind = WindowKind::Blackman;
    int L = 144; // smooth-signal length in samples
};

/// Right (decaying) half g_h of a symmetric window, parameterised by the
/// offset u = m + M_cp from the start of the symbol.
///
/// Zero-edged kinds peak at u = 0 and reach zero at u = L - 1. The cosine
/// kinds are stored as c_0 + sum_j a_j cos(j w u) with w = pi / (L - 1),
/// which is what the closed-form spectra integrate against.
class HalfWindow {
public:
    explicit HalfWindow(WindowSpec spec);

    const WindowSpec& spec() const noexcept { return spec_; }
    int length() const noexcept { return spec_.L; }
    bool zero_edged() const noexcept { return spec_.kind != WindowKind::AllOnes; }
    /// Number of leading derivatives (starting with the value) that vanish at
    /// the trailing edge. The smooth signal is C^(n-1) where it meets zero.
    int edge_smoothness() const noexcept;

    /// Analytic derivative of the given order at real offset u (one-sided
    /// at the corners of the triangular kind).
    double derivative(int order, double u) const;
    double value(double u) const { return derivative(0, u); }

    /// Cosine-series form; empty for non-cosine kinds.
    bool is_cosine_series() const noexcept { return spec_.kind != WindowKind::Triangular; }
    double constant_term() const noexcept { return c0_; }
    const std::vector<double>& cosine_terms() const noexcept { return cos_; }
    double base_frequency() const noexcept { return omega_; }

private:
    WindowSpec spec_;
    double c0_ = 1.0;
    std::vector<double> cos_;
    double omega_ = 0.0;
};

/// Sampled g_h and its derivatives up to `max_order` (rows = order, cols = sample).
struct SampledWindow {
    std::vector<double> values;
    Eigen::MatrixXd derivatives;
};

/// Throws SizeError when L < 2.
SampledWindow build_window(const WindowSpec& spec, int max_order);

enum class SmoothingMode { LowInterference, FullSpan };

/// Per-subcarrier phase carried by the basis signals f^(v).
/// Forward: e^{+j phi k_r}. Aligned: e^{-j phi k_r}, which makes every
/// subcarrier start in phase at m = -M_cp and spans the same space as the
/// frequency-domain precoder.
enum class BasisPhase { Forward, Aligned };

/// Precomputed matrices for time-domain N-continuous smoothing.
///
/// Basis signals are f~_v(m) = f^(v)(m) g_h(m + M_cp) on the support, with
/// f^(v)(m) = (1/M)(j2pi/M)^v sum_r k_r^v e^{+-j phi k_r} e^{j2pi k_r m/M}, sign set by `phase`.
/// Pf(n, v) is the n-th derivative of f~_v at m = -M_cp (Leibniz rule), so
/// b = Pf^{-1} (target - P2 x) makes the smooth signal cancel the junction
/// mismatch in all orders 0..N.
struct SmootherBasis {
    OfdmConfig cfg;
    int N = 0;
    WindowSpec window;
    SmoothingMode mode = SmoothingMode::LowInterference;
    HalfWindow half_window{WindowSpec{}};
    BasisPhase phase = BasisPhase::Aligned;

    CMat Qf;     // L x (N+1)
    CMat Pf;     // (N+1) x (N+1)
    CMat Pf_inv;
    CMat P1;     // (N+1) x K, (1/M) B2
    CMat P2;     // (N+1) x K, (1/M) B2 Phi
    CMat B2;     // (N+1) x K, (j2pi k_r / M)^n
    CMat F_end;  // (N+1) x (N+1): derivatives of f~_v at m = M (zero unless full span)
    double pf_condition = 1.0; // after symmetric scaling by typical derivative magnitudes

    int L() const noexcept { return window.L; }
    PhaseRef phase_ref() const noexcept { return phase == BasisPhase::Forward ? PhaseRef::Phi : PhaseRef::PhiConj; }
    /// Continuous support length in samples: L - 1 for zero-edged windows,
    /// M + M_cp for the full-span window.
    double support_extent() const noexcept;

    /// Derivatives 0..max_order of sum_v b_v f~_v(m) at real m.
    CVec smooth_derivatives(const CVec& b, int max_order, double m) const;
    /// Matrix form of smooth_derivatives: W(n, v) = d^n f~_v / dm^n at m.
    CMat smooth_derivative_matrix(int max_order, double m) const;
};

/// Throws SizeError / ConfigError for invalid windows, RankError when
/// N + 1 > K, ConditioningError when Pf is numerically singular.
SmootherBasis build_basis(const OfdmConfig& cfg, int N, const WindowSpec& spec,
                          BasisPhase phase = BasisPhase::Aligned);
/// All-ones window spanning the whole CP-inclusive symbol. The Forward phase
/// makes the generalized-target recursion diverge, so Aligned is the default.
SmootherBasis build_full_span_basis(const OfdmConfig& cfg, int N, BasisPhase phase = BasisPhase::Aligned);

/// Closed-form target [y_prev(M); P1 x_prev] (previous symbol un-perturbed at its end).
CVec closed_form_target(const CVec& x_prev, const SmootherBasis& basis);
/// Target from the previous transmitted symbol including its own smooth signal.
CVec generalized_target(const CVec& x_prev, const CVec& b_prev, const SmootherBasis& basis);

/// b = Pf^{-1} (target - P2 x).
CVec compute_coefficients(const CVec& target, const CVec& x, const SmootherBasis& basis);

enum class TargetRule { Auto, ClosedForm, Generalized };

struct SmoothedFrame {
    SampleBlock block;            // data symbols followed by one tail slot
    std::vector<CVec> coefficients; // b_0 .. b_S (last one builds the tail)
};

/// Symbol-by-symbol smoother that keeps (x_{i-1}, b_{i-1}) between calls, so
/// arbitrarily long streams can be generated in pieces. The stream starts
/// from silence.
class SmoothingStream {
public:
    explicit SmoothingStream(const SmootherBasis& basis, TargetRule rule = TargetRule::Auto);

    /// Writes one smoothed symbol (M_cp + M samples) into `slot`.
    void push(const CVec& x, std::span<cplx> slot);
    /// Writes the termination block that returns the stream to silence.
    void finish(std::span<cplx> slot);
    const CVec& last_coefficients() const noexcept { return b_prev_; }

private:
    void emit(const CVec* x, std::span<cplx> slot);

    const SmootherBasis* basis_;
    TargetRule rule_;
    Modulator mod_;
    CVec x_prev_;
    CVec b_prev_;
};

/// Adds the smooth signal to every symbol of the frame and appends the tail
/// block that returns the stream to silence. The first symbol is smoothed
/// against silence. `Auto` uses the closed form for zero-edged windows and the
/// generalized target for the full-span window.
SmoothedFrame apply_smoothing(const SymbolGrid& frame, const SmootherBasis& basis, TargetRule rule = TargetRule::Auto);

/// Derivatives 0..order of data symbol x plus its smooth signal at m.
CVec smoothed_derivatives(const CVec& x, const CVec& b, int order, double m, const SmootherBasis& basis);

/// Junction residuals of a smoothed frame, entry i = (slot i at -M_cp) minus
/// (slot i-1 at M) for derivatives 0..order. Entry 0 is the junction with the
/// preceding silence and entry S the junction into the tail slot.
std::vector<CVec> junction_residuals(const SymbolGrid& frame, const SmoothedFrame& smoothed,
                                     const SmootherBasis& basis, int order);

} // namespace ncofdm
