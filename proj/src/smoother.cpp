// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#include "ncofdm/smoother.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace ncofdm {

namespace {

constexpr double kMaxPfCondition = 1e12;

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

} // namespace

WindowKind window_kind_from_name(const std::string& name) {
    if (name == "blackman") return WindowKind::Blackman;
    if (name == "hanning" || name == "hann") return WindowKind::Hanning;
    if (name == "triangular") return WindowKind::Triangular;
    if (name == "ones" || name == "all-ones") return WindowKind::AllOnes;
    throw ConfigError("unknown window '" + name + "' (valid: blackman, hanning, triangular, all-ones)");
}

std::string window_kind_name(WindowKind kind) {
    switch (kind) {
    case WindowKind::Blackman: return "blackman";
    case WindowKind::Hanning: return "hanning";
    case WindowKind::Triangular: return "triangular";
    case WindowKind::AllOnes: return "all-ones";
    }
    return "?";
}

HalfWindow::HalfWindow(WindowSpec spec) : spec_(spec) {
    if (spec_.L < 2) throw SizeError("window length L must be >= 2, got " + std::to_string(spec_.L));
    omega_ = kPi / (spec_.L - 1);
    // The right half of g(m') starts at the peak m' = L - 1, where the cosine
    // arguments are pi and 2pi; the shift flips the sign of odd harmonics.
    switch (spec_.kind) {
    case WindowKind::Blackman:
        c0_ = 0.42;
        cos_ = {0.5, 0.08};
        break;
    case WindowKind::Hanning:
        c0_ = 0.5;
        cos_ = {0.5};
        break;
    case WindowKind::Triangular:
    case WindowKind::AllOnes:
        c0_ = 1.0;
        break;
    }
}

int HalfWindow::edge_smoothness() const noexcept {
    switch (spec_.kind) {
    case WindowKind::Blackman:
    case WindowKind::Hanning: return 2;
    case WindowKind::Triangular: return 1;
    case WindowKind::AllOnes: return 0;
    }
    return 0;
}

double HalfWindow::derivative(int order, double u) const {
    if (order < 0) throw ParameterError("window derivative order must be >= 0");
    if (spec_.kind == WindowKind::Triangular) {
        if (order == 0) return 1.0 - u / (spec_.L - 1);
        return order == 1 ? -1.0 / (spec_.L - 1) : 0.0;
    }
    double v = order == 0 ? c0_ : 0.0;
    for (std::size_t j = 0; j < cos_.size(); ++j) {
        const double w = omega_ * static_cast<double>(j + 1);
        v += cos_[j] * std::pow(w, order) * std::cos(w * u + order * kPi / 2.0);
    }
    return v;
}

SampledWindow build_window(const WindowSpec& spec, int max_order) {
    const HalfWindow w(spec);
    SampledWindow s;
    s.values.resize(static_cast<std::size_t>(spec.L));
    s.derivatives.resize(max_order + 1, spec.L);
    for (int j = 0; j < spec.L; ++j) {
        for (int n = 0; n <= max_order; ++n) s.derivatives(n, j) = w.derivative(n, j);
        s.values[static_cast<std::size_t>(j)] = s.derivatives(0, j);
    }
    // exact zero at the edge rather than cos rounding residue
    if (w.zero_edged()) s.values.back() = 0.0, s.derivatives(0, spec.L - 1) = 0.0;
    return s;
}

double SmootherBasis::support_extent() const noexcept {
    return mode == SmoothingMode::FullSpan ? static_cast<double>(cfg.symbol_length()) : static_cast<double>(L() - 1);
}

CMat SmootherBasis::smooth_derivative_matrix(int max_order, double m) const {
    CMat W = CMat::Zero(max_order + 1, N + 1);
    const double u = m + cfg.Mcp();
    if (u < 0.0 || u > support_extent()) return W;
    // f^(s)(m) for s = 0..max_order + N
    const CMat D = derivative_matrix(max_order + N, m, phase_ref(), cfg);
    const CVec f = D.rowwise().sum();
    std::vector<double> g(static_cast<std::size_t>(max_order + 1));
    for (int i = 0; i <= max_order; ++i) g[static_cast<std::size_t>(i)] = half_window.derivative(i, u);
    for (int n = 0; n <= max_order; ++n)
        for (int v = 0; v <= N; ++v) {
            cplx acc{};
            for (int i = 0; i <= n; ++i) acc += binomial(n, i) * f[v + i] * g[static_cast<std::size_t>(n - i)];
            W(n, v) = acc;
        }
    return W;
}

CVec SmootherBasis::smooth_derivatives(const CVec& b, int max_order, double m) const {
    if (b.size() != N + 1) throw DimensionError("coefficient vector must have N + 1 entries");
    return smooth_derivative_matrix(max_order, m) * b;
}

namespace {

SmootherBasis build_basis_impl(const OfdmConfig& cfg, int N, const WindowSpec& spec, SmoothingMode mode,
                               BasisPhase phase) {
    if (N < 0) throw ParameterError("continuity order N must be >= 0");
    if (N + 1 > cfg.K()) throw RankError("N + 1 = " + std::to_string(N + 1) + " exceeds K = " + std::to_string(cfg.K()));
    if (spec.L < 2) throw SizeError("window length L must be >= 2, got " + std::to_string(spec.L));
    if (spec.L < N + 2) throw SizeError("window length L must be >= N + 2");
    if (spec.L > cfg.symbol_length()) throw SizeError("window length L exceeds M + M_cp");
    if ((mode == SmoothingMode::FullSpan) != (spec.kind == WindowKind::AllOnes))
        throw ConfigError("the all-ones window is reserved for full-span smoothing over M + M_cp samples");

    SmootherBasis bs{cfg, N, spec, mode, HalfWindow(spec), phase, {}, {}, {}, {}, {}, {}, {}};
    const int K = cfg.K(), L = spec.L;
    const double M = cfg.M();
    const double m0 = -cfg.Mcp();

    bs.Qf.resize(L, N + 1);
    for (int j = 0; j < L; ++j) {
        const double m = m0 + j;
        const CVec f = derivative_matrix(N, m, bs.phase_ref(), cfg).rowwise().sum();
        const double g = (bs.half_window.zero_edged() && j == L - 1) ? 0.0 : bs.half_window.value(j);
        for (int v = 0; v <= N; ++v) bs.Qf(j, v) = f[v] * g;
    }

    bs.Pf = bs.smooth_derivative_matrix(N, m0);
    // Scale order n by the coherent magnitude of an n-th derivative so that a
    // 1x1 near-zero Pf registers as singular too.
    Eigen::VectorXd scale(N + 1);
    for (int n = 0; n <= N; ++n) {
        double c = 0.0;
        for (int r = 0; r < K; ++r) c += std::pow(2.0 * kPi * std::abs(cfg.subcarrier(r)) / M, 2 * n);
        scale[n] = 1.0 / (c / M);
    }
    const CMat equilibrated = scale.cwiseSqrt().asDiagonal() * bs.Pf * scale.cwiseSqrt().asDiagonal();
    Eigen::JacobiSVD<CMat> svd(equilibrated);
    const auto& sv = svd.singularValues();
    bs.pf_condition = sv.minCoeff() > 0 ? std::max(sv.maxCoeff(), 1.0) / sv.minCoeff() : INFINITY;
    if (!(bs.pf_condition < kMaxPfCondition))
        throw ConditioningError("smoother boundary matrix Pf is singular for N = " + std::to_string(N) +
                                    ", L = " + std::to_string(L),
                                bs.pf_condition);
    bs.Pf_inv = bs.Pf.partialPivLu().inverse();

    bs.B2.resize(N + 1, K);
    for (int r = 0; r < K; ++r) {
        const cplx step = kJ * (2.0 * kPi * cfg.subcarrier(r) / M);
        cplx v = 1.0;
        for (int n = 0; n <= N; ++n, v *= step) bs.B2(n, r) = v;
    }
    bs.P1 = bs.B2 / M;
    bs.P2 = bs.B2 * cfg.phase_vector().asDiagonal() / M;
    bs.F_end = bs.smooth_derivative_matrix(N, cfg.M());
    return bs;
}

} // namespace

SmootherBasis build_basis(const OfdmConfig& cfg, int N, const WindowSpec& spec, BasisPhase phase) {
    const auto mode = spec.kind == WindowKind::AllOnes ? SmoothingMode::FullSpan : SmoothingMode::LowInterference;
    if (mode == SmoothingMode::FullSpan && spec.L != cfg.symbol_length())
        throw ConfigError("the all-ones window must span M + M_cp = " + std::to_string(cfg.symbol_length()) + " samples");
    return build_basis_impl(cfg, N, spec, mode, phase);
}

SmootherBasis build_full_span_basis(const OfdmConfig& cfg, int N, BasisPhase phase) {
    return build_basis_impl(cfg, N, WindowSpec{WindowKind::AllOnes, cfg.symbol_length()}, SmoothingMode::FullSpan,
                            phase);
}

CVec closed_form_target(const CVec& x_prev, const SmootherBasis& basis) {
    if (x_prev.size() != basis.cfg.K()) throw DimensionError("previous symbol length != K");
    return basis.P1 * x_prev;
}

CVec generalized_target(const CVec& x_prev, const CVec& b_prev, const SmootherBasis& basis) {
    if (b_prev.size() != basis.N + 1) throw DimensionError("previous coefficients must have N + 1 entries");
    return closed_form_target(x_prev, basis) + basis.F_end * b_prev;
}

CVec compute_coefficients(const CVec& target, const CVec& x, const SmootherBasis& basis) {
    if (target.size() != basis.N + 1) throw DimensionError("target must have N + 1 entries");
    if (x.size() != basis.cfg.K()) throw DimensionError("symbol length != K");
    return basis.Pf_inv * (target - basis.P2 * x);
}

SmoothingStream::SmoothingStream(const SmootherBasis& basis, TargetRule rule)
    : basis_(&basis),
      rule_(rule == TargetRule::Auto
                ? (basis.mode == SmoothingMode::FullSpan ? TargetRule::Generalized : TargetRule::ClosedForm)
                : rule),
      mod_(basis.cfg),
      x_prev_(CVec::Zero(basis.cfg.K())),
      b_prev_(CVec::Zero(basis.N + 1)) {}

void SmoothingStream::emit(const CVec* x, std::span<cplx> slot) {
    const SmootherBasis& bs = *basis_;
    if (slot.size() != static_cast<std::size_t>(bs.cfg.symbol_length()))
        throw SizeError("slot must hold M + M_cp samples");
    const CVec silence = x ? CVec() : CVec::Zero(bs.cfg.K());
    const CVec& cur = x ? *x : silence;
    if (cur.size() != bs.cfg.K()) throw DimensionError("symbol length != K");
    const CVec target =
        rule_ == TargetRule::Generalized ? generalized_target(x_prev_, b_prev_, bs) : closed_form_target(x_prev_, bs);
    CVec b = compute_coefficients(target, cur, bs);
    if (x)
        mod_.modulate_into(cur, slot);
    else
        std::fill(slot.begin(), slot.end(), cplx{});
    const CVec w = bs.Qf * b;
    for (int j = 0; j < bs.L(); ++j) slot[static_cast<std::size_t>(j)] += w[j];
    x_prev_ = cur;
    b_prev_ = std::move(b);
}

void SmoothingStream::push(const CVec& x, std::span<cplx> slot) { emit(&x, slot); }

void SmoothingStream::finish(std::span<cplx> slot) { emit(nullptr, slot); }

SmoothedFrame apply_smoothing(const SymbolGrid& frame, const SmootherBasis& basis, TargetRule rule) {
    if (frame.empty()) throw SizeError("apply_smoothing: empty frame");
    const OfdmConfig& cfg = basis.cfg;
    const std::size_t S = frame.size();

    SmoothedFrame out;
    out.block.symbol_length = cfg.symbol_length();
    out.block.symbol_count = static_cast<int>(S);
    out.block.has_tail = true;
    out.block.sample_rate = cfg.sample_rate();
    out.block.samples.assign((S + 1) * static_cast<std::size_t>(cfg.symbol_length()), cplx{});
    out.coefficients.reserve(S + 1);

    SmoothingStream stream(basis, rule);
    for (std::size_t i = 0; i < S; ++i) {
        stream.push(frame.symbols[i], out.block.slot(i));
        out.coefficients.push_back(stream.last_coefficients());
    }
    stream.finish(out.block.slot(S));
    out.coefficients.push_back(stream.last_coefficients());
    return out;
}

CVec smoothed_derivatives(const CVec& x, const CVec& b, int order, double m, const SmootherBasis& basis) {
    return eval_derivatives(x, order, m, PhaseRef::None, basis.cfg) + basis.smooth_derivatives(b, order, m);
}

std::vector<CVec> junction_residuals(const SymbolGrid& frame, const SmoothedFrame& smoothed,
                                     const SmootherBasis& basis, int order) {
    const std::size_t S = frame.size();
    if (smoothed.coefficients.size() != S + 1) throw DimensionError("smoothed frame does not match the data frame");
    const OfdmConfig& cfg = basis.cfg;
    const CVec silence = CVec::Zero(cfg.K());
    std::vector<CVec> out;
    out.reserve(S + 1);
    CVec prev_end = CVec::Zero(order + 1);
    for (std::size_t i = 0; i <= S; ++i) {
        const CVec& x = i < S ? frame.symbols[i] : silence;
        const CVec& b = smoothed.coefficients[i];
        out.push_back(smoothed_derivatives(x, b, order, -cfg.Mcp(), basis) - prev_end);
        prev_end = smoothed_derivatives(x, b, order, cfg.M(), basis);
    }
    return out;
}

} // namespace ncofdm
