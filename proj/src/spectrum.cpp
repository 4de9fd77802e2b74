// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#include "ncofdm/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ncofdm/fft.hpp"
#include "ncofdm/rng.hpp"

namespace ncofdm {

namespace {

double sinc_u(double x) { return std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

// Integral over u in [0, Tp] of d^n/du^n [c0 + sum_h alpha_h cos(h W u)] e^{jau},
// W = pi / Tp, times e^{-j a M_cp} (support starts at m = -M_cp).
//
// The harmonic terms share Q = ((-1)^h e^{jaTp} - 1) / (h^2 W^2 - a^2), which is
// rewritten around the nearer resonance a = +-hW so the removable singularity
// never appears as 0/0.
cplx window_G(int order, double a, double Mcp, double Tp, double c0, const std::vector<double>& alpha) {
    cplx acc{};
    if (order == 0) acc += c0 * Tp * sinc_u(a * Tp / 2.0) * std::exp(kJ * (a * Tp / 2.0));
    const double W = kPi / Tp;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double h = static_cast<double>(i + 1);
        const double hw = h * W;
        cplx Q;
        if (a >= 0.0) {
            const double d = a * Tp - h * kPi;
            Q = -kJ * Tp * std::exp(kJ * (d / 2.0)) * sinc_u(d / 2.0) / (hw + a);
        } else {
            const double d = a * Tp + h * kPi;
            Q = kJ * Tp * std::exp(kJ * (d / 2.0)) * sinc_u(d / 2.0) / (hw - a);
        }
        const double c = std::cos(order * kPi / 2.0), s = std::sin(order * kPi / 2.0);
        acc += alpha[i] * std::pow(hw, order) * Q * (c * kJ * a + s * hw);
    }
    return acc * std::exp(-kJ * (a * Mcp));
}

struct WindowSeries {
    double c0 = 1.0;
    std::vector<double> alpha;
    double Tp = 0.0;
};

WindowSeries window_series(const SmootherBasis& basis) {
    const HalfWindow& hw = basis.half_window;
    if (!hw.is_cosine_series())
        throw ConfigError("analytic PSD needs a cosine-series window (blackman, hanning or all-ones), got " +
                          window_kind_name(basis.window.kind));
    WindowSeries ws;
    ws.c0 = hw.constant_term();
    ws.alpha = hw.cosine_terms();
    ws.Tp = basis.support_extent();
    return ws;
}

} // namespace

void PsdEstimate::normalize() {
    const double peak = linear.empty() ? 0.0 : *std::max_element(linear.begin(), linear.end());
    psd_db.resize(linear.size());
    for (std::size_t i = 0; i < linear.size(); ++i)
        psd_db[i] = peak > 0.0 ? 10.0 * std::log10(std::max(linear[i] / peak, 1e-300)) : -3000.0;
}

double PsdEstimate::db_at(double f) const {
    if (freqs.empty()) throw EstimationError("empty PSD");
    if (f <= freqs.front()) return psd_db.front();
    if (f >= freqs.back()) return psd_db.back();
    const auto it = std::upper_bound(freqs.begin(), freqs.end(), f);
    const std::size_t i = static_cast<std::size_t>(it - freqs.begin());
    const double t = (f - freqs[i - 1]) / (freqs[i] - freqs[i - 1]);
    return psd_db[i - 1] + t * (psd_db[i] - psd_db[i - 1]);
}

struct WelchAccumulator::Impl {
    double spacing;
    std::size_t n, step;
    std::vector<double> w;
    double w2 = 0.0;
    Fft fft;
    std::vector<cplx> pending; // samples not yet consumed by a full segment
    std::vector<cplx> buf, spec;
    std::vector<double> acc;

    Impl(double sp, int seg_len, int overlap)
        : spacing(sp), n(static_cast<std::size_t>(seg_len)), step(n - static_cast<std::size_t>(overlap)), w(n),
          fft(seg_len, Fft::Direction::Forward), buf(n), spec(n), acc(n, 0.0) {
        // symmetric Hanning without zero end points
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i + 1) / static_cast<double>(n + 1)));
            w2 += w[i] * w[i];
        }
    }
};

WelchAccumulator::WelchAccumulator(double samples_per_spacing, int seg_len, int overlap) {
    if (seg_len < 2) throw SizeError("Welch segment length must be >= 2");
    if (overlap < 0 || overlap >= seg_len) throw SizeError("Welch overlap must be in [0, seg_len)");
    if (!(samples_per_spacing > 0.0)) throw ParameterError("samples per subcarrier spacing must be positive");
    impl_ = std::make_unique<Impl>(samples_per_spacing, seg_len, overlap);
}

WelchAccumulator::~WelchAccumulator() = default;
WelchAccumulator::WelchAccumulator(WelchAccumulator&&) noexcept = default;
WelchAccumulator& WelchAccumulator::operator=(WelchAccumulator&&) noexcept = default;

void WelchAccumulator::push(std::span<const cplx> samples) {
    Impl& s = *impl_;
    s.pending.insert(s.pending.end(), samples.begin(), samples.end());
    std::size_t start = 0;
    while (s.pending.size() - start >= s.n) {
        for (std::size_t i = 0; i < s.n; ++i) s.buf[i] = s.pending[start + i] * s.w[i];
        s.fft.execute(s.buf, s.spec);
        for (std::size_t i = 0; i < s.n; ++i) s.acc[i] += std::norm(s.spec[i]);
        ++segments_;
        start += s.step;
    }
    s.pending.erase(s.pending.begin(), s.pending.begin() + static_cast<std::ptrdiff_t>(start));
}

PsdEstimate WelchAccumulator::result() const {
    const Impl& s = *impl_;
    if (segments_ == 0) throw SizeError("Welch segment length " + std::to_string(s.n) + " exceeds input length");
    // Density per subcarrier spacing: the sample rate is `spacing` in these units.
    PsdEstimate out;
    out.seg_len = static_cast<int>(s.n);
    out.overlap = static_cast<int>(s.n - s.step);
    out.segments = static_cast<int>(segments_);
    out.freqs.resize(s.n);
    out.linear.resize(s.n);
    const double norm = static_cast<double>(segments_) * s.spacing * s.w2;
    for (std::size_t i = 0; i < s.n; ++i) {
        const std::size_t src = (i + s.n / 2) % s.n; // fftshift
        const double bin = static_cast<double>(i) - static_cast<double>(s.n / 2);
        out.freqs[i] = bin * s.spacing / static_cast<double>(s.n);
        out.linear[i] = s.acc[src] / norm;
    }
    out.normalize();
    return out;
}

PsdEstimate welch_psd(std::span<const cplx> x, double samples_per_spacing, int seg_len, int overlap) {
    WelchAccumulator acc(samples_per_spacing, seg_len, overlap);
    if (x.size() < static_cast<std::size_t>(seg_len))
        throw SizeError("Welch segment length " + std::to_string(seg_len) + " exceeds input length " +
                        std::to_string(x.size()));
    acc.push(x);
    return acc.result();
}

PsdEstimate welch_psd(const SampleBlock& block, const OfdmConfig& cfg, int seg_len, int overlap) {
    return welch_psd(std::span<const cplx>(block.samples), cfg.M(), seg_len, overlap);
}

cplx blackman_G(int order, double f_r, const OfdmConfig& cfg, int L) {
    if (order < 0) throw ParameterError("G order must be >= 0");
    if (L < 2) throw SizeError("window length L must be >= 2");
    const HalfWindow hw(WindowSpec{WindowKind::Blackman, L});
    return window_G(order, 2.0 * kPi * f_r / cfg.M(), cfg.Mcp(), L - 1, hw.constant_term(), hw.cosine_terms());
}

PsdEstimate analytic_psd(const OfdmConfig& cfg, const SmootherBasis* basis, const std::vector<double>& freqs,
                         const AnalyticPsdOptions& opts) {
    if (basis && !(basis->cfg == cfg)) throw ConfigError("analytic_psd: basis built for a different configuration");
    if (opts.draws < 0) throw ParameterError("analytic_psd: draws must be >= 0");
    if (opts.alias_terms < 0) throw ParameterError("analytic_psd: alias_terms must be >= 0");

    const int K = cfg.K();
    const double M = cfg.M(), Mcp = cfg.Mcp();
    const double T = cfg.symbol_length();
    const bool full_span = basis && basis->mode == SmoothingMode::FullSpan;
    if (full_span && (opts.draws > 0 || !opts.cross_terms))
        throw ConfigError("analytic_psd: full-span smoothing has unbounded symbol memory; only the exact "
                          "expectation with cross terms is available");

    const int N = basis ? basis->N : 0;
    WindowSeries ws;
    if (basis) ws = window_series(*basis);
    int p = 0;
    if (basis) p = full_span ? N : std::min(N, basis->half_window.edge_smoothness());
    if (opts.derivative_order >= 0) {
        if (opts.derivative_order > p)
            throw ParameterError("analytic_psd: derivative order exceeds the continuity of the stream");
        p = opts.derivative_order;
    }

    // b_i = Bz x_i-terms: Pf^-1 (z P1 - P2) for closed-form targets, with the
    // (I - z Pf^-1 F_end)^-1 memory factor in full-span mode.
    CMat A1, A2, Tm;
    if (basis) {
        A1 = basis->Pf_inv * basis->P1;
        A2 = basis->Pf_inv * basis->P2;
        Tm = basis->Pf_inv * basis->F_end;
    }
    std::vector<cplx> phase_k(static_cast<std::size_t>(K));
    for (int r = 0; r < K; ++r)
        phase_k[static_cast<std::size_t>(r)] =
            std::exp(kJ * ((basis && basis->phase == BasisPhase::Aligned ? -1.0 : 1.0) * cfg.phi() * cfg.subcarrier(r)));

    // Monte Carlo symbol triples, drawn once and reused at every frequency.
    std::vector<std::array<CVec, 3>> triples;
    if (opts.draws > 0) {
        const auto& alphabet = opts.modulation.alphabet();
        triples.resize(static_cast<std::size_t>(opts.draws));
        for (int d = 0; d < opts.draws; ++d) {
            Rng rng(derive_seed(opts.seed, {0x5053ULL, static_cast<std::uint64_t>(d)}));
            for (auto& x : triples[static_cast<std::size_t>(d)]) {
                x.resize(K);
                for (int r = 0; r < K; ++r) x[r] = alphabet[rng.below(static_cast<unsigned>(alphabet.size()))];
            }
        }
    }
    std::vector<std::array<CVec, 2>> coeffs(triples.size());
    if (basis)
        for (std::size_t d = 0; d < triples.size(); ++d) {
            const auto& t = triples[d];
            coeffs[d][0] = compute_coefficients(closed_form_target(t[0], *basis), t[1], *basis);
            coeffs[d][1] = compute_coefficients(closed_form_target(t[1], *basis), t[2], *basis);
        }

    // Per-symbol transform Y_i(nu) = D^T x_i + W^T b_i after factoring out
    // (j2pi nu)^p. The sampled stream's transform is the sum over spectral
    // images, which are coherent (same data), so D and W are summed as
    // amplitudes before any expectation is taken.
    CVec D(K), W(N + 1);
    // Plain OFDM jumps at every junction, so its images converge slowly; the
    // sampled symbol's transform is summed directly (Dirichlet kernel) instead.
    auto add_plain = [&](double nu) {
        for (int r = 0; r < K; ++r) {
            double th = std::remainder(2.0 * kPi * (cfg.subcarrier(r) / M - nu), 2.0 * kPi);
            const double den = std::sin(th / 2.0);
            const double mag = std::abs(den) < 1e-12 ? T : std::sin(T * th / 2.0) / den;
            D[r] = mag / M * std::exp(kJ * (th * (-Mcp + (T - 1.0) / 2.0)));
        }
    };
    auto add_image = [&](double nu) {
        const int pe = std::abs(nu) < 1e-9 ? 0 : p; // the stream transform does not depend on p
        const double F = nu * M;
        const cplx scale = pe == 0 ? cplx(1.0) : 1.0 / std::pow(cplx(0.0, 2.0 * kPi * nu), pe);
        for (int r = 0; r < K; ++r) {
            const double k = cfg.subcarrier(r);
            const double a = 2.0 * kPi * (k - F) / M;
            const cplx step(0.0, 2.0 * kPi * k / M);
            D[r] += scale * std::pow(step, pe) / M * (T * sinc_u(a * T / 2.0)) * std::exp(kJ * (a * (M - Mcp) / 2.0));
            if (!basis) continue;
            for (int i = 0; i <= pe; ++i) {
                const cplx G = window_G(pe - i, a, Mcp, ws.Tp, ws.c0, ws.alpha);
                if (G == cplx{}) continue;
                const cplx base = scale * binomial(pe, i) / M * phase_k[static_cast<std::size_t>(r)] * G;
                cplx pw = std::pow(step, i);
                for (int v = 0; v <= N; ++v, pw *= step) W[v] += base * pw;
            }
        }
    };

    // Density per unit of cycles/sample. z is the one-symbol delay factor; T is
    // an integer number of samples so it is the same for every image.
    auto density = [&](double nu) -> double {
        const cplx z = std::exp(-kJ * (2.0 * kPi * nu * T));
        if (opts.draws > 0) {
            double acc = 0.0;
            for (std::size_t d = 0; d < triples.size(); ++d) {
                const auto& t = triples[d];
                cplx y1 = (D.transpose() * t[1])(0);
                cplx y2 = (D.transpose() * t[2])(0);
                if (basis) {
                    y1 += (W.transpose() * coeffs[d][0])(0);
                    y2 += (W.transpose() * coeffs[d][1])(0);
                }
                acc += std::norm(y1);
                if (opts.cross_terms) acc += 2.0 * std::real(y1 * std::conj(y2) * std::conj(z));
            }
            return acc / static_cast<double>(triples.size()) / T;
        }
        if (!basis) return D.squaredNorm() / T;
        if (opts.cross_terms) {
            CMat Bz = z * A1 - A2;
            if (full_span) Bz = (CMat::Identity(N + 1, N + 1) - z * Tm).partialPivLu().solve(Bz);
            return (D + Bz.transpose() * W).squaredNorm() / T;
        }
        const CVec c = D - A2.transpose() * W;
        const CVec a = A1.transpose() * W;
        return (c.squaredNorm() + a.squaredNorm()) / T;
    };

    PsdEstimate out;
    out.freqs = freqs;
    out.linear.resize(freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        const double nu = freqs[i] / M;
        D.setZero();
        W.setZero();
        if (basis)
            for (int q = -opts.alias_terms; q <= opts.alias_terms; ++q) add_image(nu + q);
        else
            add_plain(nu);
        out.linear[i] = density(nu) / M; // per subcarrier spacing, same units as welch_psd
    }
    out.normalize();
    return out;
}

double rolloff_slope(const PsdEstimate& psd, double f_lo, double f_hi, int bins_per_decade) {
    if (!(f_lo > 0.0 && f_lo < f_hi)) throw EstimationError("rolloff_slope: need 0 < f_lo < f_hi");
    if (bins_per_decade < 1) throw EstimationError("rolloff_slope: bins_per_decade must be >= 1");
    const double l0 = std::log10(f_lo), l1 = std::log10(f_hi);
    const int nb = std::max(1, static_cast<int>(std::ceil((l1 - l0) * bins_per_decade - 1e-9)));
    const double width = (l1 - l0) / nb;
    std::vector<double> best(static_cast<std::size_t>(nb), -INFINITY);
    for (std::size_t i = 0; i < psd.size(); ++i) {
        const double f = std::abs(psd.freqs[i]);
        if (f < f_lo || f > f_hi) continue;
        const int b = std::min(nb - 1, static_cast<int>((std::log10(f) - l0) / width));
        best[static_cast<std::size_t>(b)] = std::max(best[static_cast<std::size_t>(b)], psd.psd_db[i]);
    }
    std::vector<double> xs, ys;
    for (int b = 0; b < nb; ++b)
        if (std::isfinite(best[static_cast<std::size_t>(b)])) {
            xs.push_back(l0 + (b + 0.5) * width);
            ys.push_back(best[static_cast<std::size_t>(b)]);
        }
    if (xs.size() < 3)
        throw EstimationError("rolloff_slope: only " + std::to_string(xs.size()) + " envelope points in range");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double den = n * sxx - sx * sx;
    if (den <= 0.0) throw EstimationError("rolloff_slope: degenerate frequency range");
    return (n * sxy - sx * sy) / den;
}

void write_psd_csv(std::ostream& os, const PsdEstimate& psd) {
    os << "freq_subcarriers,psd_db\n";
    char line[64];
    for (std::size_t i = 0; i < psd.size(); ++i) {
        std::snprintf(line, sizeof line, "%.6f,%.6f\n", psd.freqs[i], psd.psd_db[i]);
        os << line;
    }
}

} // namespace ncofdm
