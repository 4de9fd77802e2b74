// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "ncofdm/config.hpp"
#include "ncofdm/smoother.hpp"
#include "ncofdm/waveform.hpp"

namespace ncofdm {

/// Power spectral density on an ascending frequency axis.
///
/// `freqs` are in subcarrier spacings relative to the carrier. `linear` keeps
/// absolute scale (power per unit of the axis for Welch estimates) while
/// `psd_db` is referenced to the largest value.
struct PsdEstimate {
    std::vector<double> freqs;
    std::vector<double> linear;
    std::vector<double> psd_db;
    int seg_len = 0;
    int overlap = 0;
    int segments = 0;

    std::size_t size() const noexcept { return freqs.size(); }
    /// Recomputes psd_db from linear (0 dB at the peak).
    void normalize();
    /// Linear interpolation of psd_db at f (clamped to the axis).
    double db_at(double f) const;
};

/// Streaming form of the Welch estimator: samples can be pushed in pieces of
/// any size and the result equals the one-shot estimate over the
/// concatenation.
class WelchAccumulator {
public:
    /// Throws SizeError for seg_len < 2 or overlap outside [0, seg_len).
    WelchAccumulator(double samples_per_spacing, int seg_len = 2048, int overlap = 512);
    ~WelchAccumulator();
    WelchAccumulator(WelchAccumulator&&) noexcept;
    WelchAccumulator& operator=(WelchAccumulator&&) noexcept;

    void push(std::span<const cplx> samples);
    std::size_t segments() const noexcept { return segments_; }
    /// Throws SizeError when no complete segment has been seen.
    PsdEstimate result() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::size_t segments_ = 0;
};

/// Averaged periodogram with a Hanning window. `samples_per_spacing` is the
/// number of samples in one useful symbol (M), which fixes the Δf axis.
/// Throws SizeError when the input is shorter than one segment or the
/// overlap is not in [0, seg_len).
PsdEstimate welch_psd(std::span<const cplx> samples, double samples_per_spacing, int seg_len = 2048,
                      int overlap = 512);
PsdEstimate welch_psd(const SampleBlock& block, const OfdmConfig& cfg, int seg_len = 2048, int overlap = 512);

/// Blackman G_n(f) in sample units (T_samp = 1, derivatives with respect to
/// the sample index): the integral of the n-th derivative of g_h against
/// e^{j2pi f_r m / M} over the smooth-signal support, written as sinc and
/// cosine-resonance terms. Resonances |f_r| = rho*M and 2*rho*M use their
/// analytic limits.
cplx blackman_G(int order, double f_r, const OfdmConfig& cfg, int L);

struct AnalyticPsdOptions {
    /// 0: exact second-order expectation. > 0: Monte Carlo average over this
    /// many random symbol triples (zero-edged windows and plain OFDM only).
    int draws = 0;
    std::uint64_t seed = 1;
    Modulation modulation{16};
    /// Keep the correlation between consecutive symbols that share x_i. When
    /// false only the per-symbol energy terms are summed.
    bool cross_terms = true;
    /// Derivative order used to factor out (j2pi f)^-p; -1 picks
    /// min(N, edge smoothness of the window).
    int derivative_order = -1;
    /// Spectral images +-1..alias_terms of the sampled smoothed waveform that are
    /// added in. Plain OFDM uses the exact sampled-symbol transform instead.
    int alias_terms = 3;
};

/// Expected PSD of the smoothed stream (basis != nullptr) or of plain OFDM
/// (basis == nullptr) at the given frequencies (subcarrier spacings).
/// Normalized to peak. Throws ConfigError for a triangular window, which has
/// no closed-form spectrum here.
PsdEstimate analytic_psd(const OfdmConfig& cfg, const SmootherBasis* basis, const std::vector<double>& freqs,
                         const AnalyticPsdOptions& opts = {});

/// Least-squares slope (dB per decade of |f|) of the sidelobe envelope over
/// f_lo <= |f| <= f_hi. The envelope is the maximum of psd_db (both sides
/// folded) in each of `bins_per_decade` log-spaced sub-bands per decade.
/// Throws EstimationError with fewer than three envelope points.
double rolloff_slope(const PsdEstimate& psd, double f_lo, double f_hi, int bins_per_decade = 10);

/// CSV with header "freq_subcarriers,psd_db".
void write_psd_csv(std::ostream& os, const PsdEstimate& psd);

} // namespace ncofdm
