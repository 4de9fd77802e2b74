// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncofdm/config.hpp"
#include "ncofdm/rng.hpp"
#include "ncofdm/waveform.hpp"

namespace ncofdm {

/// Tapped-delay-line power-delay profile quantized to the sample grid of a
/// configuration. Linear powers are normalized to unit sum.
struct ChannelProfile {
    std::vector<double> delays_ns;
    std::vector<double> powers_db;
    std::vector<double> powers;       // linear, sum = 1
    std::vector<int> delays_samples;  // round(tau / T_samp)

    std::size_t taps() const noexcept { return delays_ns.size(); }
    int max_delay() const noexcept { return delays_samples.empty() ? 0 : delays_samples.back(); }
    /// Delays reaching past the cyclic prefix put the link in the ISI regime.
    bool exceeds_cp(const OfdmConfig& cfg) const noexcept { return max_delay() >= cfg.Mcp(); }
};

/// Validates (non-empty, equal lengths, first delay 0, nondecreasing, finite)
/// and quantizes. Throws ConfigError.
ChannelProfile make_profile(std::vector<double> delays_ns, std::vector<double> powers_db, const OfdmConfig& cfg);

/// 9-tap Extended Vehicular A profile.
ChannelProfile eva_profile(const OfdmConfig& cfg);
/// One tap, zero delay.
ChannelProfile single_path_profile(const OfdmConfig& cfg);
/// JSON object with arrays "delays_ns" and "powers_db". Throws ConfigError.
ChannelProfile load_profile(const std::string& path, const OfdmConfig& cfg);

/// Complex tap gains for one frame (block fading).
struct PathRealization {
    std::vector<cplx> gains;
    std::uint64_t seed = 0;
};

/// Independent Rayleigh taps h_l ~ CN(0, powers[l]).
PathRealization draw_realization(const ChannelProfile& profile, std::uint64_t seed);
/// All taps with gain sqrt(power) (deterministic, used for unfaded checks).
PathRealization unit_realization(const ChannelProfile& profile);

/// r[n] = sum_l h_l x[n - d_l], starting from silence; output length equals
/// input length. Throws DimensionError when the tap counts disagree and
/// SizeError when the block is not longer than the largest delay.
SampleBlock apply_multipath(const SampleBlock& block, const ChannelProfile& profile, const PathRealization& h);

/// Adds circular complex Gaussian noise of the given per-sample variance.
/// Throws ParameterError for a negative variance.
SampleBlock awgn(const SampleBlock& block, double variance, std::uint64_t seed);
void add_awgn(std::span<cplx> samples, double variance, Rng& rng);

/// Noise energy per symbol that sets the received SNR:
/// sigma_n^2 = (K/M) sum E|h|^2 / 10^(snr_db/10).
double symbol_noise_energy(double snr_db, const OfdmConfig& cfg, const ChannelProfile& profile);
/// Per-sample AWGN variance for that SNR. The energy sigma_n^2 is spread over
/// the K occupied bins, so the variance is sigma_n^2 / K and every bin sees the
/// nominal SNR after the FFT.
double per_sample_noise_variance(double snr_db, const OfdmConfig& cfg, const ChannelProfile& profile);

} // namespace ncofdm
