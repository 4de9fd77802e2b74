// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#include "ncofdm/channel.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace ncofdm {

ChannelProfile make_profile(std::vector<double> delays_ns, std::vector<double> powers_db, const OfdmConfig& cfg) {
    if (delays_ns.empty()) throw ConfigError("channel profile needs at least one tap");
    if (delays_ns.size() != powers_db.size())
        throw ConfigError("channel profile: delays_ns and powers_db have different lengths");
    if (delays_ns.front() != 0.0) throw ConfigError("channel profile: first delay must be 0 ns");
    for (std::size_t l = 0; l < delays_ns.size(); ++l) {
        if (!std::isfinite(delays_ns[l]) || !std::isfinite(powers_db[l]))
            throw ConfigError("channel profile: non-finite entry at tap " + std::to_string(l));
        if (l > 0 && delays_ns[l] < delays_ns[l - 1])
            throw ConfigError("channel profile: delays must be nondecreasing");
    }
    ChannelProfile p;
    p.delays_ns = std::move(delays_ns);
    p.powers_db = std::move(powers_db);
    const double tsamp_ns = cfg.Tsamp() * 1e9;
    for (std::size_t l = 0; l < p.taps(); ++l) {
        p.powers.push_back(std::pow(10.0, p.powers_db[l] / 10.0));
        p.delays_samples.push_back(static_cast<int>(std::lround(p.delays_ns[l] / tsamp_ns)));
    }
    const double total = std::accumulate(p.powers.begin(), p.powers.end(), 0.0);
    for (double& w : p.powers) w /= total;
    return p;
}

ChannelProfile eva_profile(const OfdmConfig& cfg) {
    return make_profile({0, 30, 150, 310, 370, 710, 1090, 1730, 2510},
                        {0, -1.5, -1.4, -3.6, -0.6, -9.1, -7, -12, -16.9}, cfg);
}

ChannelProfile single_path_profile(const OfdmConfig& cfg) { return make_profile({0.0}, {0.0}, cfg); }

ChannelProfile load_profile(const std::string& path, const OfdmConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open channel profile '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
        return make_profile(j.at("delays_ns").get<std::vector<double>>(), j.at("powers_db").get<std::vector<double>>(),
                            cfg);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("channel profile '" + path + "': " + e.what());
    }
}

PathRealization draw_realization(const ChannelProfile& profile, std::uint64_t seed) {
    Rng rng(seed);
    PathRealization h;
    h.seed = seed;
    h.gains.reserve(profile.taps());
    for (double p : profile.powers) h.gains.push_back(rng.complex_gaussian(p));
    return h;
}

PathRealization unit_realization(const ChannelProfile& profile) {
    PathRealization h;
    for (double p : profile.powers) h.gains.emplace_back(std::sqrt(p), 0.0);
    return h;
}

SampleBlock apply_multipath(const SampleBlock& block, const ChannelProfile& profile, const PathRealization& h) {
    if (h.gains.size() != profile.taps()) throw DimensionError("realization and profile tap counts differ");
    const std::size_t n = block.samples.size();
    if (n <= static_cast<std::size_t>(profile.max_delay()))
        throw SizeError("block of " + std::to_string(n) + " samples is not longer than the largest path delay");
    SampleBlock out = block;
    std::fill(out.samples.begin(), out.samples.end(), cplx{});
    for (std::size_t l = 0; l < profile.taps(); ++l) {
        const std::size_t d = static_cast<std::size_t>(profile.delays_samples[l]);
        const cplx g = h.gains[l];
        for (std::size_t i = d; i < n; ++i) out.samples[i] += g * block.samples[i - d];
    }
    return out;
}

void add_awgn(std::span<cplx> samples, double variance, Rng& rng) {
    if (!(variance >= 0.0)) throw ParameterError("noise variance must be >= 0");
    if (variance == 0.0) return;
    for (cplx& s : samples) s += rng.complex_gaussian(variance);
}

SampleBlock awgn(const SampleBlock& block, double variance, std::uint64_t seed) {
    SampleBlock out = block;
    Rng rng(seed);
    add_awgn(out.samples, variance, rng);
    return out;
}

double symbol_noise_energy(double snr_db, const OfdmConfig& cfg, const ChannelProfile& profile) {
    const double gain = std::accumulate(profile.powers.begin(), profile.powers.end(), 0.0);
    return static_cast<double>(cfg.K()) / cfg.M() * gain / std::pow(10.0, snr_db / 10.0);
}

double per_sample_noise_variance(double snr_db, const OfdmConfig& cfg, const ChannelProfile& profile) {
    return symbol_noise_energy(snr_db, cfg, profile) / cfg.K();
}

} // namespace ncofdm
