// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#include "ncofdm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ncofdm/precoder.hpp"
#include "ncofdm/receiver.hpp"
#include "ncofdm/rng.hpp"

namespace ncofdm {

namespace fs = std::filesystem;
using nlohmann::json;

// Stream tags for derive_seed; changing them changes every output.
namespace tag {
constexpr std::uint64_t psd_data = 1, frame_data = 2, channel = 3, noise = 4, selftest = 5;
}

// ---------------------------------------------------------------- names

Scenario scenario_from_name(const std::string& name) {
    if (name == "psd") return Scenario::Psd;
    if (name == "ber") return Scenario::Ber;
    if (name == "sinr") return Scenario::Sinr;
    if (name == "complexity") return Scenario::Complexity;
    if (name == "selftest") return Scenario::Selftest;
    throw ConfigError("unknown scenario '" + name + "' (valid: psd, ber, sinr, complexity, selftest)");
}

std::string scenario_name(Scenario s) {
    switch (s) {
    case Scenario::Psd: return "psd";
    case Scenario::Ber: return "ber";
    case Scenario::Sinr: return "sinr";
    case Scenario::Complexity: return "complexity";
    case Scenario::Selftest: return "selftest";
    }
    return "?";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "plain") return Scheme::Plain;
    if (name == "nc-precoder") return Scheme::NcPrecoder;
    if (name == "td-full") return Scheme::TdFull;
    if (name == "td-lowint") return Scheme::TdLowint;
    throw ConfigError("unknown scheme '" + name + "' (valid: plain, nc-precoder, td-full, td-lowint)");
}

std::string scheme_name(Scheme s) {
    switch (s) {
    case Scheme::Plain: return "plain";
    case Scheme::NcPrecoder: return "nc-precoder";
    case Scheme::TdFull: return "td-full";
    case Scheme::TdLowint: return "td-lowint";
    }
    return "?";
}

SchemeSpec SchemeSpec::parse(const std::string& text) {
    SchemeSpec s;
    const auto colon = text.find(':');
    s.scheme = scheme_from_name(text.substr(0, colon));
    if (colon != std::string::npos) {
        const std::string lr = text.substr(colon + 1);
        try {
            std::size_t used = 0;
            s.L_R = std::stoi(lr, &used);
            if (used != lr.size()) throw std::invalid_argument(lr);
        } catch (const std::exception&) {
            throw ConfigError("scheme '" + text + "': recovery iterations after ':' must be an integer");
        }
        if (s.L_R < 0) throw ConfigError("scheme '" + text + "': L_R must be >= 0");
        if (!s.uses_recovery())
            throw ConfigError("scheme '" + text +
                              "': receiver recovery applies only to nc-precoder and td-full (valid: nc-precoder:L_R, "
                              "td-full:L_R)");
    }
    return s;
}

std::string SchemeSpec::text() const {
    return L_R >= 0 ? scheme_name(scheme) + ":" + std::to_string(L_R) : scheme_name(scheme);
}

// ---------------------------------------------------------------- config

OfdmConfig ExperimentConfig::ofdm() const {
    try {
        return OfdmConfig::contiguous(-K / 2, K, M, Mcp, Ts);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("K/M/M_cp/T_s: ") + e.what());
    }
}

ChannelProfile ExperimentConfig::channel_profile() const {
    const OfdmConfig c = ofdm();
    if (channel == "eva") return eva_profile(c);
    if (channel == "single-path") return single_path_profile(c);
    return load_profile(channel, c);
}

ExperimentConfig preset_config(const std::string& preset, Scenario scenario) {
    ExperimentConfig c;
    c.scenario = scenario;
    c.preset = preset;
    if (preset == "desk") {
        c.K = 64, c.M = 512, c.Mcp = 36;
        c.symbols = 2000;
        c.frames = 500;
        c.frame_symbols = 8;
        c.snr_db = parse_snr_range("0:30:5");
    } else if (preset == "paper-sec5") {
        c.K = 256, c.M = 2048, c.Mcp = 144;
        c.symbols = 100000;
        c.frames = 2000;
        c.frame_symbols = 10;
        c.snr_db = parse_snr_range("0:40:5");
    } else {
        throw ConfigError("unknown preset '" + preset + "' (valid: desk, paper-sec5)");
    }
    c.Ts = 1.0 / 15000.0;
    c.modulation = 16;
    switch (scenario) {
    case Scenario::Psd:
        c.schemes = {SchemeSpec{Scheme::Plain}, SchemeSpec{Scheme::NcPrecoder}, SchemeSpec{Scheme::TdFull},
                     SchemeSpec{Scheme::TdLowint}};
        break;
    case Scenario::Ber:
        c.schemes = {SchemeSpec{Scheme::Plain}, SchemeSpec{Scheme::NcPrecoder, 0}, SchemeSpec{Scheme::NcPrecoder, 2},
                     SchemeSpec{Scheme::TdLowint}};
        break;
    case Scenario::Sinr: c.schemes = {SchemeSpec{Scheme::TdLowint}}; break;
    case Scenario::Complexity:
    case Scenario::Selftest: c.schemes = {}; break;
    }
    return c;
}

std::vector<double> parse_snr_range(const std::string& text) {
    double a = 0, b = 0, step = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &a, &b, &step, &tail) != 3)
        throw ConfigError("snr range '" + text + "' must look like a:b:step");
    if (!(step > 0.0) || b < a) throw ConfigError("snr range '" + text + "' needs step > 0 and b >= a");
    std::vector<double> out;
    const int n = static_cast<int>(std::floor((b - a) / step + 1e-9));
    for (int i = 0; i <= n; ++i) out.push_back(a + i * step);
    return out;
}

namespace {

const std::set<std::string> kKnownKeys = {
    "scenario", "preset",  "schemes", "N",    "L",       "window",  "K",        "M",         "M_cp",
    "T_s",      "modulation", "symbols", "frames", "frame_symbols", "snr_db", "L_R",      "seed",      "out",
    "workers",  "channel", "analytic", "welch_seg", "welch_overlap"};

std::string known_keys_list() {
    std::string s;
    for (const auto& k : kKnownKeys) s += (s.empty() ? "" : ", ") + k;
    return s;
}

int get_int(const json& j, const char* key, int lo, int hi) {
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(std::string("field '") + key + "' must be an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi)
        throw ConfigError(std::string("field '") + key + "' = " + std::to_string(x) + " out of range [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(x);
}

std::vector<int> get_int_list(const json& j, const char* key, int lo, int hi) {
    const json& v = j.at(key);
    std::vector<int> out;
    if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            json one = {{key, v[i]}};
            out.push_back(get_int(one, key, lo, hi));
        }
    } else {
        out.push_back(get_int(j, key, lo, hi));
    }
    if (out.empty()) throw ConfigError(std::string("field '") + key + "' must not be empty");
    return out;
}

std::string get_string(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_string()) throw ConfigError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

json config_to_json(const ExperimentConfig& c) {
    json schemes = json::array();
    for (const auto& s : c.schemes) schemes.push_back(s.text());
    return json{{"scenario", scenario_name(c.scenario)},
                {"preset", c.preset},
                {"schemes", schemes},
                {"N", c.N_list},
                {"L", c.L_list},
                {"window", window_kind_name(c.window)},
                {"K", c.K},
                {"M", c.M},
                {"M_cp", c.Mcp},
                {"T_s", c.Ts},
                {"modulation", c.modulation},
                {"symbols", c.symbols},
                {"frames", c.frames},
                {"frame_symbols", c.frame_symbols},
                {"snr_db", c.snr_db},
                {"L_R", c.L_R},
                {"seed", c.seed},
                {"out", c.out_dir},
                {"workers", c.workers},
                {"channel", c.channel},
                {"analytic", c.analytic},
                {"welch_seg", c.welch_seg},
                {"welch_overlap", c.welch_overlap}};
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(origin + ": top level must be a JSON object");
    for (const auto& item : j.items())
        if (!kKnownKeys.count(item.key()))
            throw ConfigError(origin + ": unknown key '" + item.key() + "' (valid: " + known_keys_list() + ")");
    if (!j.contains("scenario")) throw ConfigError(origin + ": missing required field 'scenario'");

    try {
        const Scenario scenario = scenario_from_name(get_string(j, "scenario"));
        ExperimentConfig c = preset_config(j.contains("preset") ? get_string(j, "preset") : "desk", scenario);
        if (j.contains("schemes")) {
            const json& v = j.at("schemes");
            if (!v.is_array()) throw ConfigError("field 'schemes' must be an array of strings");
            c.schemes.clear();
            for (const auto& s : v) {
                if (!s.is_string()) throw ConfigError("field 'schemes' must be an array of strings");
                c.schemes.push_back(SchemeSpec::parse(s.get<std::string>()));
            }
        }
        if (j.contains("N")) c.N_list = get_int_list(j, "N", 0, kMaxContinuityOrder);
        if (j.contains("L")) c.L_list = get_int_list(j, "L", 2, 1 << 20);
        if (j.contains("window")) c.window = window_kind_from_name(get_string(j, "window"));
        if (j.contains("K")) c.K = get_int(j, "K", 1, 1 << 16);
        if (j.contains("M")) c.M = get_int(j, "M", 2, 1 << 20);
        if (j.contains("M_cp")) c.Mcp = get_int(j, "M_cp", 0, 1 << 20);
        if (j.contains("T_s")) {
            if (!j.at("T_s").is_number() || !(j.at("T_s").get<double>() > 0.0))
                throw ConfigError("field 'T_s' must be a positive number (seconds)");
            c.Ts = j.at("T_s").get<double>();
        }
        if (j.contains("modulation")) {
            const json& v = j.at("modulation");
            c.modulation = v.is_string() ? Modulation::from_name(v.get<std::string>()).order()
                                         : get_int(j, "modulation", 4, 64);
            Modulation check(c.modulation);
        }
        if (j.contains("symbols")) c.symbols = get_int(j, "symbols", 1, 100000000);
        if (j.contains("frames")) c.frames = get_int(j, "frames", 1, 100000000);
        if (j.contains("frame_symbols")) c.frame_symbols = get_int(j, "frame_symbols", 1, 100000);
        if (j.contains("snr_db")) {
            const json& v = j.at("snr_db");
            if (v.is_string()) {
                c.snr_db = parse_snr_range(v.get<std::string>());
            } else if (v.is_array()) {
                c.snr_db.clear();
                for (const auto& x : v) {
                    if (!x.is_number()) throw ConfigError("field 'snr_db' must hold numbers");
                    c.snr_db.push_back(x.get<double>());
                }
            } else {
                throw ConfigError("field 'snr_db' must be an array or an \"a:b:step\" string");
            }
        }
        if (j.contains("L_R")) c.L_R = get_int(j, "L_R", 0, 1000);
        if (j.contains("seed")) {
            const json& v = j.at("seed");
            if (!v.is_number_integer() || v.get<long long>() < 0)
                throw ConfigError("field 'seed' must be a non-negative integer");
            c.seed = v.get<std::uint64_t>();
        }
        if (j.contains("out")) c.out_dir = get_string(j, "out");
        if (j.contains("workers")) c.workers = get_int(j, "workers", 1, 1024);
        if (j.contains("channel")) c.channel = get_string(j, "channel");
        if (j.contains("analytic")) {
            if (!j.at("analytic").is_boolean()) throw ConfigError("field 'analytic' must be true or false");
            c.analytic = j.at("analytic").get<bool>();
        }
        if (j.contains("welch_seg")) c.welch_seg = get_int(j, "welch_seg", 2, 1 << 24);
        if (j.contains("welch_overlap")) c.welch_overlap = get_int(j, "welch_overlap", 0, 1 << 24);
        validate(c);
        return c;
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

void validate(ExperimentConfig& c) {
    c.notes.clear();
    const OfdmConfig o = c.ofdm();
    for (int N : c.N_list)
        if (N < 0 || N > kMaxContinuityOrder || N + 1 > c.K)
            throw ConfigError("field 'N': " + std::to_string(N) + " must be in [0, min(" +
                              std::to_string(kMaxContinuityOrder) + ", K - 1)]");
    const bool uses_lowint = std::any_of(c.schemes.begin(), c.schemes.end(),
                                         [](const SchemeSpec& s) { return s.scheme == Scheme::TdLowint; });
    for (int L : c.L_list) {
        if (L < 2 || L > o.symbol_length())
            throw ConfigError("field 'L': " + std::to_string(L) + " must be in [2, M + M_cp]");
        if (L > c.Mcp + 1 && uses_lowint)
            c.notes.push_back("L = " + std::to_string(L) + " > M_cp + 1: the smooth signal reaches the FFT window "
                              "(interference regime)");
    }
    if (c.welch_overlap >= c.welch_seg) throw ConfigError("field 'welch_overlap' must be smaller than 'welch_seg'");
    if ((c.scenario == Scenario::Ber || c.scenario == Scenario::Sinr) && c.snr_db.empty())
        throw ConfigError("field 'snr_db' must not be empty for the " + scenario_name(c.scenario) + " scenario");
    if ((c.scenario == Scenario::Psd || c.scenario == Scenario::Ber || c.scenario == Scenario::Sinr) &&
        c.schemes.empty())
        throw ConfigError("field 'schemes' must not be empty (valid: plain, nc-precoder, td-full, td-lowint)");
    if (c.scenario == Scenario::Sinr)
        for (const auto& s : c.schemes)
            if (s.scheme != Scheme::TdLowint && s.scheme != Scheme::Plain)
                throw ConfigError("field 'schemes': the sinr scenario supports plain and td-lowint (closed form "
                                  "exists only for the low-interference scheme), got " + s.text());
    if (c.scenario == Scenario::Psd)
        for (const auto& s : c.schemes)
            if (s.L_R >= 0)
                throw ConfigError("field 'schemes': recovery iterations are meaningless for the psd scenario (" +
                                  s.text() + ")");
    (void)c.channel_profile(); // surfaces profile errors early
    if (c.channel_profile().exceeds_cp(o))
        c.notes.push_back("channel delay spread reaches the cyclic prefix (ISI regime)");
}

// ---------------------------------------------------------------- workers

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (w <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < w; ++t) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

CVec random_symbol(const OfdmConfig& cfg, const Modulation& mod, std::uint64_t seed, std::uint64_t index) {
    Rng rng(derive_seed(seed, {tag::psd_data, index}));
    const auto& al = mod.alphabet();
    CVec x(cfg.K());
    for (int r = 0; r < cfg.K(); ++r) x[r] = al[rng.below(static_cast<unsigned>(al.size()))];
    return x;
}

// ---------------------------------------------------------------- PSD

namespace {

std::string curve_label(Scheme s, int N, int L) {
    switch (s) {
    case Scheme::Plain: return "plain";
    case Scheme::NcPrecoder:
    case Scheme::TdFull: return scheme_name(s) + "_N" + std::to_string(N);
    case Scheme::TdLowint: return scheme_name(s) + "_N" + std::to_string(N) + "_L" + std::to_string(L);
    }
    return "?";
}

} // namespace

PsdCurve simulate_psd(const ExperimentConfig& cfg, Scheme scheme, int N, int L) {
    const OfdmConfig o = cfg.ofdm();
    const Modulation mod(cfg.modulation);
    WelchAccumulator acc(o.M(), cfg.welch_seg, cfg.welch_overlap);
    std::vector<cplx> slot(static_cast<std::size_t>(o.symbol_length()));
    const Modulator modulator(o);

    PsdCurve c;
    c.label = curve_label(scheme, N, L);
    c.scheme = scheme;
    c.N = scheme == Scheme::Plain ? 0 : N;
    c.L = scheme == Scheme::TdLowint ? L : (scheme == Scheme::Plain ? 0 : o.symbol_length());

    std::optional<SmootherBasis> basis;
    if (scheme == Scheme::TdLowint) basis = build_basis(o, N, WindowSpec{cfg.window, L});
    if (scheme == Scheme::TdFull || scheme == Scheme::NcPrecoder) basis = build_full_span_basis(o, N);

    if (scheme == Scheme::Plain || scheme == Scheme::NcPrecoder) {
        std::optional<PrecoderMatrices> pm;
        if (scheme == Scheme::NcPrecoder) pm = build_precoder(o, N);
        CVec prev;
        for (int i = 0; i < cfg.symbols; ++i) {
            CVec x = random_symbol(o, mod, cfg.seed, static_cast<std::uint64_t>(i));
            if (pm && i > 0) x += pm->apply_P(pm->phi_diag.conjugate().cwiseProduct(prev) - x);
            modulator.modulate_into(x, slot);
            acc.push(slot);
            prev = std::move(x);
        }
    } else {
        SmoothingStream stream(*basis);
        for (int i = 0; i < cfg.symbols; ++i) {
            stream.push(random_symbol(o, mod, cfg.seed, static_cast<std::uint64_t>(i)), slot);
            acc.push(slot);
        }
        stream.finish(slot);
        acc.push(slot);
    }
    c.welch = acc.result();

    if (cfg.analytic) {
        if (scheme == Scheme::Plain)
            c.analytic = analytic_psd(o, nullptr, c.welch.freqs);
        else if (basis->half_window.is_cosine_series())
            c.analytic = analytic_psd(o, &*basis, c.welch.freqs);
    }
    return c;
}

// ---------------------------------------------------------------- BER / SINR

namespace {

struct Variant {
    SchemeSpec spec;
    int N = 0, L = 0, L_R = 0;
    std::optional<PrecoderMatrices> pm;
    std::optional<SmootherBasis> basis;
};

std::vector<Variant> make_variants(const ExperimentConfig& cfg, const OfdmConfig& o) {
    std::vector<Variant> vs;
    for (const auto& s : cfg.schemes) {
        const int lr = s.L_R >= 0 ? s.L_R : cfg.L_R;
        if (s.scheme == Scheme::Plain) {
            vs.push_back({s, 0, 0, 0, {}, {}});
            continue;
        }
        for (int N : cfg.N_list) {
            if (s.scheme == Scheme::TdLowint) {
                for (int L : cfg.L_list) {
                    Variant v{s, N, L, 0, {}, {}};
                    v.basis = build_basis(o, N, WindowSpec{cfg.window, L});
                    vs.push_back(std::move(v));
                }
            } else {
                Variant v{s, N, o.symbol_length(), lr, {}, {}};
                v.pm = build_precoder(o, N);
                if (s.scheme == Scheme::TdFull) v.basis = build_full_span_basis(o, N);
                vs.push_back(std::move(v));
            }
        }
    }
    return vs;
}

SymbolGrid random_frame(const ExperimentConfig& cfg, const OfdmConfig& o, std::uint64_t frame) {
    Rng rng(derive_seed(cfg.seed, {tag::frame_data, frame}));
    const Modulation mod(cfg.modulation);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(cfg.frame_symbols) * static_cast<std::size_t>(o.K()) *
                                   static_cast<std::size_t>(mod.bits_per_symbol()));
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
    return map_bits(bits, mod, o.K());
}

SampleBlock transmit(const Variant& v, const SymbolGrid& grid, const Modulator& modulator) {
    switch (v.spec.scheme) {
    case Scheme::Plain: return modulator.modulate(grid);
    case Scheme::NcPrecoder: return modulator.modulate(precode_sequence(grid, *v.pm));
    case Scheme::TdFull:
    case Scheme::TdLowint: break;
    }
    return apply_smoothing(grid, *v.basis).block;
}

SymbolGrid receive(const Variant& v, const SampleBlock& rx, const OfdmConfig& o, const PathRealization& h,
                   const ChannelProfile& profile, const Modulation& mod) {
    const SymbolGrid eq = equalize_zf(demodulate(rx, o, mod), h, profile, o);
    if (v.spec.uses_recovery() && v.L_R > 0)
        return recover_iterative(eq, *v.pm, v.L_R, v.spec.scheme == Scheme::NcPrecoder);
    return slice_grid(eq);
}

// Adds noise to the data slots only; the tail slot is never demodulated.
SampleBlock with_noise(const SampleBlock& faded, const Samples& noise) {
    SampleBlock rx = faded;
    for (std::size_t i = 0; i < noise.size(); ++i) rx.samples[i] += noise[i];
    return rx;
}

Samples draw_noise(const ExperimentConfig& cfg, const OfdmConfig& o, const ChannelProfile& profile,
                   std::size_t frame, std::size_t snr_index) {
    Samples noise(static_cast<std::size_t>(cfg.frame_symbols) * static_cast<std::size_t>(o.symbol_length()));
    Rng rng(derive_seed(cfg.seed, {tag::noise, frame, snr_index}));
    add_awgn(noise, per_sample_noise_variance(cfg.snr_db[snr_index], o, profile), rng);
    return noise;
}

} // namespace

std::vector<BerCurve> simulate_ber(const ExperimentConfig& cfg) {
    const OfdmConfig o = cfg.ofdm();
    const ChannelProfile profile = cfg.channel_profile();
    const Modulation mod(cfg.modulation);
    const std::vector<Variant> variants = make_variants(cfg, o);
    const std::size_t F = static_cast<std::size_t>(cfg.frames), S = cfg.snr_db.size(), V = variants.size();
    std::vector<std::uint64_t> bits(F * S * V, 0), errors(F * S * V, 0);

    parallel_for(F, cfg.workers, [&](std::size_t f) {
        const Modulator modulator(o);
        const SymbolGrid grid = random_frame(cfg, o, f);
        const PathRealization h = draw_realization(profile, derive_seed(cfg.seed, {tag::channel, f}));
        std::vector<SampleBlock> faded;
        for (const auto& v : variants) faded.push_back(apply_multipath(transmit(v, grid, modulator), profile, h));
        for (std::size_t s = 0; s < S; ++s) {
            const Samples noise = draw_noise(cfg, o, profile, f, s);
            for (std::size_t v = 0; v < V; ++v) {
                const RxReport rep = measure(grid, receive(variants[v], with_noise(faded[v], noise), o, h, profile, mod));
                bits[(f * S + s) * V + v] = rep.bits_compared;
                errors[(f * S + s) * V + v] = rep.bit_errors;
            }
        }
    });

    std::vector<BerCurve> curves;
    for (std::size_t v = 0; v < V; ++v) {
        BerCurve c{variants[v].spec, variants[v].N, variants[v].L, variants[v].L_R, {}};
        for (std::size_t s = 0; s < S; ++s) {
            BerPoint p{cfg.snr_db[s], 0, 0};
            for (std::size_t f = 0; f < F; ++f) {
                p.bits += bits[(f * S + s) * V + v];
                p.errors += errors[(f * S + s) * V + v];
            }
            c.points.push_back(p);
        }
        curves.push_back(std::move(c));
    }
    return curves;
}

std::vector<SinrReport> simulate_sinr(const ExperimentConfig& cfg) {
    const OfdmConfig o = cfg.ofdm();
    const ChannelProfile profile = cfg.channel_profile();
    const Modulation mod(cfg.modulation);
    const std::vector<Variant> variants = make_variants(cfg, o);
    const std::size_t F = static_cast<std::size_t>(cfg.frames), S = cfg.snr_db.size(), V = variants.size();
    std::vector<SinrAccumulator> acc(F * S * V);

    parallel_for(F, cfg.workers, [&](std::size_t f) {
        const Modulator modulator(o);
        const SymbolGrid grid = random_frame(cfg, o, f);
        const PathRealization h = draw_realization(profile, derive_seed(cfg.seed, {tag::channel, f}));
        const CVec H = channel_response(h, profile, o);
        std::vector<SampleBlock> faded;
        for (const auto& v : variants) faded.push_back(apply_multipath(transmit(v, grid, modulator), profile, h));
        for (std::size_t s = 0; s < S; ++s) {
            const Samples noise = draw_noise(cfg, o, profile, f, s);
            for (std::size_t v = 0; v < V; ++v)
                acc[(f * S + s) * V + v].add(demodulate(with_noise(faded[v], noise), o, mod), grid, H, 1);
        }
    });

    std::vector<SinrReport> reports;
    for (std::size_t v = 0; v < V; ++v) {
        const Variant& var = variants[v];
        SinrReport r{scheme_name(var.spec.scheme), var.N, var.L, {}};
        for (std::size_t s = 0; s < S; ++s) {
            SinrAccumulator total;
            for (std::size_t f = 0; f < F; ++f) total.merge(acc[(f * S + s) * V + v]);
            const double noise = symbol_noise_energy(cfg.snr_db[s], o, profile);
            const SmootherBasis* basis = var.basis ? &*var.basis : nullptr;
            r.points.push_back(
                {cfg.snr_db[s], 10.0 * std::log10(theoretical_sinr(o, basis, profile, noise)), total.sinr_db(),
                 10.0 * std::log10(theoretical_sinr(o, basis, profile, noise, InterferenceBand::InBand))});
        }
        reports.push_back(std::move(r));
    }
    return reports;
}

// ---------------------------------------------------------------- selftest

namespace {

CheckResult run_check(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    try {
        auto [pass, detail] = body();
        return {name, pass, detail};
    } catch (const std::exception& e) {
        return {name, false, std::string("exception: ") + e.what()};
    }
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

} // namespace

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
    ExperimentConfig cfg = preset_config("desk", Scenario::Selftest);
    cfg.seed = seed;
    cfg.frame_symbols = 6;
    const OfdmConfig o = cfg.ofdm();
    const Modulation mod(16);
    const SymbolGrid grid = random_frame(cfg, o, 0);
    const int N = 2;
    std::vector<CheckResult> out;

    out.push_back(run_check("precoder_projector", [&] {
        const PrecoderMatrices pm = build_precoder(o, N);
        const double idem = (pm.P * pm.P - pm.P).norm();
        const double herm = (pm.P - pm.P.adjoint()).norm();
        return std::pair{idem < 1e-10 && herm < 1e-10, fmt("|P^2-P| = %.2e", idem) + fmt(", |P-P^H| = %.2e", herm)};
    }));

    out.push_back(run_check("precoder_continuity", [&] {
        const PrecoderMatrices pm = build_precoder(o, N);
        const SymbolGrid pre = precode_sequence(grid, pm);
        double worst = 0.0;
        for (std::size_t i = 1; i < pre.size(); ++i)
            worst = std::max(worst, relative_mismatch(continuity_residual(pre.symbols[i - 1], pre.symbols[i], N, o), o));
        return std::pair{worst < 1e-9, fmt("max relative mismatch %.2e", worst)};
    }));

    out.push_back(run_check("lowint_continuity", [&] {
        const SmootherBasis basis = build_basis(o, N, WindowSpec{WindowKind::Blackman, o.Mcp()});
        const SmoothedFrame sm = apply_smoothing(grid, basis);
        double worst = 0.0;
        for (const CVec& r : junction_residuals(grid, sm, basis, N)) worst = std::max(worst, relative_mismatch(r, o));
        return std::pair{worst < 1e-7, fmt("max relative mismatch %.2e", worst)};
    }));

    out.push_back(run_check("lowint_cp_transparent", [&] {
        const SmootherBasis basis = build_basis(o, N, WindowSpec{WindowKind::Blackman, o.Mcp()});
        const SymbolGrid rx = demodulate(apply_smoothing(grid, basis).block, o, mod);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            worst = std::max(worst, (rx.symbols[i] - grid.symbols[i]).cwiseAbs().maxCoeff());
        return std::pair{worst < 1e-9, fmt("max subcarrier error %.2e", worst)};
    }));

    out.push_back(run_check("full_span_matches_precoder", [&] {
        const PrecoderMatrices pm = build_precoder(o, N);
        const SmootherBasis basis = build_full_span_basis(o, N);
        const SymbolGrid rx = demodulate(apply_smoothing(grid, basis).block, o, mod);
        CVec prev = CVec::Zero(o.K());
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const CVec& x = grid.symbols[i];
            const CVec xbar = x + pm.apply_P(pm.phi_diag.conjugate().cwiseProduct(prev) - x);
            worst = std::max(worst, (rx.symbols[i] - xbar).cwiseAbs().maxCoeff());
            prev = xbar;
        }
        return std::pair{worst < 1e-8, fmt("max subcarrier difference %.2e", worst)};
    }));

    // At desk scale the precoder distortion is large enough for decision
    // feedback to floor even without noise, so this check uses K = 256.
    out.push_back(run_check("recovery_noise_free", [&] {
        ExperimentConfig big = preset_config("paper-sec5", Scenario::Selftest);
        big.seed = seed;
        big.frame_symbols = 20;
        const OfdmConfig ob = big.ofdm();
        const SymbolGrid g = random_frame(big, ob, 0);
        const PrecoderMatrices pm = build_precoder(ob, N);
        const SymbolGrid rx = demodulate(Modulator(ob).modulate(precode_sequence(g, pm)), ob, mod);
        const RxReport rep = measure(g, recover_iterative(rx, pm, 2));
        return std::pair{rep.bit_errors == 0, std::to_string(rep.bit_errors) + " bit errors"};
    }));

    out.push_back(run_check("welch_parseval", [&] {
        const SampleBlock blk = Modulator(o).modulate(grid);
        const PsdEstimate p = welch_psd(blk, o, 512, 128);
        double area = 0.0, power = 0.0;
        for (double v : p.linear) area += v * o.M() / 512.0;
        for (const cplx& s : blk.samples) power += std::norm(s);
        power /= static_cast<double>(blk.samples.size());
        const double rel = std::abs(area / power - 1.0);
        return std::pair{rel < 0.1, fmt("area/power - 1 = %.3f", rel)};
    }));

    out.push_back(run_check("complexity_counts", [&] {
        const ComplexityReport rep = complexity_table(o.K(), o.M(), N, o.Mcp(), 2);
        const bool ok = rep.row("nc-ofdm", "transmitter").real_mult == 8LL * o.K() * o.K() &&
                        rep.row("low-interference", "receiver").real_mult == 0;
        return std::pair{ok, "nc-ofdm transmitter " + std::to_string(rep.row("nc-ofdm", "transmitter").real_mult)};
    }));
    return out;
}

// ---------------------------------------------------------------- runner

bool RunSummary::ok() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

std::ofstream open_csv(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write '" + path.string() + "'");
    return os;
}

} // namespace

RunSummary run_scenario(const ExperimentConfig& cfg_in) {
    ExperimentConfig cfg = cfg_in;
    validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    const OfdmConfig o = cfg.ofdm();
    RunSummary sum;
    json metrics = json::object();
    auto record = [&](const fs::path& p) { sum.files.push_back(p.string()); };

    switch (cfg.scenario) {
    case Scenario::Psd: {
        struct Job {
            Scheme scheme;
            int N, L;
        };
        std::vector<Job> jobs;
        for (const auto& s : cfg.schemes) {
            if (s.scheme == Scheme::Plain) {
                jobs.push_back({s.scheme, 0, 0});
                continue;
            }
            for (int N : cfg.N_list) {
                if (s.scheme == Scheme::TdLowint)
                    for (int L : cfg.L_list) jobs.push_back({s.scheme, N, L});
                else
                    jobs.push_back({s.scheme, N, 0});
            }
        }
        std::vector<PsdCurve> curves(jobs.size());
        parallel_for(jobs.size(), cfg.workers,
                     [&](std::size_t i) { curves[i] = simulate_psd(cfg, jobs[i].scheme, jobs[i].N, jobs[i].L); });
        const double f_lo = 2.0 * o.max_abs_subcarrier(), f_hi = 0.9 * o.M() / 2.0;
        for (const auto& c : curves) {
            const fs::path p = dir / ("psd_" + c.label + ".csv");
            auto os = open_csv(p);
            write_psd_csv(os, c.welch);
            record(p);
            json m{{"scheme", scheme_name(c.scheme)}, {"N", c.N}, {"L", c.L}};
            try {
                m["slope_db_per_decade"] = rolloff_slope(c.welch, f_lo, f_hi);
            } catch (const EstimationError&) {
                m["slope_db_per_decade"] = nullptr;
            }
            if (c.analytic) {
                const fs::path pa = dir / ("psd_" + c.label + "_analytic.csv");
                auto oa = open_csv(pa);
                write_psd_csv(oa, *c.analytic);
                record(pa);
            }
            metrics[c.label] = m;
        }
        break;
    }
    case Scenario::Ber: {
        const auto curves = simulate_ber(cfg);
        const fs::path p = dir / "ber.csv";
        auto os = open_csv(p);
        os << "snr_db,scheme,N,L,L_R,ber,bits,errors\n";
        char line[200];
        for (const auto& c : curves)
            for (const auto& pt : c.points) {
                std::snprintf(line, sizeof line, "%.2f,%s,%d,%d,%d,%.6e,%llu,%llu\n", pt.snr_db,
                              scheme_name(c.scheme.scheme).c_str(), c.N, c.L, c.L_R, pt.ber(),
                              static_cast<unsigned long long>(pt.bits), static_cast<unsigned long long>(pt.errors));
                os << line;
            }
        record(p);
        break;
    }
    case Scenario::Sinr: {
        const auto reports = simulate_sinr(cfg);
        const fs::path p = dir / "sinr.csv";
        auto os = open_csv(p);
        write_sinr_csv(os, reports);
        record(p);
        break;
    }
    case Scenario::Complexity: {
        const fs::path p = dir / "complexity.csv";
        auto os = open_csv(p);
        os << "N,L,L_R,scheme,side,real_mult,real_add\n";
        for (int N : cfg.N_list)
            for (int L : cfg.L_list) {
                const ComplexityReport rep = complexity_table(o.K(), o.M(), N, L, cfg.L_R);
                for (const auto& r : rep.rows)
                    os << N << ',' << L << ',' << cfg.L_R << ',' << r.scheme << ',' << r.side << ',' << r.real_mult
                       << ',' << r.real_add << '\n';
            }
        record(p);
        break;
    }
    case Scenario::Selftest: {
        sum.checks = run_selftest(cfg.seed);
        const fs::path p = dir / "selftest.csv";
        auto os = open_csv(p);
        os << "check,pass,detail\n";
        for (const auto& c : sum.checks) os << c.name << ',' << (c.pass ? 1 : 0) << ",\"" << c.detail << "\"\n";
        record(p);
        break;
    }
    }

    sum.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json checks = json::array();
    for (const auto& c : sum.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    const fs::path sp = dir / "summary.json";
    sum.files.push_back(sp.string());
    const json summary{{"config", config_to_json(cfg)}, {"files", sum.files}, {"checks", checks},
                       {"metrics", metrics},           {"notes", cfg.notes}, {"runtime_s", sum.runtime_s}};
    std::ofstream js(sp);
    if (!js) throw Error("cannot write '" + sp.string() + "'");
    js << summary.dump(2) << '\n';
    return sum;
}

} // namespace ncofdm
