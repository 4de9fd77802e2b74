// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ncofdm/analysis.hpp"
#include "ncofdm/channel.hpp"
#include "ncofdm/smoother.hpp"
#include "ncofdm/spectrum.hpp"

namespace ncofdm {

enum class Scenario { Psd, Ber, Sinr, Complexity, Selftest };
enum class Scheme { Plain, NcPrecoder, TdFull, TdLowint };

Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario s);
Scheme scheme_from_name(const std::string& name);
std::string scheme_name(Scheme s);

/// A transmit scheme, optionally with its own recovery iteration count
/// ("nc-precoder:0"). L_R < 0 means "use the experiment default".
struct SchemeSpec {
    Scheme scheme = Scheme::Plain;
    int L_R = -1;

    /// Parses "name" or "name:L_R". Throws ConfigError.
    static SchemeSpec parse(const std::string& text);
    std::string text() const;
    bool uses_recovery() const noexcept { return scheme == Scheme::NcPrecoder || scheme == Scheme::TdFull; }
};

struct ExperimentConfig {
    Scenario scenario = Scenario::Psd;
    std::string preset = "desk";
    std::vector<SchemeSpec> schemes;
    std::vector<int> N_list{2};
    std::vector<int> L_list{144};
    WindowKind window = WindowKind::Blackman;
    int K = 64, M = 512, Mcp = 36;
    double Ts = 1.0 / 15000.0;
    int modulation = 16;
    int symbols = 2000;      // PSD stream length
    int frames = 500;        // Monte Carlo frames per SNR point
    int frame_symbols = 8;   // data symbols per frame
    std::vector<double> snr_db;
    int L_R = 2;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int workers = 1;
    std::string channel = "eva"; // "eva", "single-path" or a JSON profile path
    bool analytic = true;
    int welch_seg = 2048;
    int welch_overlap = 512;
    std::vector<std::string> notes; // informational findings from validation

    /// Contiguous subcarriers {-K/2, ..., K/2 - 1}.
    OfdmConfig ofdm() const;
    ChannelProfile channel_profile() const;
};

/// Preset defaults: "desk" (K=64, M=512, M_cp=36) or "paper-sec5"
/// (K=256, M=2048, M_cp=144). Scheme and SNR lists depend on the scenario.
ExperimentConfig preset_config(const std::string& preset, Scenario scenario);

/// Parses a JSON document. Keys: scenario (required), preset, schemes, N, L,
/// window, K, M, M_cp, T_s, modulation, symbols, frames, frame_symbols,
/// snr_db (array or "a:b:step"), L_R, seed, out, workers, channel, analytic,
/// welch_seg, welch_overlap. Unknown keys and out-of-range values throw
/// ConfigError naming the field; syntax errors carry line and column.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Range checks and scheme/recovery compatibility. Appends notes (e.g. L
/// beyond the CP) and throws ConfigError on invalid combinations.
void validate(ExperimentConfig& cfg);

/// "a:b:step" inclusive of b. Throws ConfigError.
std::vector<double> parse_snr_range(const std::string& text);

/// Runs fn(0..n-1) on up to `workers` threads. Each index runs exactly once;
/// the first exception (lowest index) is rethrown after all workers stop.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

/// Unit-energy random data symbol for stream position `index`.
CVec random_symbol(const OfdmConfig& cfg, const Modulation& mod, std::uint64_t seed, std::uint64_t index);

struct PsdCurve {
    std::string label;
    Scheme scheme = Scheme::Plain;
    int N = 0;
    int L = 0;
    PsdEstimate welch;
    std::optional<PsdEstimate> analytic;
};

/// Streams `symbols` random symbols of one scheme through a Welch estimator.
/// The same seed gives the same data for every scheme.
PsdCurve simulate_psd(const ExperimentConfig& cfg, Scheme scheme, int N, int L);

struct BerPoint {
    double snr_db = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    double ber() const noexcept { return bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0; }
};

struct BerCurve {
    SchemeSpec scheme;
    int N = 0;
    int L = 0;
    int L_R = 0;
    std::vector<BerPoint> points;
};

/// BER of every (scheme, N, L) variant over the SNR grid. All variants see the
/// same bits, channel draws and noise samples per frame.
std::vector<BerCurve> simulate_ber(const ExperimentConfig& cfg);

/// Simulated and closed-form SINR of the low-interference scheme for each
/// (N, L). The first symbol of every frame, smoothed against silence, is not
/// measured.
std::vector<SinrReport> simulate_sinr(const ExperimentConfig& cfg);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Fast in-process property checks used by the selftest scenario.
std::vector<CheckResult> run_selftest(std::uint64_t seed);

struct RunSummary {
    std::vector<std::string> files;
    std::vector<CheckResult> checks;
    double runtime_s = 0.0;
    bool ok() const noexcept;
};

/// Writes the scenario's CSV files plus summary.json into cfg.out_dir.
RunSummary run_scenario(const ExperimentConfig& cfg);

} // namespace ncofdm
