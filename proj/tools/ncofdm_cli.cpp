// SPDX-License-Identifier: Apache-2.0
//
// ncofdm_cli: runs one experiment scenario and writes CSV/JSON results.
//
//   ncofdm_cli --scenario psd --preset desk --out out/psd
//   ncofdm_cli --config run.json --workers 4
//
// Exit codes: 0 success, 1 failed self-test checks, 2 configuration error,
// 3 runtime error.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncofdm/experiment.hpp"

namespace {

std::vector<std::string> split(const std::string& list) {
    std::vector<std::string> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<int> parse_int_list(const std::string& list, const char* flag) {
    std::vector<int> out;
    for (const auto& s : split(list)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(s, &used));
            if (used != s.size()) throw std::invalid_argument(s);
        } catch (const std::exception&) {
            throw ncofdm::ConfigError(std::string(flag) + ": '" + s + "' is not an integer");
        }
    }
    if (out.empty()) throw ncofdm::ConfigError(std::string(flag) + ": empty list");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"N-continuous OFDM experiment runner"};
    std::string config_path, scenario, preset = "desk", out_dir, n_list, l_list, snr, window, schemes;
    std::uint64_t seed = 0;
    int workers = 0, symbols = 0, frames = 0, lr = -1;

    app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    app.add_option("--scenario", scenario, "psd | ber | sinr | complexity | selftest");
    app.add_option("--preset", preset, "desk | paper-sec5 (ignored with --config)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "worker threads")->check(CLI::Range(1, 1024));
    app.add_option("--N", n_list, "continuity orders, comma separated");
    app.add_option("--L", l_list, "smooth-signal lengths, comma separated");
    app.add_option("--snr", snr, "SNR grid a:b:step in dB");
    app.add_option("--symbols", symbols, "PSD stream length")->check(CLI::PositiveNumber);
    app.add_option("--frames", frames, "Monte Carlo frames per SNR point")->check(CLI::PositiveNumber);
    app.add_option("--lr", lr, "default receiver recovery iterations")->check(CLI::NonNegativeNumber);
    app.add_option("--window", window, "blackman | hanning | triangular | all-ones");
    app.add_option("--scheme", schemes, "plain,nc-precoder[:L_R],td-full[:L_R],td-lowint");
    CLI11_PARSE(app, argc, argv);

    using namespace ncofdm;
    ExperimentConfig cfg;
    try {
        if (!config_path.empty()) {
            cfg = load_config(config_path);
            if (!scenario.empty()) {
                // Keep the file's explicit settings; only the scenario changes.
                cfg.scenario = scenario_from_name(scenario);
            }
        } else {
            if (scenario.empty()) throw ConfigError("missing required field 'scenario' (use --scenario or --config)");
            cfg = preset_config(preset, scenario_from_name(scenario));
        }
        if (app.count("--seed")) cfg.seed = seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (workers > 0) cfg.workers = workers;
        if (!n_list.empty()) cfg.N_list = parse_int_list(n_list, "--N");
        if (!l_list.empty()) cfg.L_list = parse_int_list(l_list, "--L");
        if (!snr.empty()) cfg.snr_db = parse_snr_range(snr);
        if (symbols > 0) cfg.symbols = symbols;
        if (frames > 0) cfg.frames = frames;
        if (lr >= 0) cfg.L_R = lr;
        if (!window.empty()) cfg.window = window_kind_from_name(window);
        if (!schemes.empty()) {
            cfg.schemes.clear();
            for (const auto& s : split(schemes)) cfg.schemes.push_back(SchemeSpec::parse(s));
        }
        validate(cfg);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    for (const auto& note : cfg.notes) std::fprintf(stderr, "note: %s\n", note.c_str());

    try {
        const RunSummary sum = run_scenario(cfg);
        for (const auto& c : sum.checks)
            std::printf("%-28s %s  %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL", c.detail.c_str());
        for (const auto& f : sum.files) std::printf("wrote %s\n", f.c_str());
        std::printf("runtime %.2f s\n", sum.runtime_s);
        return sum.ok() ? 0 : 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
