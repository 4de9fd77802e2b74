#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ncofdm/experiment.hpp"

using namespace ncofdm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ncofdm_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

// Every CSV in dir a equals its namesake in dir b.
void check_same_csvs(const fs::path& a, const fs::path& b) {
    int n = 0;
    for (const auto& e : fs::directory_iterator(a))
        if (e.path().extension() == ".csv") {
            CAPTURE(e.path().filename().string());
            CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
            ++n;
        }
    CHECK(n > 0);
}

} // namespace

TEST_CASE("presets") {
    const ExperimentConfig p = preset_config("paper-sec5", Scenario::Psd);
    CHECK(p.K == 256);
    CHECK(p.M == 2048);
    CHECK(p.Mcp == 144);
    CHECK(p.modulation == 16);
    CHECK(p.symbols == 100000);
    CHECK(p.ofdm().subcarrier(0) == -128);
    CHECK(p.ofdm().subcarrier(255) == 127);
    CHECK(p.schemes.size() == 4);
    CHECK(preset_config("desk", Scenario::Ber).schemes.size() == 4);
    CHECK_THROWS_AS(preset_config("lab", Scenario::Psd), ConfigError);
}

TEST_CASE("config parsing") {
    const ExperimentConfig c = parse_config(R"({"scenario": "ber", "preset": "paper-sec5", "N": [1, 2],
        "schemes": ["plain", "nc-precoder:3"], "snr_db": "0:10:5", "seed": 9})");
    CHECK(c.scenario == Scenario::Ber);
    CHECK(c.K == 256);
    CHECK(c.N_list == std::vector<int>{1, 2});
    CHECK(c.schemes[1].L_R == 3);
    CHECK(c.snr_db == std::vector<double>{0.0, 5.0, 10.0});
    CHECK(c.seed == 9);

    CHECK(config_error(R"({"preset": "desk"})").find("'scenario'") != std::string::npos);
    CHECK(config_error(R"({"scenario": "psd", "colour": 1})").find("unknown key 'colour'") != std::string::npos);
    CHECK(config_error(R"({"scenario": "psd", "N": 9})").find("'N'") != std::string::npos);
    CHECK(config_error(R"({"scenario": "psd", "M_cp": -1})").find("'M_cp'") != std::string::npos);
    CHECK(config_error(R"({"scenario": "psd", "K": "many"})").find("'K'") != std::string::npos);
    const std::string syntax = config_error("{\n  \"scenario\": \"psd\",\n  \"N\": [1,\n}");
    CHECK(syntax.find("line 4") != std::string::npos);

    // Recovery only makes sense for precoded schemes.
    const std::string rec = config_error(R"({"scenario": "ber", "schemes": ["plain:2"]})");
    CHECK(rec.find("nc-precoder") != std::string::npos);
    CHECK_THROWS_AS(SchemeSpec::parse("td-lowint:1"), ConfigError);
    CHECK_THROWS_AS(SchemeSpec::parse("ofdm"), ConfigError);
    CHECK(SchemeSpec::parse("td-full:0").L_R == 0);
    CHECK(SchemeSpec::parse("nc-precoder:2").text() == "nc-precoder:2");

    CHECK_THROWS_AS(parse_snr_range("0:10"), ConfigError);
    CHECK_THROWS_AS(parse_snr_range("10:0:5"), ConfigError);
    CHECK(parse_snr_range("0:30:5").size() == 7);

    CHECK_THROWS_AS(load_config("/nonexistent/ncofdm.json"), ConfigError);
}

TEST_CASE("validation notes") {
    ExperimentConfig c = preset_config("desk", Scenario::Psd);
    c.L_list = {144};
    validate(c);
    REQUIRE(c.notes.size() == 1);
    CHECK(c.notes[0].find("interference") != std::string::npos);
    c.L_list = {36};
    validate(c);
    CHECK(c.notes.empty());
}

TEST_CASE("parallel_for runs each index once and rethrows") {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                     if (i == 7) throw ParameterError("seven");
                                 }),
                    ParameterError);
}

TEST_CASE("scenario outputs are deterministic across worker counts") {
    for (Scenario s : {Scenario::Psd, Scenario::Ber, Scenario::Sinr, Scenario::Complexity}) {
        ExperimentConfig c = preset_config("desk", s);
        c.symbols = 300;
        c.frames = 12;
        c.snr_db = {5.0, 20.0};
        c.N_list = {1, 2};
        c.analytic = false;
        CAPTURE(scenario_name(s));
        const fs::path a = scratch(scenario_name(s) + "_a"), b = scratch(scenario_name(s) + "_b"),
                       r = scratch(scenario_name(s) + "_r");
        c.out_dir = a.string();
        c.workers = 1;
        run_scenario(c);
        c.out_dir = b.string();
        c.workers = 3;
        run_scenario(c);
        c.out_dir = r.string();
        c.workers = 1;
        const RunSummary sum = run_scenario(c);
        check_same_csvs(a, b);
        check_same_csvs(a, r);
        CHECK(fs::exists(a / "summary.json"));
        CHECK(sum.files.back() == (r / "summary.json").string());
        for (const fs::path& p : {a, b, r}) fs::remove_all(p);
    }
}

TEST_CASE("CSV headers") {
    ExperimentConfig c = preset_config("desk", Scenario::Ber);
    c.frames = 2;
    c.snr_db = {10.0};
    const fs::path d = scratch("headers");
    c.out_dir = d.string();
    run_scenario(c);
    CHECK(slurp(d / "ber.csv").rfind("snr_db,scheme,N,L,L_R,ber,bits,errors\n", 0) == 0);
    c = preset_config("desk", Scenario::Psd);
    c.schemes = {SchemeSpec{Scheme::Plain}};
    c.symbols = 200;
    c.out_dir = d.string();
    run_scenario(c);
    CHECK(slurp(d / "psd_plain.csv").rfind("freq_subcarriers,psd_db\n", 0) == 0);
    CHECK(fs::exists(d / "psd_plain_analytic.csv"));
    fs::remove_all(d);
}

TEST_CASE("selftest passes and the CLI reports it") {
    for (const auto& c : run_selftest(1)) {
        CAPTURE(c.name);
        CAPTURE(c.detail);
        CHECK(c.pass);
    }
    const char* cli = std::getenv("NCOFDM_CLI");
    if (!cli) return;
    const fs::path d = scratch("cli");
    const std::string base = std::string(cli) + " --out " + d.string();
    CHECK(std::system((base + " --scenario selftest > /dev/null").c_str()) == 0);
    CHECK(WEXITSTATUS(std::system((base + " --scenario nope 2> /dev/null").c_str())) == 2);
    CHECK(WEXITSTATUS(std::system((base + " 2> /dev/null").c_str())) == 2);
    CHECK(std::system((base + " --scenario complexity --preset paper-sec5 --N 2 --L 144 > /dev/null").c_str()) == 0);
    CHECK(slurp(d / "complexity.csv").find("low-interference,transmitter,5824,5824") != std::string::npos);
    fs::remove_all(d);
}
