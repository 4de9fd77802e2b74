#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "ncofdm/channel.hpp"

using namespace ncofdm;

namespace {

SampleBlock impulse_block(int len) {
    SampleBlock b;
    b.symbol_length = len;
    b.symbol_count = 1;
    b.samples.assign(static_cast<std::size_t>(len), cplx{});
    b.samples[0] = 1.0;
    return b;
}

} // namespace

TEST_CASE("EVA profile") {
    const OfdmConfig big = OfdmConfig::paper_preset();
    const ChannelProfile p = eva_profile(big);
    CHECK(p.taps() == 9);
    CHECK(p.delays_samples[0] == 0);
    CHECK(p.delays_samples[1] == 1); // round(30 / 32.55)
    for (std::size_t l = 0; l < p.taps(); ++l)
        CHECK(p.delays_samples[l] == static_cast<int>(std::lround(p.delays_ns[l] * 1e-9 / big.Tsamp())));
    double s = 0.0;
    for (double v : p.powers) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.powers[0] / p.powers[8] == doctest::Approx(std::pow(10.0, 16.9 / 10)).epsilon(1e-12));
    CHECK_FALSE(p.exceeds_cp(big));
    CHECK_FALSE(eva_profile(OfdmConfig::desk_preset()).exceeds_cp(OfdmConfig::desk_preset()));
}

TEST_CASE("profile validation and loading") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    CHECK_THROWS_AS(make_profile({10.0}, {0.0}, cfg), ConfigError);
    CHECK_THROWS_AS(make_profile({0.0, 300.0, 100.0}, {0.0, 0.0, 0.0}, cfg), ConfigError);
    CHECK_THROWS_AS(make_profile({0.0, 100.0}, {0.0}, cfg), ConfigError);

    const auto path = std::filesystem::temp_directory_path() / "ncofdm_profile_test.json";
    {
        std::ofstream os(path);
        os << R"({"delays_ns": [0, 500], "powers_db": [0, -3]})";
    }
    const ChannelProfile p = load_profile(path.string(), cfg);
    CHECK(p.taps() == 2);
    CHECK(p.powers[0] / p.powers[1] == doctest::Approx(std::pow(10.0, 0.3)));
    {
        std::ofstream os(path);
        os << R"({"delays_ns": [0, 500]})";
    }
    CHECK_THROWS_AS(load_profile(path.string(), cfg), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("multipath convolution") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    const ChannelProfile one = single_path_profile(cfg);
    const SampleBlock imp = impulse_block(8);
    CHECK(apply_multipath(imp, one, unit_realization(one)).samples == imp.samples);

    ChannelProfile two = make_profile({0.0, 3 * cfg.Tsamp() * 1e9}, {0.0, 0.0}, cfg);
    PathRealization h{{1.0, 0.5}, 0};
    const SampleBlock r = apply_multipath(imp, two, h);
    const std::vector<cplx> expect = {1.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0};
    CHECK(r.samples == expect);

    // Linearity.
    Rng rng(4);
    SampleBlock x = impulse_block(64), y = impulse_block(64);
    for (auto& s : x.samples) s = rng.complex_gaussian(1.0);
    for (auto& s : y.samples) s = rng.complex_gaussian(1.0);
    const ChannelProfile eva = eva_profile(cfg);
    const PathRealization g = draw_realization(eva, 9);
    const cplx a(0.3, -1.2), b(2.0, 0.5);
    SampleBlock z = x;
    for (std::size_t i = 0; i < z.samples.size(); ++i) z.samples[i] = a * x.samples[i] + b * y.samples[i];
    const SampleBlock hz = apply_multipath(z, eva, g), hx = apply_multipath(x, eva, g), hy = apply_multipath(y, eva, g);
    for (std::size_t i = 0; i < z.samples.size(); ++i)
        CHECK(std::abs(hz.samples[i] - (a * hx.samples[i] + b * hy.samples[i])) < 1e-12);
}

TEST_CASE("Rayleigh gain statistics") {
    const ChannelProfile eva = eva_profile(OfdmConfig::desk_preset());
    const int R = 20000;
    std::vector<double> p(eva.taps(), 0.0);
    std::vector<cplx> mean(eva.taps(), 0.0);
    for (int r = 0; r < R; ++r) {
        const PathRealization h = draw_realization(eva, derive_seed(5, {static_cast<std::uint64_t>(r)}));
        for (std::size_t l = 0; l < eva.taps(); ++l) {
            p[l] += std::norm(h.gains[l]) / R;
            mean[l] += h.gains[l] / static_cast<double>(R);
        }
    }
    for (std::size_t l = 0; l < eva.taps(); ++l) {
        CHECK(p[l] == doctest::Approx(eva.powers[l]).epsilon(0.03));
        CHECK(std::abs(mean[l]) < 4.0 * std::sqrt(eva.powers[l] / R));
    }
    const PathRealization a = draw_realization(eva, 77), b = draw_realization(eva, 77);
    CHECK(a.gains == b.gains);
}

TEST_CASE("multipath scales frame power") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    const ChannelProfile eva = eva_profile(cfg);
    Rng rng(12);
    SampleBlock x = impulse_block(200000);
    for (auto& s : x.samples) s = rng.complex_gaussian(1.0);
    const PathRealization h = draw_realization(eva, 3);
    // Taps that round to the same sample delay add coherently.
    std::map<int, cplx> per_delay;
    for (std::size_t l = 0; l < eva.taps(); ++l) per_delay[eva.delays_samples[l]] += h.gains[l];
    double g = 0.0;
    for (const auto& [d, v] : per_delay) g += std::norm(v);
    const SampleBlock y = apply_multipath(x, eva, h);
    double px = 0.0, py = 0.0;
    for (std::size_t i = 0; i < x.samples.size(); ++i) px += std::norm(x.samples[i]), py += std::norm(y.samples[i]);
    CHECK(py / px == doctest::Approx(g).epsilon(0.02));
}

TEST_CASE("AWGN") {
    SampleBlock z = impulse_block(1000000);
    std::fill(z.samples.begin(), z.samples.end(), cplx{});
    CHECK(awgn(z, 0.0, 1).samples == z.samples);
    const SampleBlock n = awgn(z, 0.25, 42);
    double v = 0.0, re = 0.0;
    for (const cplx& s : n.samples) v += std::norm(s), re += s.real() * s.real();
    CHECK(v / 1e6 == doctest::Approx(0.25).epsilon(0.01));
    CHECK(re / 1e6 == doctest::Approx(0.125).epsilon(0.01));
    CHECK(awgn(z, 0.25, 42).samples == n.samples);
    CHECK_THROWS_AS(awgn(z, -1.0, 1), ParameterError);
}

TEST_CASE("SNR convention") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    const ChannelProfile eva = eva_profile(cfg);
    const double e = symbol_noise_energy(10.0, cfg, eva);
    CHECK(e == doctest::Approx(0.1 * cfg.K() / cfg.M()).epsilon(1e-14));
    CHECK(per_sample_noise_variance(10.0, cfg, eva) == doctest::Approx(e / cfg.K()).epsilon(1e-14));
}
