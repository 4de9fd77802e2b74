#include <doctest.h>

#include <cmath>
#include <random>

#include "ncofdm/constellation.hpp"
#include "ncofdm/waveform.hpp"

using namespace ncofdm;

namespace {

CVec random_vec(int K, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> n;
    CVec x(K);
    for (int r = 0; r < K; ++r) x[r] = {n(g), n(g)};
    return x;
}

// Brute-force evaluation of the symbol at sample m.
cplx direct_sample(const CVec& x, const OfdmConfig& cfg, double m) {
    cplx acc = 0.0;
    for (int r = 0; r < cfg.K(); ++r) acc += x[r] * std::exp(kJ * (2.0 * kPi * cfg.subcarrier(r) * m / cfg.M()));
    return acc / static_cast<double>(cfg.M());
}

} // namespace

TEST_CASE("OfdmConfig derived quantities and validation") {
    const OfdmConfig p = OfdmConfig::paper_preset();
    CHECK(p.K() == 256);
    CHECK(p.M() == 2048);
    CHECK(p.Mcp() == 144);
    CHECK(p.beta() == doctest::Approx(p.Tcp() / p.Ts()).epsilon(1e-15));
    CHECK(p.phi() == doctest::Approx(-2.0 * kPi * 144.0 / 2048.0).epsilon(1e-15));
    CHECK(p.Tsamp() * 1e9 == doctest::Approx(32.552).epsilon(1e-4));
    CHECK(p.bin(0) == 2048 - 128); // k = -128

    CHECK_THROWS_AS(OfdmConfig({0, 0}, 64, 8, 1e-3), ConfigError);
    CHECK_THROWS_AS(OfdmConfig({32}, 64, 8, 1e-3), ConfigError);
    CHECK_THROWS_AS(OfdmConfig({1}, 64, 64, 1e-3), ConfigError);
    CHECK_THROWS_AS(OfdmConfig({1}, 60, 8, 1e-3), ConfigError);
}

TEST_CASE("16-QAM Gray table and normalization") {
    const Modulation q(16);
    CHECK(std::abs(q.point(0) - cplx(-3, -3) / std::sqrt(10.0)) < 1e-15);

    // Gray sequence 00, 01, 11, 10 on levels -3, -1, 1, 3 per axis.
    const int gray_level[4] = {-3, -1, 3, 1}; // indexed by 2-bit label
    for (unsigned label = 0; label < 16; ++label) {
        const cplx expect(gray_level[label >> 2], gray_level[label & 3]);
        CHECK(std::abs(q.point(label) - expect / std::sqrt(10.0)) < 1e-15);
    }

    for (int order : {4, 16, 64}) {
        const Modulation m(order);
        double e = 0.0;
        for (const cplx& p : m.alphabet()) e += std::norm(p);
        CHECK(e / order == doctest::Approx(1.0).epsilon(1e-14));
        // Neighbouring points differ in one bit.
        for (unsigned a = 0; a < static_cast<unsigned>(order); ++a)
            for (unsigned b = 0; b < static_cast<unsigned>(order); ++b) {
                const double d = std::abs(m.point(a) - m.point(b));
                const double step = std::abs(m.point(0) - m.point(1));
                if (a != b && d < step * 1.01) CHECK(__builtin_popcount(a ^ b) == 1);
            }
    }
    CHECK_THROWS_AS(Modulation(8), ConfigError);
    CHECK(Modulation::from_name("64qam").order() == 64);
}

TEST_CASE("map_bits and demap are inverse") {
    std::mt19937 g(3);
    std::vector<std::uint8_t> bits(4 * 16 * 5);
    for (auto& b : bits) b = g() & 1;
    const SymbolGrid grid = map_bits(bits, Modulation(16), 16);
    CHECK(grid.size() == 5);
    CHECK(demap_bits(grid) == bits);
    bits.pop_back();
    CHECK_THROWS_AS(map_bits(bits, Modulation(16), 16), SizeError);
}

TEST_CASE("modulate_symbol matches the direct sum and keeps the CP property") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    const CVec x = random_vec(cfg.K(), 11);
    const SampleBlock b = modulate_symbol(x, cfg);
    REQUIRE(b.samples.size() == static_cast<std::size_t>(cfg.symbol_length()));

    std::mt19937 g(5);
    for (int t = 0; t < 8; ++t) {
        const int m = static_cast<int>(g() % cfg.symbol_length()) - cfg.Mcp();
        const cplx ref = direct_sample(x, cfg, m);
        CHECK(std::abs(b.samples[static_cast<std::size_t>(m + cfg.Mcp())] - ref) < 1e-12 * std::abs(ref) + 1e-15);
    }
    for (int m = 0; m < cfg.Mcp(); ++m) CHECK(b.samples[m] == b.samples[m + cfg.M()]);

    double e = 0.0;
    for (int m = cfg.Mcp(); m < cfg.symbol_length(); ++m) e += std::norm(b.samples[m]);
    CHECK(e == doctest::Approx(x.squaredNorm() / cfg.M()).epsilon(1e-12));

    CHECK_THROWS_AS(modulate_symbol(CVec::Zero(cfg.K() + 1), cfg), DimensionError);
}

TEST_CASE("DC symbol and unit-magnitude Parseval") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    CVec dc = CVec::Zero(cfg.K());
    for (int r = 0; r < cfg.K(); ++r)
        if (cfg.subcarrier(r) == 0) dc[r] = 1.0;
    for (const cplx& s : modulate_symbol(dc, cfg).samples) CHECK(std::abs(s - 1.0 / cfg.M()) < 1e-15);

    CVec ones = CVec::Ones(cfg.K());
    const SampleBlock b = modulate_symbol(ones, cfg);
    double e = 0.0;
    for (int m = cfg.Mcp(); m < cfg.symbol_length(); ++m) e += std::norm(b.samples[m]);
    CHECK(e == doctest::Approx(static_cast<double>(cfg.K()) / cfg.M()).epsilon(1e-12));
}

TEST_CASE("assemble_frame layout") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    std::vector<SampleBlock> blocks;
    for (int i = 0; i < 3; ++i) blocks.push_back(modulate_symbol(random_vec(cfg.K(), 20 + i), cfg));
    const SampleBlock one = assemble_frame(std::span(blocks).first(1));
    CHECK(one.samples == blocks[0].samples);
    const SampleBlock f = assemble_frame(blocks);
    CHECK(f.samples.size() == 3u * cfg.symbol_length());
    CHECK(f.symbol_count == 3);
    double direct = 0.0, sum = 0.0;
    for (const auto& b : blocks)
        for (const cplx& s : b.samples) direct += std::norm(s);
    for (const cplx& s : f.samples) sum += std::norm(s);
    CHECK(sum == doctest::Approx(direct).epsilon(1e-14));

    const OfdmConfig other = OfdmConfig::paper_preset();
    blocks.push_back(modulate_symbol(CVec::Zero(other.K()), other));
    CHECK_THROWS_AS(assemble_frame(blocks), ConfigError);
}

TEST_CASE("eval_derivative agrees with samples and finite differences") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    CVec dc = CVec::Zero(cfg.K());
    for (int r = 0; r < cfg.K(); ++r)
        if (cfg.subcarrier(r) == 0) dc[r] = 1.0;
    CHECK(std::abs(eval_derivative(dc, 0, 17.3, PhaseRef::None, cfg) - 1.0 / cfg.M()) < 1e-16);
    CHECK(std::abs(eval_derivative(dc, 1, 17.3, PhaseRef::None, cfg)) < 1e-16);

    const CVec x = random_vec(cfg.K(), 42);
    const SampleBlock b = modulate_symbol(x, cfg);
    for (int m : {-cfg.Mcp(), 0, 5, cfg.M() - 1}) {
        const cplx v = eval_derivative(x, 0, m, PhaseRef::None, cfg);
        CHECK(std::abs(v - b.samples[static_cast<std::size_t>(m + cfg.Mcp())]) < 1e-12 * std::abs(v));
    }

    const double h = 1e-3, m0 = -cfg.Mcp();
    auto f0 = [&](double m) { return eval_derivative(x, 0, m, PhaseRef::None, cfg); };
    const cplx fd = (f0(m0 + h) - 2.0 * f0(m0) + f0(m0 - h)) / (h * h);
    const cplx d2 = eval_derivative(x, 2, m0, PhaseRef::None, cfg);
    CHECK(std::abs(fd - d2) < 1e-6 * std::abs(d2));

    // The phase reference multiplies each subcarrier by e^{j phi k}.
    const CVec xp = x.cwiseProduct(cfg.phase_vector());
    CHECK(std::abs(eval_derivative(x, 1, 3.0, PhaseRef::Phi, cfg) - eval_derivative(xp, 1, 3.0, PhaseRef::None, cfg)) <
          1e-14);
}
