#include <doctest.h>

#include <random>
#include <sstream>

#include "ncofdm/rng.hpp"
#include "ncofdm/spectrum.hpp"

using namespace ncofdm;

namespace {

CVec random_qam(const OfdmConfig& cfg, std::mt19937_64& g) {
    const Modulation q(16);
    CVec x(cfg.K());
    for (int r = 0; r < cfg.K(); ++r) x[r] = q.point(static_cast<unsigned>(g() % 16));
    return x;
}

PsdEstimate stream_psd(const OfdmConfig& cfg, const SmootherBasis* basis, int symbols, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    WelchAccumulator acc(cfg.M());
    std::vector<cplx> slot(static_cast<std::size_t>(cfg.symbol_length()));
    const Modulator mod(cfg);
    if (!basis) {
        for (int i = 0; i < symbols; ++i) {
            mod.modulate_into(random_qam(cfg, g), slot);
            acc.push(slot);
        }
        return acc.result();
    }
    SmoothingStream st(*basis);
    for (int i = 0; i < symbols; ++i) {
        st.push(random_qam(cfg, g), slot);
        acc.push(slot);
    }
    return acc.result();
}

// Composite Simpson rule for the window transform.
cplx quadrature_G(int order, double f_r, const OfdmConfig& cfg, int L) {
    const HalfWindow w({WindowKind::Blackman, L});
    const double a = 2.0 * kPi * f_r / cfg.M();
    const int n = 20000;
    const double Tp = L - 1, h = Tp / n;
    cplx acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double u = i * h;
        const double c = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += c * w.derivative(order, u) * std::exp(kJ * (a * (u - cfg.Mcp())));
    }
    return acc * h / 3.0;
}

} // namespace

TEST_CASE("Welch: tone localization and Parseval") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    std::vector<cplx> tone(20000);
    for (std::size_t m = 0; m < tone.size(); ++m) tone[m] = std::exp(kJ * (2 * kPi * 10.0 * m / cfg.M()));
    const PsdEstimate p = welch_psd(tone, cfg.M());
    const auto peak = std::max_element(p.linear.begin(), p.linear.end()) - p.linear.begin();
    CHECK(p.freqs[static_cast<std::size_t>(peak)] == doctest::Approx(10.0));
    CHECK(p.psd_db[static_cast<std::size_t>(peak)] == 0.0);
    CHECK(p.seg_len == 2048);
    CHECK(p.overlap == 512);

    double area = 0.0;
    for (double v : p.linear) area += v * cfg.M() / p.seg_len;
    CHECK(area == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("Welch: white noise is flat") {
    Rng rng(7);
    const std::size_t n = 2048 + 220 * 1536;
    std::vector<cplx> w(n);
    for (auto& s : w) s = rng.complex_gaussian(1.0);
    const PsdEstimate p = welch_psd(w, 512.0);
    REQUIRE(p.segments >= 200);
    double mean = 0.0;
    for (double v : p.linear) mean += v;
    mean /= static_cast<double>(p.size());
    for (double v : p.linear) CHECK(std::abs(10 * std::log10(v / mean)) < 1.5);
    CHECK(mean * 512.0 == doctest::Approx(1.0).epsilon(0.03)); // density integrates to the variance
}

TEST_CASE("Welch: streaming equals one-shot, errors") {
    Rng rng(1);
    std::vector<cplx> x(9000);
    for (auto& s : x) s = rng.complex_gaussian(1.0);
    const PsdEstimate one = welch_psd(x, 512.0, 1024, 256);
    WelchAccumulator acc(512.0, 1024, 256);
    for (std::size_t i = 0; i < x.size(); i += 777)
        acc.push(std::span<const cplx>(x).subspan(i, std::min<std::size_t>(777, x.size() - i)));
    const PsdEstimate st = acc.result();
    REQUIRE(st.size() == one.size());
    for (std::size_t i = 0; i < st.size(); ++i) CHECK(st.linear[i] == doctest::Approx(one.linear[i]).epsilon(1e-12));

    CHECK_THROWS_AS(welch_psd(std::span<const cplx>(x).first(100), 512.0), SizeError);
    CHECK_THROWS_AS(WelchAccumulator(512.0, 1024, 1024), SizeError);
    CHECK_THROWS_AS(WelchAccumulator(512.0, 1, 0), SizeError);
    CHECK_THROWS_AS(WelchAccumulator(512.0).result(), SizeError);
}

TEST_CASE("rolloff_slope on constructed spectra") {
    PsdEstimate p;
    for (int i = -4000; i <= 4000; ++i) {
        const double f = i * 0.25;
        p.freqs.push_back(f);
        p.linear.push_back(1.0 / (1.0 + f * f));
    }
    p.normalize();
    CHECK(rolloff_slope(p, 20.0, 900.0) == doctest::Approx(-20.0).epsilon(0.025));
    CHECK_THROWS_AS(rolloff_slope(p, 20.0, 21.0), EstimationError);
}

TEST_CASE("Blackman window transform against quadrature, finite at resonances") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    const int L = 144;
    for (int order = 0; order <= 3; ++order)
        for (double f : {0.0, 3.7, -12.2, 40.0}) {
            const cplx a = blackman_G(order, f, cfg, L), b = quadrature_G(order, f, cfg, L);
            CHECK(std::abs(a - b) < 1e-7 * std::max(1.0, std::abs(b)));
        }
    for (int h : {1, 2})
        for (int sgn : {1, -1}) {
            const double fr = sgn * h * cfg.M() / (2.0 * (L - 1));
            for (int order = 0; order <= 2; ++order) {
                const cplx at = blackman_G(order, fr, cfg, L);
                const cplx near = blackman_G(order, fr * (1 + 1e-9), cfg, L);
                CHECK(std::isfinite(std::abs(at)));
                CHECK(std::abs(at - near) < 1e-6 * std::abs(at));
            }
        }
}

TEST_CASE("analytic PSD: plain OFDM matches Welch over main lobe and 20 sidelobes") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    const PsdEstimate w = stream_psd(cfg, nullptr, 2000, 3);
    const double edge = cfg.K() / 2.0 + 20.0;

    // Welch sees the true density convolved with the segment window's
    // spectral kernel, which matters at the sharp band edges.
    const int n = w.seg_len;
    const double du = 1.0 / 32.0, span = 6.0;
    std::vector<double> u, ker;
    for (double x = -span; x <= span + 1e-12; x += du) {
        cplx W = 0.0;
        for (int i = 0; i < n; ++i)
            W += 0.5 * (1.0 - std::cos(2.0 * kPi * (i + 1) / (n + 1))) * std::exp(-kJ * (2.0 * kPi * x * i / cfg.M()));
        u.push_back(x);
        ker.push_back(std::norm(W));
    }
    double ksum = 0.0;
    for (double k : ker) ksum += k;

    std::vector<double> fine;
    for (double f = -edge - span; f <= edge + span + 1e-12; f += du) fine.push_back(f);
    const PsdEstimate a = analytic_psd(cfg, nullptr, fine);
    auto smoothed = [&](double f) {
        const auto c = static_cast<std::size_t>(std::lround((f + edge + span) / du));
        double s = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) s += a.linear[c + u.size() / 2 - j] * ker[j];
        return s / ksum;
    };

    std::vector<double> lin;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (std::abs(w.freqs[i]) <= edge) lin.push_back(smoothed(w.freqs[i]));
    const double peak = *std::max_element(lin.begin(), lin.end());
    double worst = 0.0;
    for (std::size_t i = 0, j = 0; i < w.size(); ++i) {
        if (std::abs(w.freqs[i]) > edge) continue;
        CHECK(lin[j] >= 0.0);
        worst = std::max(worst, std::abs(10.0 * std::log10(lin[j++] / peak) - w.psd_db[i]));
    }
    CHECK(worst < 1.5);
}

TEST_CASE("analytic PSD: smoothed stream matches Welch") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    for (int N : {1, 2}) {
        const SmootherBasis bs = build_basis(cfg, N, {WindowKind::Blackman, 144});
        const PsdEstimate w = stream_psd(cfg, &bs, 2000, 4);
        const PsdEstimate a = analytic_psd(cfg, &bs, w.freqs);
        double worst = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (a.psd_db[i] > -100.0) worst = std::max(worst, std::abs(a.psd_db[i] - w.psd_db[i]));
        CAPTURE(N);
        CHECK(worst < 3.0);
    }
}

TEST_CASE("analytic PSD: Monte Carlo expectation approaches the exact one") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    const SmootherBasis bs = build_basis(cfg, 1, {WindowKind::Blackman, 144});
    const std::vector<double> f = {0.0, 20.0, 35.0, 50.0, 100.0};
    const PsdEstimate exact = analytic_psd(cfg, &bs, f);
    AnalyticPsdOptions o;
    o.draws = 3000;
    const PsdEstimate mc = analytic_psd(cfg, &bs, f, o);
    // Deep in the tail the unbiased cross term nearly cancels |y1|^2 and the
    // estimator's variance dominates, so only the upper 50 dB are compared.
    for (std::size_t i = 0; i < f.size(); ++i)
        if (exact.psd_db[i] > -50.0) CHECK(std::abs(mc.psd_db[i] - exact.psd_db[i]) < 0.5);
}

TEST_CASE("analytic PSD errors and CSV") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    const SmootherBasis tri = build_basis(cfg, 1, {WindowKind::Triangular, 72});
    CHECK_THROWS_AS(analytic_psd(cfg, &tri, {1.0}), ConfigError);
    const SmootherBasis full = build_full_span_basis(cfg, 1);
    AnalyticPsdOptions o;
    o.cross_terms = false;
    CHECK_THROWS_AS(analytic_psd(cfg, &full, {1.0}, o), ConfigError);

    PsdEstimate p;
    p.freqs = {-1.0, 0.5};
    p.linear = {1.0, 0.1};
    p.normalize();
    std::ostringstream os;
    write_psd_csv(os, p);
    CHECK(os.str() == "freq_subcarriers,psd_db\n-1.000000,0.000000\n0.500000,-10.000000\n");
}
