#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "ncofdm/precoder.hpp"
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

SymbolGrid random_grid(const OfdmConfig& cfg, int S, std::uint64_t seed) {
    std::mt19937 g(static_cast<unsigned>(seed));
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(S * cfg.K() * 4));
    for (auto& b : bits) b = g() & 1;
    return map_bits(bits, Modulation(16), cfg.K());
}

// P from the textbook formula with an explicit inverse, no scaling.
CMat reference_projector(const OfdmConfig& cfg, int N) {
    CMat A(N + 1, cfg.K());
    for (int n = 0; n <= N; ++n)
        for (int r = 0; r < cfg.K(); ++r) A(n, r) = std::pow(static_cast<double>(cfg.subcarrier(r)), n);
    const CMat Phi = cfg.phase_vector().asDiagonal();
    const CMat AP = A * Phi;
    return AP.adjoint() * (A * A.adjoint()).inverse() * AP;
}

} // namespace

TEST_CASE("projector algebra") {
    const OfdmConfig cfg = OfdmConfig::paper_preset();
    for (int N = 0; N <= 4; ++N) {
        const PrecoderMatrices pm = build_precoder(cfg, N);
        CHECK((pm.P * pm.P - pm.P).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((pm.P - pm.P.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(std::abs(pm.P.trace() - cplx(N + 1)) < 1e-9);
        Eigen::SelfAdjointEigenSolver<CMat> es(pm.P);
        int rank = 0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) rank += es.eigenvalues()[i] > 1e-8;
        CHECK(rank == N + 1);
    }
}

TEST_CASE("N = 0 closed form and agreement with the unscaled formula") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    const PrecoderMatrices pm = build_precoder(cfg, 0);
    const double phi = cfg.phi();
    double worst = 0.0;
    for (int u = 0; u < cfg.K(); ++u)
        for (int v = 0; v < cfg.K(); ++v) {
            const cplx ref = std::exp(-kJ * (phi * cfg.subcarrier(u))) * std::exp(kJ * (phi * cfg.subcarrier(v))) /
                             static_cast<double>(cfg.K());
            worst = std::max(worst, std::abs(pm.P(u, v) - ref));
        }
    CHECK(worst < 1e-14);

    for (int N = 1; N <= 3; ++N)
        CHECK((build_precoder(cfg, N).P - reference_projector(cfg, N)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("precoder errors") {
    const OfdmConfig tiny = OfdmConfig::contiguous(-1, 2, 16, 2, 1e-3);
    CHECK_THROWS_AS(build_precoder(tiny, 2), RankError);
    CHECK_THROWS_AS(build_precoder(OfdmConfig::desk_preset(), 7), ParameterError);
    CHECK_THROWS_AS(build_precoder(OfdmConfig::desk_preset(), -1), ParameterError);
}

TEST_CASE("precode_sequence recursion and continuity") {
    const OfdmConfig cfg = OfdmConfig::paper_preset();
    const SymbolGrid grid = random_grid(cfg, 6, 9);
    for (int N = 1; N <= 3; ++N) {
        const PrecoderMatrices pm = build_precoder(cfg, N);
        const SymbolGrid pre = precode_sequence(grid, pm);
        REQUIRE(pre.size() == grid.size());
        CHECK(pre.symbols[0] == grid.symbols[0]);
        for (std::size_t i = 1; i < pre.size(); ++i) {
            const CVec r = continuity_residual(pre.symbols[i - 1], pre.symbols[i], N, cfg);
            CHECK(relative_mismatch(r, cfg) < 1e-9);
        }
        // Raw data is discontinuous.
        CHECK(relative_mismatch(continuity_residual(grid.symbols[0], grid.symbols[1], N, cfg), cfg) > 1e-3);
    }
    CHECK(precode_sequence(SymbolGrid{}, build_precoder(cfg, 1)).empty());
}

TEST_CASE("already-continuous symbols are left unchanged") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    const PrecoderMatrices pm = build_precoder(cfg, 2);
    SymbolGrid g;
    g.symbols.push_back(random_vec(cfg.K(), 1));
    g.symbols.push_back(pm.phi_diag.conjugate().cwiseProduct(g.symbols[0]));
    const SymbolGrid pre = precode_sequence(g, pm);
    CHECK((pre.symbols[1] - g.symbols[1]).norm() < 1e-12 * g.symbols[1].norm());
}

TEST_CASE("continuity_residual against direct evaluation") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    const CVec a = random_vec(cfg.K(), 3), b = random_vec(cfg.K(), 4);
    CHECK(continuity_residual(CVec::Zero(cfg.K()), CVec::Zero(cfg.K()), 2, cfg).norm() == 0.0);
    const CVec r = continuity_residual(a, b, 2, cfg);
    for (int n = 0; n <= 2; ++n) {
        // y_next(-M_cp) written without the phase shortcut: plain evaluation at m = -M_cp.
        const cplx ref = eval_derivative(b, n, -cfg.Mcp(), PhaseRef::None, cfg) -
                         eval_derivative(a, n, cfg.M(), PhaseRef::None, cfg);
        CHECK(std::abs(r[n] - ref) < 1e-12 * (std::abs(ref) + derivative_scale(cfg, n)));
    }
}

TEST_CASE("projection contraction and orthogonality") {
    const OfdmConfig cfg = OfdmConfig::desk_preset();
    const PrecoderMatrices pm = build_precoder(cfg, 3);
    for (std::uint64_t s = 0; s < 10; ++s) {
        const CVec x = random_vec(cfg.K(), 100 + s);
        const CVec y = x - pm.apply_P(x);
        CHECK(pm.apply_P(y).norm() < 1e-10 * x.norm());
        CHECK(y.norm() <= x.norm() * (1 + 1e-14));
        CHECK((pm.apply_P(x) - pm.P * x).norm() < 1e-12 * x.norm());
    }
}
