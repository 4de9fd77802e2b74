// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#include "ncofdm/precoder.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "ncofdm/waveform.hpp"

namespace ncofdm {

namespace {
constexpr double kMaxGramCondition = 1e12;
}

PrecoderMatrices build_precoder(const OfdmConfig& cfg, int N) {
    if (N < 0 || N > kMaxContinuityOrder)
        throw ParameterError("continuity order N = " + std::to_string(N) + " outside supported range 0.." +
                             std::to_string(kMaxContinuityOrder));
    const int K = cfg.K();
    if (N + 1 > K) throw RankError("N + 1 = " + std::to_string(N + 1) + " exceeds K = " + std::to_string(K));

    PrecoderMatrices pm;
    pm.N = N;
    pm.phi_diag = cfg.phase_vector();
    pm.A.resize(N + 1, K);
    Eigen::MatrixXd scaled(N + 1, K);
    const double kmax = std::max(1, cfg.max_abs_subcarrier());
    for (int r = 0; r < K; ++r) {
        const double k = cfg.subcarrier(r);
        for (int n = 0; n <= N; ++n) {
            pm.A(n, r) = std::pow(k, n);
            scaled(n, r) = std::pow(k / kmax, n);
        }
    }

    // Row scaling leaves the row space, and hence P, unchanged.
    const Eigen::MatrixXd gram = scaled * scaled.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd lambda = eig.eigenvalues();
    pm.gram_condition = lambda.minCoeff() > 0 ? lambda.maxCoeff() / lambda.minCoeff() : INFINITY;
    if (!(pm.gram_condition < kMaxGramCondition))
        throw ConditioningError("precoder Gram matrix A A^H is ill-conditioned", pm.gram_condition);

    // V = Phi^H A_s^T E Lambda^{-1/2} has orthonormal columns and V V^H = P.
    const Eigen::MatrixXd whiten = eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal();
    const Eigen::MatrixXd basis = scaled.transpose() * whiten;
    pm.V = pm.phi_diag.conjugate().asDiagonal() * basis.cast<cplx>();
    pm.P = pm.V * pm.V.adjoint();
    return pm;
}

SymbolGrid precode_sequence(const SymbolGrid& grid, const PrecoderMatrices& pm) {
    SymbolGrid out;
    out.modulation = grid.modulation;
    out.symbols.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const CVec& x = grid.symbols[i];
        if (x.size() != pm.P.rows()) throw DimensionError("symbol length does not match precoder K");
        if (i == 0) {
            out.symbols.push_back(x);
            continue;
        }
        const CVec memory = pm.phi_diag.conjugate().cwiseProduct(out.symbols.back());
        out.symbols.push_back(x + pm.apply_P(memory - x));
    }
    return out;
}

CVec continuity_residual(const CVec& prev, const CVec& next, int N, const OfdmConfig& cfg) {
    return eval_derivatives(next, N, -cfg.Mcp(), PhaseRef::None, cfg) -
           eval_derivatives(prev, N, cfg.M(), PhaseRef::None, cfg);
}

double derivative_scale(const OfdmConfig& cfg, int n) {
    double acc = 0.0;
    for (int k : cfg.subcarriers()) acc += std::pow(2.0 * kPi * k / cfg.M(), 2 * n);
    return std::sqrt(acc) / cfg.M();
}

double relative_mismatch(const CVec& residual, const OfdmConfig& cfg) {
    double worst = 0.0;
    for (Eigen::Index n = 0; n < residual.size(); ++n)
        worst = std::max(worst, std::abs(residual[n]) / derivative_scale(cfg, static_cast<int>(n)));
    return worst;
}

} // namespace ncofdm
