// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#include "ncofdm/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace ncofdm {

namespace {

// Tr{Pf^-1 X X^H Pf^-H Q^H Q} with Q restricted to `rows`.
double trace_kernel(const SmootherBasis& basis, const CMat& X, const std::vector<int>* rows) {
    const CMat G = basis.Pf_inv * X; // (N+1) x K
    CMat QtQ;
    if (rows) {
        CMat Qm = CMat::Zero(basis.Qf.rows(), basis.Qf.cols());
        for (int j : *rows) Qm.row(j) = basis.Qf.row(j);
        QtQ = Qm.adjoint() * Qm;
    } else {
        QtQ = basis.Qf.adjoint() * basis.Qf;
    }
    return ((G * G.adjoint()) * QtQ).trace().real();
}

} // namespace

double smooth_power_trace(const SmootherBasis& basis) {
    const double M = basis.cfg.M();
    return 2.0 / (M * M) * trace_kernel(basis, basis.B2, nullptr);
}

double smooth_power_two_trace(const SmootherBasis& basis) {
    return trace_kernel(basis, basis.P1, nullptr) + trace_kernel(basis, basis.P2, nullptr);
}

double smooth_power_trace_masked(const SmootherBasis& basis, const std::vector<int>& rows) {
    for (int j : rows)
        if (j < 0 || j >= basis.Qf.rows()) throw DimensionError("row index outside the smooth-signal support");
    const double M = basis.cfg.M();
    return 2.0 / (M * M) * trace_kernel(basis, basis.B2, &rows);
}

CMat b1_matrix(const SmootherBasis& basis) {
    const OfdmConfig& cfg = basis.cfg;
    CMat B1(cfg.K(), basis.N + 1);
    for (int r = 0; r < cfg.K(); ++r) {
        const double k = cfg.subcarrier(r);
        for (int n = 0; n <= basis.N; ++n)
            B1(r, n) = std::pow(cplx(0.0, 2.0 * kPi * k / cfg.M()), n) * std::exp(-kJ * (cfg.phi() * k));
    }
    return B1;
}

std::vector<int> interference_rows(const SmootherBasis& basis, int delay_samples) {
    if (delay_samples < 0) throw ParameterError("path delay must be >= 0");
    std::vector<int> rows;
    const int first = std::max(0, basis.cfg.Mcp() - delay_samples);
    for (int j = first; j < basis.L(); ++j) rows.push_back(j);
    return rows;
}

InterferenceReport interference_power(const SmootherBasis& basis, const ChannelProfile& profile) {
    InterferenceReport rep;
    const bool zero_edged = basis.half_window.zero_edged();
    for (std::size_t l = 0; l < profile.taps(); ++l) {
        const auto rows = interference_rows(basis, profile.delays_samples[l]);
        const double p = rows.empty() ? 0.0 : profile.powers[l] * smooth_power_trace_masked(basis, rows);
        int nonzero = static_cast<int>(rows.size());
        if (zero_edged && nonzero > 0) --nonzero; // last window sample is exactly zero
        rep.per_path.push_back(p);
        rep.overlap_rows.push_back(nonzero);
        rep.total += p;
    }
    return rep;
}

InterferenceReport interference_power_in_band(const SmootherBasis& basis, const ChannelProfile& profile) {
    const OfdmConfig& cfg = basis.cfg;
    const double M = cfg.M();
    const CMat G = basis.Pf_inv * basis.B2;
    const CMat C = G * G.adjoint();
    InterferenceReport rep;
    for (std::size_t l = 0; l < profile.taps(); ++l) {
        const int d = profile.delays_samples[l];
        const auto rows = interference_rows(basis, d);
        double p = 0.0;
        if (!rows.empty()) {
            // FQ(r, v) = sum_j e^{-j2pi k_r m_j / M} Q(j, v), m_j = j - M_cp + d.
            CMat FQ = CMat::Zero(cfg.K(), basis.Qf.cols());
            for (int r = 0; r < cfg.K(); ++r)
                for (int j : rows) {
                    const double m = j - cfg.Mcp() + d;
                    FQ.row(r) += std::exp(-kJ * (2.0 * kPi * cfg.subcarrier(r) * m / M)) * basis.Qf.row(j);
                }
            p = profile.powers[l] * 2.0 / (M * M * M) * (C * (FQ.adjoint() * FQ)).trace().real();
        }
        rep.per_path.push_back(p);
        int nonzero = static_cast<int>(rows.size());
        if (basis.half_window.zero_edged() && nonzero > 0) --nonzero;
        rep.overlap_rows.push_back(nonzero);
        rep.total += p;
    }
    return rep;
}

double theoretical_sinr(const OfdmConfig& cfg, const SmootherBasis* basis, const ChannelProfile& profile,
                        double noise_energy, InterferenceBand band) {
    const double G = std::accumulate(profile.powers.begin(), profile.powers.end(), 0.0);
    if (!(G > 0.0)) throw ParameterError("theoretical_sinr: channel power must be positive");
    if (!(noise_energy >= 0.0)) throw ParameterError("theoretical_sinr: noise energy must be >= 0");
    double I = 0.0;
    if (basis)
        I = band == InterferenceBand::Total ? interference_power(*basis, profile).total
                                            : interference_power_in_band(*basis, profile).total;
    const double den = noise_energy / G + I / G;
    return den > 0.0 ? (static_cast<double>(cfg.K()) / cfg.M()) / den : INFINITY;
}

void write_sinr_csv(std::ostream& os, const std::vector<SinrReport>& reports) {
    os << "scheme,N,L,snr_db,sinr_theory_db,sinr_sim_db,sinr_inband_theory_db\n";
    char line[160];
    for (const auto& r : reports)
        for (const auto& p : r.points) {
            std::snprintf(line, sizeof line, "%s,%d,%d,%.2f,%.6f,%.6f,%.6f\n", r.scheme.c_str(), r.N, r.L, p.snr_db,
                          p.sinr_theory_db, p.sinr_sim_db, p.sinr_inband_theory_db);
            os << line;
        }
}

const ComplexityRow& ComplexityReport::row(const std::string& scheme, const std::string& side) const {
    for (const auto& r : rows)
        if (r.scheme == scheme && r.side == side) return r;
    throw ConfigError("no complexity row for " + scheme + "/" + side);
}

ComplexityReport complexity_table(int K, int M, int N, int L, int L_R) {
    if (K <= 0 || M <= 0 || L <= 0) throw ParameterError("complexity_table: K, M and L must be positive");
    if (N < 0 || L_R < 0) throw ParameterError("complexity_table: N and L_R must be >= 0");
    if ((M & (M - 1)) != 0) throw ParameterError("complexity_table: M must be a power of two");
    using i64 = std::int64_t;
    const i64 k = K, m = M, n = N, l = L, lr = L_R;
    int log2m = 0;
    while ((1 << log2m) < M) ++log2m;

    ComplexityReport rep{K, M, N, L, L_R, {}, {}, {}, {}, {}, {}};
    auto add = [&](const char* scheme, const char* side, i64 v) { rep.rows.push_back({scheme, side, v, v}); };
    add("nc-ofdm", "transmitter", 8 * k * k);
    add("nc-ofdm", "receiver", 16 * (n + 1) * k * lr);
    add("td-nc-ofdm", "transmitter", 8 * n * k + 4 * (n + 1) * m);
    add("td-nc-ofdm", "receiver", 16 * (n + 1) * k * lr);
    add("low-interference", "transmitter", 8 * n * k + 4 * (n + 1) * l);
    add("low-interference", "receiver", 0);
    add("ifft", "reference", 2 * m * log2m);

    rep.nc_precoder = {2 * k * k, 2 * k * k};
    rep.td_coefficients = {2 * n * k + (n + 1) * (2 * n + 1), 2 * n * k + n * (2 * n + 1)};
    rep.td_smooth_signal = {m * (n + 1), m * (n + 1)};
    rep.li_smooth_signal = {l * (n + 1), l * (n + 1)};
    rep.li_coefficients = {2 * n * k + (n + 1) * (n + 1), 2 * n * k + n * n + 1};
    return rep;
}

void write_complexity_csv(std::ostream& os, const ComplexityReport& report) {
    os << "scheme,side,real_mult,real_add\n";
    for (const auto& r : report.rows) os << r.scheme << ',' << r.side << ',' << r.real_mult << ',' << r.real_add << '\n';
}

} // namespace ncofdm
