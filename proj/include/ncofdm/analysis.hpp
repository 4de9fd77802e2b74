// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ncofdm/channel.hpp"
#include "ncofdm/smoother.hpp"

namespace ncofdm {

/// Expected smooth-signal energy per symbol for i.i.d. unit-energy data and
/// closed-form coefficients: (2/M^2) Tr{Pf^-1 B2 B2^H Pf^-H Q^H Q}.
double smooth_power_trace(const SmootherBasis& basis);
/// Same expectation kept as the sum of the x_{i-1} and x_i contributions,
/// Tr{Pf^-1 P1 P1^H Pf^-H Q^H Q} + Tr{Pf^-1 P2 P2^H Pf^-H Q^H Q}.
double smooth_power_two_trace(const SmootherBasis& basis);
/// (1/M^2)-free trace kernel with an arbitrary row selection of Q (rows
/// outside `rows` are zeroed); smooth_power_trace is the all-rows case.
double smooth_power_trace_masked(const SmootherBasis& basis, const std::vector<int>& rows);

/// K x (N+1) matrix with entries (j2pi k_r/M)^n e^{-j phi k_r}.
CMat b1_matrix(const SmootherBasis& basis);

/// Rows of Q (sample offsets from the symbol start) whose delayed copy lands
/// inside the FFT window on a path of delay d: j >= M_cp - d. The final
/// row of a zero-edged window is zero, so L - 1 + d - M_cp rows carry energy.
std::vector<int> interference_rows(const SmootherBasis& basis, int delay_samples);

struct InterferenceReport {
    std::vector<double> per_path; // E|h_l|^2 (2/M^2) Tr{... Q_l^H Q_l}
    std::vector<int> overlap_rows; // nonzero rows per path
    double total = 0.0;
};

/// Expected smooth-signal energy that spills past CP removal, per path and summed.
InterferenceReport interference_power(const SmootherBasis& basis, const ChannelProfile& profile);

/// The part of interference_power that lands on the occupied FFT bins, in the
/// same time-domain energy units: (2/M^2) Tr{... Q_l^H F^H F Q_l} / M with F
/// the K-row DFT of the window positions the masked rows fall on.
InterferenceReport interference_power_in_band(const SmootherBasis& basis, const ChannelProfile& profile);

enum class InterferenceBand { Total, InBand };

/// Received SINR (linear) from the per-symbol energies:
/// (K/M) / (sigma_n^2 / G + I / G), G = sum E|h|^2, I = interference energy
/// (zero when basis is null). `band` picks interference_power (closed form)
/// or interference_power_in_band. Throws ParameterError for G <= 0 or
/// sigma_n^2 < 0.
double theoretical_sinr(const OfdmConfig& cfg, const SmootherBasis* basis, const ChannelProfile& profile,
                        double noise_energy, InterferenceBand band = InterferenceBand::Total);

struct SinrPoint {
    double snr_db = 0.0;
    double sinr_theory_db = 0.0;
    double sinr_sim_db = 0.0;
    double sinr_inband_theory_db = 0.0;
};

struct SinrReport {
    std::string scheme;
    int N = 0;
    int L = 0;
    std::vector<SinrPoint> points;
};

/// CSV with header "scheme,N,L,snr_db,sinr_theory_db,sinr_sim_db,sinr_inband_theory_db".
void write_sinr_csv(std::ostream& os, const std::vector<SinrReport>& reports);

/// Closed-form operation counts of the transceivers.
struct ComplexityRow {
    std::string scheme; // nc-ofdm, td-nc-ofdm, low-interference, ifft
    std::string side;   // transmitter, receiver, reference
    std::int64_t real_mult = 0;
    std::int64_t real_add = 0;
};

struct ComplexOps {
    std::int64_t mult = 0;
    std::int64_t add = 0;
};

struct ComplexityReport {
    int K = 0, M = 0, N = 0, L = 0, L_R = 0;
    std::vector<ComplexityRow> rows;
    ComplexOps nc_precoder;        // 2K^2, 2K^2
    ComplexOps td_coefficients;    // 2NK + (N+1)(2N+1), 2NK + N(2N+1)
    ComplexOps td_smooth_signal;   // M(N+1), M(N+1)
    ComplexOps li_smooth_signal;   // L(N+1), L(N+1)
    ComplexOps li_coefficients;    // 2NK + (N+1)^2, 2NK + N^2 + 1

    /// Throws ConfigError when no row matches.
    const ComplexityRow& row(const std::string& scheme, const std::string& side) const;
};

/// Throws ParameterError for non-positive K, M, L or negative N, L_R, or M
/// not a power of two.
ComplexityReport complexity_table(int K, int M, int N, int L, int L_R);

/// CSV with header "scheme,side,real_mult,real_add".
void write_complexity_csv(std::ostream& os, const ComplexityReport& report);

} // namespace ncofdm
