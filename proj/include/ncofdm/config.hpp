// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#pragma once

#include <vector>

#include "ncofdm/types.hpp"

namespace ncofdm {

/// Dimensional parameters of a baseband OFDM system.
///
/// Subcarrier indices are signed; a negative index k maps to FFT bin M + k.
/// Derivatives everywhere in the library are taken with respect to the
/// dimensionless sample index m, not physical time.
class OfdmConfig {
public:
    OfdmConfig(std::vector<int> subcarriers, int fft_size, int cp_length, double symbol_duration_s);

    /// Contiguous index set {first, ..., first + count - 1}.
    static OfdmConfig contiguous(int first, int count, int fft_size, int cp_length, double symbol_duration_s);

    /// K = 256 on {-128..127}, M = 2048, M_cp = 144, T_s = 1/15 ms.
    static OfdmConfig paper_preset();
    /// K = 64 on {-32..31}, M = 512, M_cp = 36, T_s = 1/15 ms.
    static OfdmConfig desk_preset();

    int K() const noexcept { return static_cast<int>(subcarriers_.size()); }
    int M() const noexcept { return fft_size_; }
    int Mcp() const noexcept { return cp_length_; }
    /// Samples per transmitted symbol, M + M_cp.
    int symbol_length() const noexcept { return fft_size_ + cp_length_; }
    const std::vector<int>& subcarriers() const noexcept { return subcarriers_; }
    int subcarrier(int r) const { return subcarriers_.at(static_cast<std::size_t>(r)); }
    /// FFT bin holding subcarrier r.
    int bin(int r) const;
    /// Largest |k_r|.
    int max_abs_subcarrier() const noexcept { return max_abs_k_; }

    double Ts() const noexcept { return symbol_duration_s_; }
    double Tsamp() const noexcept { return symbol_duration_s_ / fft_size_; }
    double Tcp() const noexcept { return cp_length_ * Tsamp(); }
    double T() const noexcept { return Ts() + Tcp(); }
    double subcarrier_spacing() const noexcept { return 1.0 / symbol_duration_s_; }
    double sample_rate() const noexcept { return fft_size_ / symbol_duration_s_; }
    double beta() const noexcept { return static_cast<double>(cp_length_) / fft_size_; }
    double phi() const noexcept { return -2.0 * kPi * beta(); }

    /// diag(Phi) = exp(j*phi*k_r).
    CVec phase_vector() const;

    bool operator==(const OfdmConfig& o) const noexcept {
        return subcarriers_ == o.subcarriers_ && fft_size_ == o.fft_size_ && cp_length_ == o.cp_length_ &&
               symbol_duration_s_ == o.symbol_duration_s_;
    }

private:
    std::vector<int> subcarriers_;
    int fft_size_;
    int cp_length_;
    double symbol_duration_s_;
    int max_abs_k_ = 0;
};

} // namespace ncofdm
