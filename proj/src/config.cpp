// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#include "ncofdm/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <string>

namespace ncofdm {

OfdmConfig::OfdmConfig(std::vector<int> subcarriers, int fft_size, int cp_length, double symbol_duration_s)
    : subcarriers_(std::move(subcarriers)), fft_size_(fft_size), cp_length_(cp_length),
      symbol_duration_s_(symbol_duration_s) {
    if (fft_size_ < 2 || (fft_size_ & (fft_size_ - 1)) != 0)
        throw ConfigError("M must be a power of two >= 2, got " + std::to_string(fft_size_));
    if (subcarriers_.empty()) throw ConfigError("subcarrier set is empty");
    if (static_cast<int>(subcarriers_.size()) > fft_size_) throw ConfigError("K exceeds M");
    if (cp_length_ < 0 || cp_length_ >= fft_size_) throw ConfigError("M_cp must satisfy 0 <= M_cp < M");
    if (!(symbol_duration_s_ > 0.0)) throw ConfigError("T_s must be positive");
    std::set<int> seen;
    for (int k : subcarriers_) {
        if (k < -fft_size_ / 2 || k >= fft_size_ / 2)
            throw ConfigError("subcarrier index " + std::to_string(k) + " outside [-M/2, M/2)");
        if (!seen.insert(k).second) throw ConfigError("duplicate subcarrier index " + std::to_string(k));
        max_abs_k_ = std::max(max_abs_k_, std::abs(k));
    }
}

OfdmConfig OfdmConfig::contiguous(int first, int count, int fft_size, int cp_length, double symbol_duration_s) {
    std::vector<int> ks(static_cast<std::size_t>(std::max(count, 0)));
    for (int r = 0; r < count; ++r) ks[static_cast<std::size_t>(r)] = first + r;
    return OfdmConfig(std::move(ks), fft_size, cp_length, symbol_duration_s);
}

OfdmConfig OfdmConfig::paper_preset() { return contiguous(-128, 256, 2048, 144, 1.0 / 15e3); }

OfdmConfig OfdmConfig::desk_preset() { return contiguous(-32, 64, 512, 36, 1.0 / 15e3); }

int OfdmConfig::bin(int r) const {
    const int k = subcarrier(r);
    return k >= 0 ? k : fft_size_ + k;
}

CVec OfdmConfig::phase_vector() const {
    CVec v(K());
    const double ph = phi();
    for (int r = 0; r < K(); ++r) v[r] = std::polar(1.0, ph * subcarriers_[static_cast<std::size_t>(r)]);
    return v;
}

} // namespace ncofdm
