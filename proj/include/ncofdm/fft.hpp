// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#pragma once

#include <memory>
#include <span>

#include "ncofdm/types.hpp"

namespace ncofdm {

/// Unnormalized complex FFT of fixed size backed by FFTW.
///
/// Forward computes X[k] = sum_m x[m] e^{-j2pi km/n}; Inverse uses e^{+j...}
/// without the 1/n factor. Plans are built once; execute() is safe to call
/// concurrently on distinct buffers.
class Fft {
public:
    enum class Direction { Forward, Inverse };

    Fft(int n, Direction dir);
    ~Fft();
    Fft(Fft&&) noexcept;
    Fft& operator=(Fft&&) noexcept;
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    int size() const noexcept { return n_; }
    void execute(std::span<const cplx> in, std::span<cplx> out) const;

private:
    struct Plan;
    int n_;
    std::unique_ptr<Plan> plan_;
};

} // namespace ncofdm
