// SPDX-License-Identifier: Apache-2.0
//
// ncofdm: N-continuous OFDM link-level simulation library
// ------------------------------------------------------------------------

#include "ncofdm/fft.hpp"

#include <mutex>
#include <vector>

#include <fftw3.h>

namespace ncofdm {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

struct Fft::Plan {
    fftw_plan handle = nullptr;
    ~Plan() {
        if (handle) {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(handle);
        }
    }
};

Fft::Fft(int n, Direction dir) : n_(n), plan_(std::make_unique<Plan>()) {
    if (n <= 0) throw SizeError("FFT size must be positive");
    std::vector<cplx> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    std::lock_guard lock(planner_mutex());
    plan_->handle = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()), reinterpret_cast<fftw_complex*>(b.data()),
                                     dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_->handle) throw Error("FFTW failed to create a plan of size " + std::to_string(n));
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::execute(std::span<const cplx> in, std::span<cplx> out) const {
    if (static_cast<int>(in.size()) != n_ || static_cast<int>(out.size()) != n_)
        throw DimensionError("FFT buffer size mismatch");
    // FFTW's new-array execute takes non-const input but leaves it untouched
    // for out-of-place complex transforms.
    fftw_execute_dft(plan_->handle, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

} // namespace ncofdm
