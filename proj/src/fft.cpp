// SPDX-License-Identifier: Apache-2.0
#include "otfsr/fft.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace otfsr {

FftPlan::FftPlan(std::size_t size, Direction direction)
    : size_(size), sign_(direction == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD) {
    if (size == 0) throw std::invalid_argument("FftPlan: size must be positive");
    CVector scratch(size);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    plan_ = fftw_plan_dft_1d(static_cast<int>(size), buf, buf, sign_, FFTW_ESTIMATE);
    if (plan_ == nullptr) throw std::runtime_error("FftPlan: fftw planning failed");
}

FftPlan::~FftPlan() {
    if (plan_ != nullptr) fftw_destroy_plan(plan_);
}

FftPlan::FftPlan(FftPlan&& other) noexcept
    : size_(other.size_), sign_(other.sign_), plan_(std::exchange(other.plan_, nullptr)) {}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
    if (this != &other) {
        if (plan_ != nullptr) fftw_destroy_plan(plan_);
        size_ = other.size_;
        sign_ = other.sign_;
        plan_ = std::exchange(other.plan_, nullptr);
    }
    return *this;
}

void FftPlan::execute(CVector& data) const {
    if (data.size() != size_) throw std::invalid_argument("FftPlan: buffer size mismatch");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan_, buf, buf);
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

CVector delay_samples(const CVector& x, double delay) {
    const auto len = static_cast<long>(x.size());
    const double whole = std::floor(delay);
    double frac = delay - whole;
    auto shift = static_cast<long>(whole);
    if (frac > 1.0 - 1e-12) {
        frac = 0.0;
        ++shift;
    } else if (frac < 1e-12) {
        frac = 0.0;
    }

    CVector src = x;
    if (frac != 0.0) {
        // Pad generously so the circular transform cannot wrap energy around.
        const std::size_t n = next_pow2(2 * x.size() + 64);
        CVector buf(n);
        std::copy(x.begin(), x.end(), buf.begin());
        FftPlan(n, FftPlan::Direction::Forward).execute(buf);
        const double scale = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double f = (i <= n / 2 ? static_cast<double>(i) : static_cast<double>(i) - n) /
                             static_cast<double>(n);
            if (i == n / 2) {
                // Nyquist bin: keep the symmetric (real) part of the phase ramp.
                buf[i] *= std::cos(kPi * frac) * scale;
            } else {
                buf[i] *= std::polar(scale, -2.0 * kPi * f * frac);
            }
        }
        FftPlan(n, FftPlan::Direction::Inverse).execute(buf);
        // The tail that spills past the end is dropped below, matching the
        // integer-shift path.
        src.assign(buf.begin(), buf.begin() + len);
    }

    CVector out(x.size());
    for (long i = 0; i < len; ++i) {
        const long j = i - shift;
        if (j >= 0 && j < len) out[static_cast<std::size_t>(i)] = src[static_cast<std::size_t>(j)];
    }
    return out;
}

}  // namespace otfsr
