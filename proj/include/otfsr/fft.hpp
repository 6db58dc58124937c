// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fftw3.h>

#include <cstddef>

#include "otfsr/types.hpp"

namespace otfsr {

/// In-place complex FFT plan of a fixed size. Unnormalized in both directions.
///
/// FFTW's planner is not thread-safe; create plans from one thread.
class FftPlan {
public:
    enum class Direction { Forward, Inverse };

    FftPlan(std::size_t size, Direction direction);
    ~FftPlan();

    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    FftPlan(FftPlan&& other) noexcept;
    FftPlan& operator=(FftPlan&& other) noexcept;

    std::size_t size() const { return size_; }

    /// Transforms `data` (which must hold size() elements) in place.
    void execute(CVector& data) const;

private:
    std::size_t size_ = 0;
    int sign_ = FFTW_FORWARD;
    fftw_plan plan_ = nullptr;
};

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

/// Band-limited shift: returns z with z[n] = x(n - delay) for a real-valued
/// delay in samples, computed through the DFT of a zero-padded copy. Output
/// has the same length as the input; content shifted past either end is lost.
/// Integer delays are applied exactly without a transform.
CVector delay_samples(const CVector& x, double delay);

}  // namespace otfsr
