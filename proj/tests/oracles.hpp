// SPDX-License-Identifier: Apache-2.0
// Independent reference computations used only by tests.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "otfsr/otfs.hpp"
#include "otfsr/types.hpp"

namespace oracle {

using otfsr::cplx;
using otfsr::kPi;

/// Trapezoid rule of f on [lo, hi] with n intervals.
inline double trapezoid(const std::function<double(double)>& f, double lo, double hi, long n) {
    const double h = (hi - lo) / static_cast<double>(n);
    double acc = 0.5 * (f(lo) + f(hi));
    for (long i = 1; i < n; ++i) acc += f(lo + h * static_cast<double>(i));
    return acc * h;
}

/// Cross-ambiguity by direct summation over every ℓ' (no folding, no FFT).
inline cplx cross_ambiguity_direct(const std::function<cplx(int)>& y, const std::vector<cplx>& x, int nm,
                                   int k, int l) {
    cplx acc{};
    for (std::size_t lp = 0; lp < x.size(); ++lp) {
        const double phase = -2.0 * kPi * static_cast<double>(k) * static_cast<double>(lp) / nm;
        acc += y(static_cast<int>(lp) + l) * std::conj(x[lp]) * std::polar(1.0, phase);
    }
    return acc / std::sqrt(static_cast<double>(nm));
}

inline otfsr::DDGrid random_grid(int n, int m, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    otfsr::DDGrid grid(n, m);
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < m; ++l) grid.at(k, l) = cplx(g(rng), g(rng));
    }
    return grid;
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace oracle
