// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "otfsr/otfs.hpp"
#include "otfsr/types.hpp"

namespace otfsr {

/// A[k, ℓ] on a rectangular block of Doppler bins k and delay lags ℓ
/// (absolute indices). Stored row-major with k as the row.
struct AmbiguitySurface {
    int k_first = 0;
    int k_count = 0;
    int l_first = 0;
    int l_count = 0;
    double doppler_bin = 0.0;  ///< Hz per k step
    double delay_bin = 0.0;    ///< s per ℓ step
    /// Period of the surface along k, 0 if unknown. When k_count equals it,
    /// neighbourhood lookups wrap in k.
    int doppler_period = 0;
    std::vector<cplx> values;

    int k_last() const { return k_first + k_count - 1; }
    int l_last() const { return l_first + l_count - 1; }
    bool wraps_doppler() const { return doppler_period > 0 && k_count == doppler_period; }

    /// Absolute-index access; throws std::out_of_range outside the block.
    const cplx& at(int k, int l) const;
    cplx& at(int k, int l);
    /// Like at(), but folds k into the block when the surface wraps and
    /// returns false for cells outside it.
    bool lookup(int k, int l, cplx& out) const;
};

/// y_TD[ℓ] = ∫ r(t) p̂(t − ℓT_s) dt / T_s for ℓ in `window`, trapezoidal at dt.
/// Throws if a pulse centre ℓ·T_s lies outside the stored signal.
ObservedSamples matched_filter_sample(const BasebandSignal& r, const FrameConfig& cfg,
                                      IndexWindow window);
/// Same, over the frame's observation window.
ObservedSamples matched_filter_sample(const BasebandSignal& r, const FrameConfig& cfg);

/// Doppler bins of a surface: `count` consecutive bins from `first`.
struct DopplerBins {
    int first = 0;
    int count = 0;
};

/// A[k,ℓ] = (NM)^{-1/2} Σ_{ℓ'} y[ℓ'+ℓ] conj(x̃[ℓ']) e^{−j2πkℓ'/NM}, evaluated with an
/// NM-point FFT of the ℓ' sum folded modulo NM. Reads of y outside its window throw.
AmbiguitySurface cross_ambiguity(const ObservedSamples& y, std::span<const cplx> x_tilde,
                                 const FrameConfig& cfg, IndexWindow lags, DopplerBins bins);
/// All NM Doppler bins over the frame's lag range.
AmbiguitySurface cross_ambiguity(const ObservedSamples& y, std::span<const cplx> x_tilde,
                                 const FrameConfig& cfg);

/// Period along k of any cross-ambiguity against x̃: NM / gcd(NM, support indices).
int doppler_period(std::span<const cplx> x_tilde, int nm);

/// A_{s,s}(τ, ν) = ∫ s(t+τ/2) conj(s(t−τ/2)) e^{−j2πνt} dt on explicit grids.
/// values are row-major [ν index][τ index]; units are seconds.
struct FineAmbiguity {
    std::vector<double> tau;  ///< s
    std::vector<double> nu;   ///< Hz
    std::vector<cplx> values;

    const cplx& at(std::size_t i_nu, std::size_t i_tau) const {
        return values[i_nu * tau.size() + i_tau];
    }
};

/// Half-shifts are band-limited. Throws if max|τ| exceeds the signal duration.
FineAmbiguity fine_ambiguity(const BasebandSignal& s, std::span<const double> tau_grid,
                             std::span<const double> nu_grid);

}  // namespace otfsr
