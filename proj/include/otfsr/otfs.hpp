// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <utility>

#include "otfsr/types.hpp"
#include "otfsr/waveforms.hpp"

namespace otfsr {

/// N x M delay-Doppler symbol array X_DD[k, ℓ], k = Doppler index, ℓ = delay index.
class DDGrid {
public:
    DDGrid(int n_doppler, int m_delay);

    int n_doppler() const { return n_; }
    int m_delay() const { return m_; }

    cplx& at(int k, int l);
    const cplx& at(int k, int l) const;

    std::span<const cplx> symbols() const { return symbols_; }
    double energy() const;

private:
    int n_;
    int m_;
    CVector symbols_;  // row-major, k * M + ℓ
};

/// Closed index interval [first, last] in units of T_s.
struct IndexWindow {
    int first = 0;
    int last = -1;

    int size() const { return last - first + 1; }
    bool contains(int l) const { return l >= first && l <= last; }
};

/// Frame layout: one OTFS block per pulse repetition interval of U blocks.
struct FrameConfig {
    int n_doppler = 8;
    int m_delay = 8;
    int blocks_per_pri = 6;        ///< U
    double sample_period = 1e-6;   ///< T_s [s]
    int oversampling = 8;          ///< samples per T_s, power of two
    PulseShape pulse = PulseShape::rect();
    WindowShape window = WindowShape::rrc(0.25);
    double pulse_tail = 16.0;      ///< synthesis cutoff of sinc/rrc pulses [T_s]

    int nm() const { return n_doppler * m_delay; }
    double symbol_time() const { return m_delay * sample_period; }  ///< T
    double block_time() const { return nm() * sample_period; }      ///< T_B
    double pri() const { return blocks_per_pri * block_time(); }
    double dt() const { return sample_period / oversampling; }
    int window_length() const;
    /// One-sided pulse extent on the oversampled grid.
    int pulse_tail_samples() const;

    /// Receive-side sample indices ℓ: ⌊(1+β_w)NM⌋ .. ⌊U·NM − (1+β_w)NM⌋ (window-length generalized).
    IndexWindow observation() const;
    /// Delay lags whose full transmit support lies inside the observation window.
    IndexWindow lag_range() const;

    /// Throws std::invalid_argument on inconsistent parameters.
    void validate() const;
};

/// Oversampled complex baseband waveform on the global grid t_n = n·dt.
struct BasebandSignal {
    CVector samples;
    double dt = 0.0;
    std::int64_t start = 0;  ///< grid index of samples[0]

    double t0() const { return static_cast<double>(start) * dt; }
    std::int64_t end() const { return start + static_cast<std::int64_t>(samples.size()); }
    /// Sample at grid index n, zero outside the stored range.
    cplx at_index(std::int64_t n) const;
    /// ∫|s(t)|² dt in seconds.
    double energy() const;
};

/// Received-sample vector y_TD[ℓ] for ℓ in an absolute index window.
/// Reads outside the window throw; they are unobservable, never zero.
struct ObservedSamples {
    int first = 0;
    CVector values;

    int last() const { return first + static_cast<int>(values.size()) - 1; }
    IndexWindow window() const { return {first, last()}; }
    const cplx& at(int l) const;
};

struct PulseFrame {
    BasebandSignal signal;      ///< PRI [0, U·T_B) plus pulse tails: block first, then silence
    IndexWindow observation;    ///< receive gate in T_s samples
};

DDGrid pilot_grid(int n_doppler, int m_delay);

/// x_TD[nM+ℓ] = N^{-1/2} Σ_k X_DD[k,ℓ] e^{+j2πnk/N}. Length NM.
CVector dd_to_td(const DDGrid& grid);
/// Inverse of dd_to_td.
DDGrid td_to_dd(std::span<const cplx> x_td, int n_doppler, int m_delay);

/// x̃[ℓ] = ŵ[ℓ]·x_TD[ℓ mod NM] over the window support.
CVector apply_window(std::span<const cplx> x_td, const WindowShape& window, int n_doppler,
                     int m_delay);

/// Transmit samples x̃_TD of a DD grid under the frame's window.
CVector transmit_samples(const DDGrid& grid, const FrameConfig& cfg);

/// s(t) = Σ_ℓ x̃[ℓ] p(t − ℓT_s), sampled at dt = T_s/OS. Pulse ℓ = 0 is centred at t = 0.
BasebandSignal synthesize(std::span<const cplx> x_tilde, const FrameConfig& cfg);

/// h_{k,ℓ}(t) = N^{-1/2} Σ_n ŵ[nM+ℓ] p(t − nT − ℓT_s) e^{+j2πnk/N}, on the same
/// sample extent as synthesize() of a full block.
BasebandSignal basis_waveform(int k, int l, const FrameConfig& cfg);

/// G[a,b] = ∫ h_a h_b* dt/T_s for the listed (k, ℓ) pairs, trapezoidal at dt.
Eigen::MatrixXcd orthonormality_gram(const FrameConfig& cfg,
                                     std::span<const std::pair<int, int>> subset);

/// Places the block at the start of one PRI of zeros. Throws if the block
/// holds more samples than a PRI.
PulseFrame assemble_frame(const BasebandSignal& block, const FrameConfig& cfg);

}  // namespace otfsr
