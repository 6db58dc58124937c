// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "otfsr/otfs.hpp"
#include "otfsr/types.hpp"
#include "otfsr/waveforms.hpp"

namespace otfsr {

/// Cap on resolvable paths per scene; also the coarse detector's default list length.
inline constexpr int kMaxPaths = 10;

/// One propagation path.
struct PathParams {
    cplx alpha{1.0, 0.0};
    double t_d = 0.0;  ///< delay [s]
    double f_d = 0.0;  ///< Doppler [Hz]
};

struct ChannelScene {
    std::vector<PathParams> paths;
    double noise_sigma = 0.0;  ///< per-oversample complex noise std
    std::uint64_t seed = 0;
};

/// Enforce: every delay must fall in the frame's echo window. Disabled: only
/// the Doppler and count limits apply (unit tests with short delays).
enum class Gating { Enforce, Disabled };

/// Open delay interval (L_w·T_s, (U·NM − L_w)·T_s) in which an echo is fully
/// observed. Equals (T_B, (U−1)T_B) for the rect window.
struct DelayGate {
    double lo = 0.0;
    double hi = 0.0;
};
DelayGate delay_gate(const FrameConfig& cfg);

/// Throws std::invalid_argument naming the offending path.
void validate_scene(const ChannelScene& scene, const FrameConfig& cfg, Gating gating = Gating::Enforce);

/// r(t) = Σ_i α_i s(t − t_D,i) e^{j2π f_D,i (t − t_D,i/2)} on the input's grid and
/// extent. Fractional delays use band-limited interpolation. No noise is added.
BasebandSignal apply_continuous_channel(const BasebandSignal& s, const ChannelScene& scene,
                                        const FrameConfig& cfg, Gating gating = Gating::Enforce);

/// Adds circular complex Gaussian noise of total variance sigma² per sample.
BasebandSignal add_awgn(const BasebandSignal& r, double sigma, std::uint64_t seed);

/// H = D(f_D/2)·Toep(t_D)·D(f_D/2), D(f) = diag(e^{j2πfℓT_s}), Toep(i,j) = p∗p̂(i − j − t_D/T_s).
Eigen::MatrixXcd channel_matrix(double t_d, double f_d, int size, const PulseShape& pulse,
                                double sample_period);

/// y = Σ_i α_i H_i x̃ with x̃ embedded at indices 0 .. |x̃|−1 of a length-`size` frame.
CVector apply_discrete_channel(std::span<const cplx> x_tilde, const ChannelScene& scene, int size,
                               const PulseShape& pulse, double sample_period);

/// Restricts a full-frame sample vector to an observation window.
ObservedSamples observe(std::span<const cplx> y_full, IndexWindow window);

/// Inner (delay) matrix of a periodically repeated block versus its plain
/// circulant extension. Entries with i < j are the wrapped ones.
struct CirculantDiscrepancy {
    Eigen::MatrixXcd periodic;   ///< wrapped entries carry e^{−jπ f_D L T_s}
    Eigen::MatrixXcd circulant;  ///< wrapped entries without the phase
    Eigen::MatrixXcd delta;      ///< periodic − circulant
};
CirculantDiscrepancy circulant_discrepancy(double t_d, double f_d, int size, const PulseShape& pulse,
                                           double sample_period);

}  // namespace otfsr
