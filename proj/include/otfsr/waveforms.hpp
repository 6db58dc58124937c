// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

#include "otfsr/types.hpp"

namespace otfsr {

enum class PulseKind { Rect, Sinc, Rrc };
enum class WindowKind { Rect, Rrc };

/// Transmit pulse p(t). Time arguments are normalized by the sample period T_s.
struct PulseShape {
    PulseKind kind = PulseKind::Rect;
    double beta = 0.25;  ///< roll-off, used only by Rrc

    static PulseShape rect() { return {PulseKind::Rect, 0.0}; }
    static PulseShape sinc() { return {PulseKind::Sinc, 0.0}; }
    static PulseShape rrc(double beta) { return {PulseKind::Rrc, beta}; }

    /// Throws std::domain_error when an Rrc roll-off is outside (0, 1].
    void validate() const;
};

/// Block window w(t).
///
/// The ideal RRC window has unbounded support. `span` sets how many
/// (1+beta)NM-sample segments are kept around the main lobe; span = 1 gives the
/// ⌊(1+beta)NM⌋-sample support used for frame gating. Rect windows ignore it.
struct WindowShape {
    WindowKind kind = WindowKind::Rect;
    double beta = 0.25;  ///< roll-off, used only by Rrc
    int span = 1;

    static WindowShape rect() { return {WindowKind::Rect, 0.0, 1}; }
    static WindowShape rrc(double beta, int span = 1) { return {WindowKind::Rrc, beta, span}; }

    void validate() const;
};

std::string_view to_string(PulseKind kind);
std::string_view to_string(WindowKind kind);
PulseKind parse_pulse_kind(std::string_view name);
WindowKind parse_window_kind(std::string_view name);

/// Raised-cosine spectrum RC(x; beta), unit passband. Throws std::domain_error
/// for beta outside (0, 1].
double raised_cosine_spectrum(double x, double beta);

/// Time-domain root-raised-cosine impulse response with unit symbol period,
/// i.e. the inverse transform of sqrt(RC(f; beta)). Unit energy.
double rrc_impulse(double t, double beta);

/// Time-domain raised-cosine pulse sinc(t) cos(pi beta t) / (1 - (2 beta t)^2).
double rc_impulse(double t, double beta);

double sinc(double x);

double pulse_value(const PulseShape& shape, double t);

/// Pulse sampled at offset i/os from its centre. Rect is half-open,
/// 1 on [-os/2, os/2), so shifted rects tile the grid and grid sums are exact.
double pulse_grid_value(const PulseShape& shape, int i, int os);

/// Matched-filter output p * p̂ (tau) of the pulse, tau in units of T_s.
double pulse_matched_autocorr(const PulseShape& shape, double tau);

/// One-sided support of the pulse in T_s (infinite shapes return +inf).
double pulse_support(const PulseShape& shape);

/// Number of window samples ŵ[ℓ] for an N x M block.
std::size_t window_length(const WindowShape& shape, int n_doppler, int m_delay);

/// Window samples ŵ[ℓ], ℓ = 0 .. window_length()-1.
RVector window_samples(const WindowShape& shape, int n_doppler, int m_delay);

/// Triangle autocorrelation of the rectangular window, nu in Doppler bins 1/(NT).
double window_autocorr_linear(double nu);

/// Closed-form autocorrelation of the RRC window spectrum, nu in Doppler bins.
/// Peaks at 1/(1+beta) for nu = 0 and vanishes for |nu| >= 1.
double window_autocorr_rrc(double nu, double beta);

/// Quadrature of ∫ sqrt(RC((1+b)x)) sqrt(RC((1+b)(x-nu))) dx. Independent
/// reference for window_autocorr_rrc.
double numeric_spectrum_autocorr(double nu, double beta);

}  // namespace otfsr
