// SPDX-License-Identifier: Apache-2.0
#include "otfsr/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "otfsr/fft.hpp"

namespace otfsr {

DelayGate delay_gate(const FrameConfig& cfg) {
    const double lw = cfg.window_length();
    return {lw * cfg.sample_period,
            (static_cast<double>(cfg.blocks_per_pri) * cfg.nm() - lw) * cfg.sample_period};
}

void validate_scene(const ChannelScene& scene, const FrameConfig& cfg, Gating gating) {
    const auto count = static_cast<int>(scene.paths.size());
    if (count < 1 || count > kMaxPaths) {
        throw std::invalid_argument("scene: path count " + std::to_string(count) + " outside [1, " +
                                    std::to_string(kMaxPaths) + "]");
    }
    if (!(scene.noise_sigma >= 0.0)) throw std::invalid_argument("scene: noise_sigma must be >= 0");
    const DelayGate gate = delay_gate(cfg);
    const double f_max = 0.5 / cfg.sample_period;
    for (int i = 0; i < count; ++i) {
        const PathParams& p = scene.paths[static_cast<std::size_t>(i)];
        const std::string tag = "scene: path " + std::to_string(i) + ": ";
        if (!std::isfinite(p.t_d) || !std::isfinite(p.f_d) || !std::isfinite(p.alpha.real()) ||
            !std::isfinite(p.alpha.imag())) {
            throw std::invalid_argument(tag + "non-finite parameter");
        }
        if (!(std::abs(p.f_d) < f_max)) {
            throw std::invalid_argument(tag + "|f_D| = " + std::to_string(std::abs(p.f_d)) +
                                        " Hz must be below 1/(2T_s)");
        }
        if (gating == Gating::Enforce && !(p.t_d > gate.lo && p.t_d < gate.hi)) {
            throw std::invalid_argument(tag + "t_D = " + std::to_string(p.t_d) +
                                        " s outside the echo window (" + std::to_string(gate.lo) +
                                        ", " + std::to_string(gate.hi) + ")");
        }
    }
}

BasebandSignal apply_continuous_channel(const BasebandSignal& s, const ChannelScene& scene,
                                        const FrameConfig& cfg, Gating gating) {
    validate_scene(scene, cfg, gating);
    if (std::abs(s.dt - cfg.dt()) > 1e-12 * cfg.dt()) {
        throw std::invalid_argument("apply_continuous_channel: signal dt does not match the frame");
    }
    BasebandSignal r{CVector(s.samples.size()), s.dt, s.start};
    for (const PathParams& p : scene.paths) {
        const CVector shifted = delay_samples(s.samples, p.t_d / s.dt);
        for (std::size_t i = 0; i < shifted.size(); ++i) {
            const double t = static_cast<double>(s.start + static_cast<std::int64_t>(i)) * s.dt;
            r.samples[i] += p.alpha * shifted[i] * std::polar(1.0, 2.0 * kPi * p.f_d * (t - 0.5 * p.t_d));
        }
    }
    return r;
}

BasebandSignal add_awgn(const BasebandSignal& r, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("add_awgn: sigma must be >= 0");
    BasebandSignal out = r;
    if (sigma == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma / std::sqrt(2.0));
    for (auto& x : out.samples) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        x += cplx(re, im);
    }
    return out;
}

Eigen::MatrixXcd channel_matrix(double t_d, double f_d, int size, const PulseShape& pulse,
                                double sample_period) {
    if (size < 1) throw std::invalid_argument("channel_matrix: size must be >= 1");
    const double lag = t_d / sample_period;
    Eigen::MatrixXcd h(size, size);
    for (int j = 0; j < size; ++j) {
        for (int i = 0; i < size; ++i) {
            const double toep = pulse_matched_autocorr(pulse, static_cast<double>(i - j) - lag);
            h(i, j) = toep == 0.0 ? cplx{}
                                  : toep * std::polar(1.0, kPi * f_d * static_cast<double>(i + j) * sample_period);
        }
    }
    return h;
}

CVector apply_discrete_channel(std::span<const cplx> x_tilde, const ChannelScene& scene, int size,
                               const PulseShape& pulse, double sample_period) {
    if (x_tilde.size() > static_cast<std::size_t>(size)) {
        throw std::invalid_argument("apply_discrete_channel: frame shorter than the block");
    }
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(size);
    for (std::size_t i = 0; i < x_tilde.size(); ++i) x(static_cast<Eigen::Index>(i)) = x_tilde[i];
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(size);
    for (const PathParams& p : scene.paths) {
        y += p.alpha * (channel_matrix(p.t_d, p.f_d, size, pulse, sample_period) * x);
    }
    return CVector(y.data(), y.data() + y.size());
}

ObservedSamples observe(std::span<const cplx> y_full, IndexWindow window) {
    if (window.first < 0 || window.last >= static_cast<int>(y_full.size()) || window.size() < 1) {
        throw std::out_of_range("observe: window [" + std::to_string(window.first) + ", " +
                                std::to_string(window.last) + "] outside the frame");
    }
    return {window.first, CVector(y_full.begin() + window.first, y_full.begin() + window.last + 1)};
}

CirculantDiscrepancy circulant_discrepancy(double t_d, double f_d, int size, const PulseShape& pulse,
                                           double sample_period) {
    if (size < 1) throw std::invalid_argument("circulant_discrepancy: size must be >= 1");
    const double lag = t_d / sample_period;
    const cplx wrap_phase = std::polar(1.0, -kPi * f_d * size * sample_period);
    CirculantDiscrepancy out{Eigen::MatrixXcd::Zero(size, size), Eigen::MatrixXcd::Zero(size, size),
                             Eigen::MatrixXcd::Zero(size, size)};
    for (int j = 0; j < size; ++j) {
        for (int i = 0; i < size; ++i) {
            if (i >= j) {
                const double v = pulse_matched_autocorr(pulse, static_cast<double>(i - j) - lag);
                out.periodic(i, j) = v;
                out.circulant(i, j) = v;
            } else {
                const double v = pulse_matched_autocorr(pulse, static_cast<double>(i - j + size) - lag);
                out.periodic(i, j) = v * wrap_phase;
                out.circulant(i, j) = v;
            }
        }
    }
    out.delta = out.periodic - out.circulant;
    return out;
}

}  // namespace otfsr
