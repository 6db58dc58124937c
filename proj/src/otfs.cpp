// SPDX-License-Identifier: Apache-2.0
#include "otfsr/otfs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace otfsr {

namespace {

double window_real_length(const FrameConfig& cfg) {
    const auto nm = static_cast<double>(cfg.nm());
    if (cfg.window.kind == WindowKind::Rect) return nm;
    return cfg.window.span * (1.0 + cfg.window.beta) * nm;
}

// Pulse p((n - centre)/OS) for n - centre in [-tail, tail].
RVector pulse_table(const PulseShape& pulse, int os, int tail) {
    RVector table(static_cast<std::size_t>(2 * tail + 1));
    for (int i = -tail; i <= tail; ++i) {
        table[static_cast<std::size_t>(i + tail)] = pulse_grid_value(pulse, i, os);
    }
    return table;
}

}  // namespace

DDGrid::DDGrid(int n_doppler, int m_delay) : n_(n_doppler), m_(m_delay) {
    if (n_doppler < 1 || m_delay < 1) throw std::invalid_argument("DDGrid: N and M must be >= 1");
    symbols_.assign(static_cast<std::size_t>(n_doppler) * m_delay, cplx{});
}

cplx& DDGrid::at(int k, int l) {
    if (k < 0 || k >= n_ || l < 0 || l >= m_) throw std::out_of_range("DDGrid index");
    return symbols_[static_cast<std::size_t>(k) * m_ + l];
}

const cplx& DDGrid::at(int k, int l) const {
    if (k < 0 || k >= n_ || l < 0 || l >= m_) throw std::out_of_range("DDGrid index");
    return symbols_[static_cast<std::size_t>(k) * m_ + l];
}

double DDGrid::energy() const {
    double e = 0.0;
    for (const auto& x : symbols_) e += std::norm(x);
    return e;
}

int FrameConfig::window_length() const {
    return static_cast<int>(otfsr::window_length(window, n_doppler, m_delay));
}

int FrameConfig::pulse_tail_samples() const {
    if (pulse.kind == PulseKind::Rect) return oversampling / 2;
    return static_cast<int>(std::ceil(pulse_tail * oversampling));
}

IndexWindow FrameConfig::observation() const {
    const double len = window_real_length(*this);
    return {static_cast<int>(std::floor(len + 1e-9)),
            static_cast<int>(std::floor(blocks_per_pri * static_cast<double>(nm()) - len + 1e-9))};
}

IndexWindow FrameConfig::lag_range() const {
    const IndexWindow obs = observation();
    return {obs.first, obs.last - window_length() + 1};
}

void FrameConfig::validate() const {
    if (n_doppler < 1 || m_delay < 1) throw std::invalid_argument("frame: N and M must be >= 1");
    if (blocks_per_pri < 2) throw std::invalid_argument("frame: U must be >= 2");
    if (!(sample_period > 0.0)) throw std::invalid_argument("frame: sample period must be > 0");
    if (oversampling < 1 || (oversampling & (oversampling - 1)) != 0) {
        throw std::invalid_argument("frame: oversampling must be a power of two");
    }
    if (!(pulse_tail >= 1.0)) throw std::invalid_argument("frame: pulse tail must be >= 1 T_s");
    pulse.validate();
    window.validate();
    if (lag_range().size() < 1) {
        throw std::invalid_argument("frame: U = " + std::to_string(blocks_per_pri) +
                                    " leaves no fully observed delay lag for this window");
    }
}

cplx BasebandSignal::at_index(std::int64_t n) const {
    if (n < start || n >= end()) return {};
    return samples[static_cast<std::size_t>(n - start)];
}

double BasebandSignal::energy() const {
    // Signals start and end at zero-valued pulse edges or truncated tails, so
    // the trapezoid reduces to a plain sum.
    double e = 0.0;
    for (const auto& x : samples) e += std::norm(x);
    return e * dt;
}

const cplx& ObservedSamples::at(int l) const {
    if (l < first || l > last()) {
        throw std::out_of_range("y_TD[" + std::to_string(l) + "] is outside the observation window [" +
                                std::to_string(first) + ", " + std::to_string(last()) + "]");
    }
    return values[static_cast<std::size_t>(l - first)];
}

DDGrid pilot_grid(int n_doppler, int m_delay) {
    DDGrid g(n_doppler, m_delay);
    g.at(0, 0) = 1.0;
    return g;
}

CVector dd_to_td(const DDGrid& grid) {
    const int n_dop = grid.n_doppler();
    const int m_del = grid.m_delay();
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_dop));
    CVector x(static_cast<std::size_t>(n_dop) * m_del);
    for (int n = 0; n < n_dop; ++n) {
        for (int l = 0; l < m_del; ++l) {
            cplx acc{};
            for (int k = 0; k < n_dop; ++k) {
                const double phase = 2.0 * kPi * static_cast<double>((n * k) % n_dop) / n_dop;
                acc += grid.at(k, l) * std::polar(1.0, phase);
            }
            x[static_cast<std::size_t>(n) * m_del + l] = acc * norm;
        }
    }
    return x;
}

DDGrid td_to_dd(std::span<const cplx> x_td, int n_doppler, int m_delay) {
    if (x_td.size() != static_cast<std::size_t>(n_doppler) * m_delay) {
        throw std::invalid_argument("td_to_dd: length must equal N*M");
    }
    DDGrid grid(n_doppler, m_delay);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_doppler));
    for (int k = 0; k < n_doppler; ++k) {
        for (int l = 0; l < m_delay; ++l) {
            cplx acc{};
            for (int n = 0; n < n_doppler; ++n) {
                const double phase = -2.0 * kPi * static_cast<double>((n * k) % n_doppler) / n_doppler;
                acc += x_td[static_cast<std::size_t>(n) * m_delay + l] * std::polar(1.0, phase);
            }
            grid.at(k, l) = acc * norm;
        }
    }
    return grid;
}

CVector apply_window(std::span<const cplx> x_td, const WindowShape& window, int n_doppler,
                     int m_delay) {
    const auto nm = static_cast<std::size_t>(n_doppler) * m_delay;
    if (x_td.size() != nm) throw std::invalid_argument("apply_window: x_TD length must equal N*M");
    const RVector w = window_samples(window, n_doppler, m_delay);
    CVector out(w.size());
    for (std::size_t l = 0; l < w.size(); ++l) out[l] = w[l] * x_td[l % nm];
    return out;
}

CVector transmit_samples(const DDGrid& grid, const FrameConfig& cfg) {
    if (grid.n_doppler() != cfg.n_doppler || grid.m_delay() != cfg.m_delay) {
        throw std::invalid_argument("transmit_samples: grid shape does not match frame");
    }
    return apply_window(dd_to_td(grid), cfg.window, cfg.n_doppler, cfg.m_delay);
}

BasebandSignal synthesize(std::span<const cplx> x_tilde, const FrameConfig& cfg) {
    if (cfg.oversampling < 8) throw std::invalid_argument("synthesize: oversampling must be >= 8");
    const int os = cfg.oversampling;
    const int tail = cfg.pulse_tail_samples();
    const RVector table = pulse_table(cfg.pulse, os, tail);

    BasebandSignal s;
    s.dt = cfg.dt();
    s.start = -tail;
    const std::size_t len =
        x_tilde.empty() ? 0 : (x_tilde.size() - 1) * static_cast<std::size_t>(os) + 2 * tail + 1;
    s.samples.assign(len, cplx{});
    for (std::size_t l = 0; l < x_tilde.size(); ++l) {
        const cplx a = x_tilde[l];
        if (a == cplx{}) continue;
        // Pulse ℓ is centred on grid index ℓ·OS, i.e. storage offset ℓ·OS + tail.
        const std::size_t base = l * static_cast<std::size_t>(os);
        for (std::size_t i = 0; i < table.size(); ++i) s.samples[base + i] += a * table[i];
    }
    return s;
}

BasebandSignal basis_waveform(int k, int l, const FrameConfig& cfg) {
    const int n_dop = cfg.n_doppler;
    const int m_del = cfg.m_delay;
    if (k < 0 || k >= n_dop || l < 0 || l >= m_del) {
        throw std::out_of_range("basis_waveform: (k, l) outside the N x M grid");
    }
    if (cfg.oversampling < 8) throw std::invalid_argument("basis_waveform: oversampling must be >= 8");
    const RVector w = window_samples(cfg.window, n_dop, m_del);
    const int os = cfg.oversampling;
    const int tail = cfg.pulse_tail_samples();
    const auto len_w = static_cast<int>(w.size());

    BasebandSignal h;
    h.dt = cfg.dt();
    h.start = -tail;
    h.samples.assign(static_cast<std::size_t>((len_w - 1) * os + 2 * tail + 1), cplx{});
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_dop));
    for (int n = 0; n * m_del + l < len_w; ++n) {
        const int pos = n * m_del + l;
        const cplx coef = norm * w[static_cast<std::size_t>(pos)] *
                          std::polar(1.0, 2.0 * kPi * static_cast<double>((n * k) % n_dop) / n_dop);
        for (int i = -tail; i <= tail; ++i) {
            const std::int64_t idx = static_cast<std::int64_t>(pos) * os + i;
            h.samples[static_cast<std::size_t>(idx - h.start)] += coef * pulse_grid_value(cfg.pulse, i, os);
        }
    }
    return h;
}

Eigen::MatrixXcd orthonormality_gram(const FrameConfig& cfg,
                                     std::span<const std::pair<int, int>> subset) {
    if (subset.empty()) throw std::invalid_argument("orthonormality_gram: empty subset");
    std::vector<BasebandSignal> waves;
    waves.reserve(subset.size());
    for (const auto& [k, l] : subset) waves.push_back(basis_waveform(k, l, cfg));

    // Every waveform shares the block extent, so the columns line up.
    const auto rows = static_cast<Eigen::Index>(waves.front().samples.size());
    Eigen::MatrixXcd h(rows, static_cast<Eigen::Index>(waves.size()));
    for (std::size_t c = 0; c < waves.size(); ++c) {
        h.col(static_cast<Eigen::Index>(c)) =
            Eigen::Map<const Eigen::VectorXcd>(waves[c].samples.data(), rows);
    }
    // G[a,b] = Σ_n h_a[n] conj(h_b[n]) · dt/T_s
    Eigen::MatrixXcd g = (h.adjoint() * h).transpose();
    return g / static_cast<double>(cfg.oversampling);
}

PulseFrame assemble_frame(const BasebandSignal& block, const FrameConfig& cfg) {
    const auto pri_samples = static_cast<std::int64_t>(cfg.blocks_per_pri) * cfg.nm() * cfg.oversampling;
    if (static_cast<std::int64_t>(block.samples.size()) > pri_samples) {
        throw std::invalid_argument("assemble_frame: block (" + std::to_string(block.samples.size()) +
                                    " samples) is longer than one PRI (" + std::to_string(pri_samples) + ")");
    }
    // The PRI is [0, U·T_B); pulse tails before t = 0 are kept.
    const std::int64_t first = std::min<std::int64_t>(block.start, 0);
    const std::int64_t last = std::max<std::int64_t>(block.end(), pri_samples);
    PulseFrame frame;
    frame.signal.dt = block.dt;
    frame.signal.start = first;
    frame.signal.samples.assign(static_cast<std::size_t>(last - first), cplx{});
    std::copy(block.samples.begin(), block.samples.end(),
              frame.signal.samples.begin() + (block.start - first));
    frame.observation = cfg.observation();
    return frame;
}

}  // namespace otfsr
