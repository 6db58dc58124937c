// SPDX-License-Identifier: Apache-2.0
#include "otfsr/receiver.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "otfsr/fft.hpp"

namespace otfsr {

const cplx& AmbiguitySurface::at(int k, int l) const {
    if (k < k_first || k > k_last() || l < l_first || l > l_last()) {
        throw std::out_of_range("AmbiguitySurface: (" + std::to_string(k) + ", " + std::to_string(l) +
                                ") outside the surface");
    }
    return values[static_cast<std::size_t>(k - k_first) * l_count + (l - l_first)];
}

cplx& AmbiguitySurface::at(int k, int l) {
    return const_cast<cplx&>(std::as_const(*this).at(k, l));
}

bool AmbiguitySurface::lookup(int k, int l, cplx& out) const {
    if (l < l_first || l > l_last()) return false;
    if (wraps_doppler()) {
        k = k_first + ((k - k_first) % k_count + k_count) % k_count;
    } else if (k < k_first || k > k_last()) {
        return false;
    }
    out = at(k, l);
    return true;
}

ObservedSamples matched_filter_sample(const BasebandSignal& r, const FrameConfig& cfg,
                                      IndexWindow window) {
    if (window.size() < 1) throw std::invalid_argument("matched_filter_sample: empty window");
    if (std::abs(r.dt - cfg.dt()) > 1e-12 * cfg.dt()) {
        throw std::invalid_argument("matched_filter_sample: signal dt does not match the frame");
    }
    const int os = cfg.oversampling;
    const int tail = cfg.pulse_tail_samples();
    RVector taps(static_cast<std::size_t>(2 * tail + 1));
    for (int i = -tail; i <= tail; ++i) {
        // ∫ r(t) p̂(ℓT_s − t) dt = ∫ r(t) conj(p(t − ℓT_s)) dt; pulses are real.
        taps[static_cast<std::size_t>(i + tail)] = pulse_grid_value(cfg.pulse, i, os);
    }
    ObservedSamples y{window.first, CVector(static_cast<std::size_t>(window.size()))};
    for (int l = window.first; l <= window.last; ++l) {
        const std::int64_t centre = static_cast<std::int64_t>(l) * os;
        if (centre < r.start || centre >= r.end()) {
            throw std::out_of_range("matched_filter_sample: sample " + std::to_string(l) +
                                    " lies outside the received signal");
        }
        cplx acc{};
        for (int i = -tail; i <= tail; ++i) acc += r.at_index(centre + i) * taps[static_cast<std::size_t>(i + tail)];
        y.values[static_cast<std::size_t>(l - window.first)] = acc / static_cast<double>(os);
    }
    return y;
}

ObservedSamples matched_filter_sample(const BasebandSignal& r, const FrameConfig& cfg) {
    return matched_filter_sample(r, cfg, cfg.observation());
}

int doppler_period(std::span<const cplx> x_tilde, int nm) {
    int g = nm;
    for (std::size_t i = 0; i < x_tilde.size(); ++i) {
        if (x_tilde[i] != cplx{}) g = std::gcd(g, static_cast<int>(i % static_cast<std::size_t>(nm)));
    }
    return nm / g;
}

AmbiguitySurface cross_ambiguity(const ObservedSamples& y, std::span<const cplx> x_tilde,
                                 const FrameConfig& cfg, IndexWindow lags, DopplerBins bins) {
    const int nm = cfg.nm();
    if (x_tilde.size() < static_cast<std::size_t>(nm)) {
        throw std::invalid_argument("cross_ambiguity: x̃ must hold at least N*M samples");
    }
    if (lags.size() < 1 || bins.count < 1) throw std::invalid_argument("cross_ambiguity: empty range");

    // Full-support bookkeeping: every lag must see the whole x̃ block, zero taps included.
    const int y_last = y.first + static_cast<int>(y.values.size()) - 1;
    const int span = static_cast<int>(x_tilde.size()) - 1;
    if (lags.first < y.first || lags.last + span > y_last) {
        throw std::out_of_range("cross_ambiguity: lags [" + std::to_string(lags.first) + ", " +
                                std::to_string(lags.last) + "] need samples outside the observation window [" +
                                std::to_string(y.first) + ", " + std::to_string(y_last) + "]");
    }

    AmbiguitySurface a;
    a.k_first = bins.first;
    a.k_count = bins.count;
    a.l_first = lags.first;
    a.l_count = lags.size();
    a.doppler_bin = 1.0 / cfg.block_time();
    a.delay_bin = cfg.sample_period;
    a.doppler_period = doppler_period(x_tilde, nm);
    a.values.assign(static_cast<std::size_t>(a.k_count) * a.l_count, cplx{});

    const FftPlan plan(static_cast<std::size_t>(nm), FftPlan::Direction::Forward);
    const double norm = 1.0 / std::sqrt(static_cast<double>(nm));
    CVector folded(static_cast<std::size_t>(nm));
    for (int l = lags.first; l <= lags.last; ++l) {
        std::fill(folded.begin(), folded.end(), cplx{});
        for (std::size_t lp = 0; lp < x_tilde.size(); ++lp) {
            if (x_tilde[lp] == cplx{}) continue;
            folded[lp % static_cast<std::size_t>(nm)] += y.at(static_cast<int>(lp) + l) * std::conj(x_tilde[lp]);
        }
        plan.execute(folded);
        for (int k = bins.first; k < bins.first + bins.count; ++k) {
            const int bin = ((k % nm) + nm) % nm;
            a.at(k, l) = folded[static_cast<std::size_t>(bin)] * norm;
        }
    }
    return a;
}

AmbiguitySurface cross_ambiguity(const ObservedSamples& y, std::span<const cplx> x_tilde,
                                 const FrameConfig& cfg) {
    return cross_ambiguity(y, x_tilde, cfg, cfg.lag_range(), {0, cfg.nm()});
}

FineAmbiguity fine_ambiguity(const BasebandSignal& s, std::span<const double> tau_grid,
                             std::span<const double> nu_grid) {
    if (tau_grid.empty() || nu_grid.empty()) throw std::invalid_argument("fine_ambiguity: empty grid");
    const double duration = static_cast<double>(s.samples.size()) * s.dt;
    for (double tau : tau_grid) {
        if (!(std::abs(tau) < duration)) {
            throw std::invalid_argument("fine_ambiguity: |τ| = " + std::to_string(std::abs(tau)) +
                                        " s exceeds the signal duration");
        }
    }

    // Pad so neither half-shift pushes energy off the ends.
    double max_tau = 0.0;
    for (double tau : tau_grid) max_tau = std::max(max_tau, std::abs(tau));
    const auto pad = static_cast<std::size_t>(std::ceil(0.5 * max_tau / s.dt)) + 2;
    CVector padded(s.samples.size() + 2 * pad);
    std::copy(s.samples.begin(), s.samples.end(), padded.begin() + static_cast<std::ptrdiff_t>(pad));
    const std::int64_t start = s.start - static_cast<std::int64_t>(pad);
    const auto len = static_cast<Eigen::Index>(padded.size());

    // Products g_τ[n] = s(t_n + τ/2) conj(s(t_n − τ/2)) as rows.
    const auto n_tau = static_cast<Eigen::Index>(tau_grid.size());
    Eigen::MatrixXcd g(n_tau, len);
    for (Eigen::Index i = 0; i < n_tau; ++i) {
        const double half = 0.5 * tau_grid[static_cast<std::size_t>(i)] / s.dt;
        const CVector lead = delay_samples(padded, -half);
        const CVector lag = delay_samples(padded, half);
        for (Eigen::Index n = 0; n < len; ++n) {
            g(i, n) = lead[static_cast<std::size_t>(n)] * std::conj(lag[static_cast<std::size_t>(n)]);
        }
    }
    const auto n_nu = static_cast<Eigen::Index>(nu_grid.size());
    Eigen::MatrixXcd kernel(len, n_nu);
    for (Eigen::Index j = 0; j < n_nu; ++j) {
        const double nu = nu_grid[static_cast<std::size_t>(j)];
        for (Eigen::Index n = 0; n < len; ++n) {
            const double t = static_cast<double>(start + n) * s.dt;
            kernel(n, j) = std::polar(s.dt, -2.0 * kPi * nu * t);
        }
    }
    const Eigen::MatrixXcd a = g * kernel;  // [τ][ν]

    FineAmbiguity out;
    out.tau.assign(tau_grid.begin(), tau_grid.end());
    out.nu.assign(nu_grid.begin(), nu_grid.end());
    out.values.resize(static_cast<std::size_t>(n_tau * n_nu));
    for (Eigen::Index j = 0; j < n_nu; ++j) {
        for (Eigen::Index i = 0; i < n_tau; ++i) {
            out.values[static_cast<std::size_t>(j * n_tau + i)] = a(i, j);
        }
    }
    return out;
}

}  // namespace otfsr
