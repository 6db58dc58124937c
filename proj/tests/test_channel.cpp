// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "otfsr/channel.hpp"
#include "otfsr/receiver.hpp"

using namespace otfsr;

namespace {

BasebandSignal test_frame(const FrameConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const CVector x = transmit_samples(oracle::random_grid(cfg.n_doppler, cfg.m_delay, rng), cfg);
    return assemble_frame(synthesize(x, cfg), cfg).signal;
}

ChannelScene one_path(cplx alpha, double t_d, double f_d) {
    ChannelScene s;
    s.paths.push_back({alpha, t_d, f_d});
    return s;
}

}  // namespace

TEST_CASE("scene validation") {
    FrameConfig cfg;
    cfg.window = WindowShape::rect();
    const double ts = cfg.sample_period;
    CHECK_NOTHROW(validate_scene(one_path(1.0, 100 * ts, 0.0), cfg));
    CHECK_THROWS_AS(validate_scene(one_path(1.0, 64 * ts, 0.0), cfg), std::invalid_argument);
    CHECK_THROWS_AS(validate_scene(one_path(1.0, 320 * ts, 0.0), cfg), std::invalid_argument);
    CHECK_NOTHROW(validate_scene(one_path(1.0, 3 * ts, 0.0), cfg, Gating::Disabled));
    CHECK_THROWS_AS(validate_scene(one_path(1.0, 100 * ts, 0.6 / ts), cfg), std::invalid_argument);
    CHECK_THROWS_AS(validate_scene(ChannelScene{}, cfg), std::invalid_argument);
    ChannelScene many;
    many.paths.assign(kMaxPaths + 1, PathParams{1.0, 100 * ts, 0.0});
    CHECK_THROWS_AS(validate_scene(many, cfg), std::invalid_argument);
    ChannelScene noisy = one_path(1.0, 100 * ts, 0.0);
    noisy.noise_sigma = -1.0;
    CHECK_THROWS_AS(validate_scene(noisy, cfg), std::invalid_argument);
    const DelayGate g = delay_gate(cfg);
    CHECK(g.lo == doctest::Approx(cfg.block_time()));
    CHECK(g.hi == doctest::Approx(5 * cfg.block_time()));
}

TEST_CASE("identity and integer-delay channels") {
    FrameConfig cfg;
    const BasebandSignal s = test_frame(cfg, 1);
    const BasebandSignal same = apply_continuous_channel(s, one_path(1.0, 0.0, 0.0), cfg, Gating::Disabled);
    CHECK(same.samples == s.samples);

    const double ts = cfg.sample_period;
    const BasebandSignal delayed = apply_continuous_channel(s, one_path(1.0, 7 * ts, 0.0), cfg, Gating::Disabled);
    for (std::int64_t n = s.start; n < s.end(); ++n) {
        CHECK(std::abs(delayed.at_index(n) - s.at_index(n - 7 * cfg.oversampling)) < 1e-15);
    }
}

TEST_CASE("continuous channel superposition") {
    FrameConfig cfg;
    cfg.pulse = PulseShape::rrc(0.25);
    const BasebandSignal s = test_frame(cfg, 2);
    const double ts = cfg.sample_period;
    ChannelScene both;
    both.paths = {{cplx(0.7, 0.2), 100.3 * ts, 1500.0}, {cplx(-0.4, 0.9), 150.75 * ts, -3200.0}};
    const BasebandSignal r = apply_continuous_channel(s, both, cfg);
    const BasebandSignal r0 = apply_continuous_channel(s, one_path(both.paths[0].alpha, both.paths[0].t_d, both.paths[0].f_d), cfg);
    const BasebandSignal r1 = apply_continuous_channel(s, one_path(both.paths[1].alpha, both.paths[1].t_d, both.paths[1].f_d), cfg);
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        CHECK(std::abs(r.samples[i] - (r0.samples[i] + r1.samples[i])) < 1e-12);
    }
}

TEST_CASE("Doppler phase convention against a pointwise tone") {
    FrameConfig cfg;
    const double f0 = 12345.0;
    BasebandSignal tone;
    tone.dt = cfg.dt();
    tone.start = -40;
    tone.samples.resize(4000);
    auto s_at = [&](double t) { return std::polar(1.0, 2.0 * kPi * f0 * t); };
    for (std::size_t i = 0; i < tone.samples.size(); ++i) {
        tone.samples[i] = s_at(static_cast<double>(tone.start + static_cast<std::int64_t>(i)) * tone.dt);
    }
    const cplx alpha(0.6, -0.3);
    const double t_d = 25 * cfg.sample_period;  // integer number of samples, exact shift
    const double f_d = 2100.0;
    const BasebandSignal r = apply_continuous_channel(tone, one_path(alpha, t_d, f_d), cfg, Gating::Disabled);
    const auto shift = static_cast<std::int64_t>(std::llround(t_d / cfg.dt()));
    for (std::int64_t n = tone.start + shift; n < tone.end(); n += 37) {
        const double t = static_cast<double>(n) * cfg.dt();
        const cplx expect = alpha * s_at(t - t_d) * std::polar(1.0, 2.0 * kPi * f_d * (t - t_d / 2.0));
        CHECK(std::abs(r.at_index(n) - expect) < 1e-12);
    }
}

TEST_CASE("awgn") {
    FrameConfig cfg;
    BasebandSignal zero{CVector(1'000'000), cfg.dt(), 0};
    CHECK(add_awgn(zero, 0.0, 5).samples == zero.samples);
    const BasebandSignal a = add_awgn(zero, 0.3, 5);
    const BasebandSignal b = add_awgn(zero, 0.3, 5);
    CHECK(a.samples == b.samples);
    double var = 0.0;
    for (const cplx& v : a.samples) var += std::norm(v);
    var /= static_cast<double>(a.samples.size());
    CHECK(std::abs(var - 0.09) < 0.01 * 0.09);
    CHECK_THROWS(add_awgn(zero, -0.1, 1));
}

TEST_CASE("channel matrix structure") {
    const double ts = 1e-6;
    const PulseShape rect = PulseShape::rect();
    const Eigen::MatrixXcd toep = channel_matrix(3.4 * ts, 0.0, 20, rect, ts);
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) CHECK(toep(i, j) == cplx(pulse_matched_autocorr(rect, (i - j) - 3.4)));
    }
    const Eigen::MatrixXcd eye = channel_matrix(0.0, 0.0, 16, PulseShape::sinc(), ts);
    CHECK((eye - Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-15);

    // Entry formula from expanding D(f/2) Toep D(f/2), checked at random cells.
    const double t_d = 2.3 * ts;
    const double f_d = 4100.0;
    const PulseShape rrc = PulseShape::rrc(0.25);
    const Eigen::MatrixXcd h = channel_matrix(t_d, f_d, 30, rrc, ts);
    Eigen::VectorXcd d(30);
    for (int l = 0; l < 30; ++l) d(l) = std::polar(1.0, 2.0 * kPi * (f_d / 2.0) * l * ts);
    Eigen::MatrixXcd t(30, 30);
    for (int i = 0; i < 30; ++i) {
        for (int j = 0; j < 30; ++j) t(i, j) = pulse_matched_autocorr(rrc, (i - j) - t_d / ts);
    }
    const Eigen::MatrixXcd product = d.asDiagonal() * t * d.asDiagonal();
    CHECK((h - product).cwiseAbs().maxCoeff() < 1e-13);
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const int i = static_cast<int>(rng() % 30);
        const int j = static_cast<int>(rng() % 30);
        const cplx expect = std::polar(1.0, kPi * f_d * (i + j) * ts) * pulse_matched_autocorr(rrc, (i - j) - t_d / ts);
        CHECK(std::abs(h(i, j) - expect) < 1e-13);
    }
}

TEST_CASE("discrete channel actions") {
    const double ts = 1e-6;
    std::mt19937_64 rng(8);
    const CVector x = dd_to_td(oracle::random_grid(4, 4, rng));
    ChannelScene s = one_path(cplx(0.5, 0.5), 5 * ts, 0.0);
    const CVector y = apply_discrete_channel(x, s, 40, PulseShape::sinc(), ts);
    for (int i = 0; i < 40; ++i) {
        const cplx expect = i >= 5 && i < 21 ? s.paths[0].alpha * x[static_cast<std::size_t>(i - 5)] : cplx{};
        CHECK(std::abs(y[static_cast<std::size_t>(i)] - expect) < 1e-14);
    }
    s.paths[0].alpha *= 2.0;
    const CVector y2 = apply_discrete_channel(x, s, 40, PulseShape::sinc(), ts);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y2[i] == 2.0 * y[i]);

    const ObservedSamples obs = observe(y, {10, 19});
    CHECK(obs.first == 10);
    CHECK(obs.values.size() == 10);
    CHECK(obs.at(12) == y[12]);
    CHECK_THROWS(observe(y, {30, 45}));
    CHECK_THROWS(apply_discrete_channel(x, s, 10, PulseShape::sinc(), ts));
}

TEST_CASE("discrete and continuous channels agree for small Doppler") {
    FrameConfig cfg;
    cfg.pulse = PulseShape::rrc(0.25);
    cfg.pulse_tail = 32.0;
    const int frame_len = cfg.blocks_per_pri * cfg.nm();
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const DelayGate gate = delay_gate(cfg);
    for (int trial = 0; trial < 4; ++trial) {
        const CVector x = transmit_samples(oracle::random_grid(8, 8, rng), cfg);
        const ChannelScene s = one_path(std::polar(1.0, 6.0 * u(rng)), gate.lo + (gate.hi - gate.lo) * (0.1 + 0.8 * u(rng)),
                                        (2.0 * u(rng) - 1.0) * 0.01 / cfg.sample_period);
        const PulseFrame tx = assemble_frame(synthesize(x, cfg), cfg);
        const ObservedSamples yc = matched_filter_sample(apply_continuous_channel(tx.signal, s, cfg), cfg);
        const ObservedSamples yd = observe(apply_discrete_channel(x, s, frame_len, cfg.pulse, cfg.sample_period), cfg.observation());
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < yc.values.size(); ++i) {
            num += std::norm(yc.values[i] - yd.values[i]);
            den += std::norm(yd.values[i]);
        }
        CHECK(std::sqrt(num / den) <= 1e-3);
    }
}

TEST_CASE("circulant discrepancy") {
    const double ts = 1e-6;
    const PulseShape sinc = PulseShape::sinc();
    const CirculantDiscrepancy z = circulant_discrepancy(2.3 * ts, 0.0, 32, sinc, ts);
    CHECK(z.delta.cwiseAbs().maxCoeff() == 0.0);

    const int size = 32;
    const double f_d = 0.2 / (size * ts);
    const CirculantDiscrepancy c = circulant_discrepancy(2.3 * ts, f_d, size, sinc, ts);
    const cplx phase = std::polar(1.0, -kPi * f_d * size * ts);
    double wrapped_max = 0.0;
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            if (i >= j) {
                CHECK(c.delta(i, j) == cplx{});
                continue;
            }
            wrapped_max = std::max(wrapped_max, std::abs(c.circulant(i, j)));
            if (std::abs(c.circulant(i, j)) > 1e-6) CHECK(std::abs(c.periodic(i, j) / c.circulant(i, j) - phase) < 1e-10);
        }
    }
    CHECK(c.delta.cwiseAbs().maxCoeff() == doctest::Approx(std::abs(phase - 1.0) * wrapped_max).epsilon(1e-12));

    // Rect autocorrelation has support |τ| < 1: at t_D = 0 no energy reaches the wrapped corner.
    const CirculantDiscrepancy r = circulant_discrepancy(0.0, f_d, size, PulseShape::rect(), ts);
    CHECK(r.delta.cwiseAbs().maxCoeff() == 0.0);
    const CirculantDiscrepancy r5 = circulant_discrepancy(5 * ts, f_d, size, PulseShape::rect(), ts);
    CHECK(r5.delta.cwiseAbs().maxCoeff() == doctest::Approx(std::abs(phase - 1.0)));
}
