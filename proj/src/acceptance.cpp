// SPDX-License-Identifier: Apache-2.0
#include "otfsr/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "otfsr/channel.hpp"
#include "otfsr/estimator.hpp"
#include "otfsr/harness.hpp"
#include "otfsr/otfs.hpp"
#include "otfsr/receiver.hpp"
#include "otfsr/waveforms.hpp"

namespace otfsr::acceptance {
namespace {

// Pinned tolerances and budgets, one block per criterion.
constexpr double kC1Tol = 1e-6;
constexpr int kC1Points = 2001;
constexpr double kC1Budget = 5.0;

constexpr double kC2NyquistTol = 1e-9;
constexpr double kC2GramTol = 2e-3;
constexpr int kC2Oversampling = 16;
constexpr double kC2SincTail = 1024.0;  // T_s; ±16 T_s leaves 7.5e-2 of truncation error
constexpr double kC2Budget = 60.0;

constexpr double kC3Tol = 1e-3;
constexpr int kC3Scenes = 20;
constexpr double kC3MaxDoppler = 0.01;  // × 1/T_s
constexpr double kC3Budget = 60.0;

constexpr double kC4PhaseTol = 1e-10;
constexpr double kC4DopplerSpan = 0.2;  // f_D·L·T_s
constexpr int kC4Size = 64;

constexpr int kC5Trials = 100;

constexpr double kC6LinearMin = 0.01;
constexpr double kC6RrcTol = 1e-5;
constexpr double kC6EndpointTol = 1e-3;
constexpr double kC6Budget = 120.0;

constexpr int kC7Sims = 100;
constexpr double kC7Factor = 2.0;
constexpr double kC7Budget = 300.0;

constexpr double kC8Floor = 1e-4;  // × peak; ideal cut is zero over most of ν > 0
constexpr int kC8Points = 101;
constexpr int kC8Span = 9;
constexpr double kC8Budget = 120.0;

constexpr std::uint64_t kSeed = 20240601;

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

template <typename F>
Outcome timed(int id, std::string name, double budget, F&& body) {
    Outcome o;
    o.id = id;
    o.name = std::move(name);
    o.budget_seconds = budget;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.passed = false;
        o.detail = std::string("exception: ") + e.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget > 0.0 && o.seconds > budget) {
        o.passed = false;
        o.detail += "; over the " + fmt("%.0f", budget) + " s budget";
    }
    return o;
}

double ratio(double a, double b) {
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    return lo > 0.0 ? hi / lo : (hi > 0.0 ? INFINITY : 1.0);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

// |A(τ = 0, ν_k)| for k > 0 from an exported map.
std::vector<double> doppler_cut(const std::filesystem::path& csv) {
    std::istringstream in(slurp(csv));
    std::string line;
    std::vector<std::pair<int, double>> cut;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'k') continue;
        int k = 0;
        int l = 0;
        double re = 0.0;
        double im = 0.0;
        double mag = 0.0;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf", &k, &l, &re, &im, &mag) != 5) {
            throw std::runtime_error("malformed row in " + csv.string());
        }
        if (l == 0 && k > 0) cut.emplace_back(k, mag);
    }
    std::sort(cut.begin(), cut.end());
    std::vector<double> out;
    for (const auto& [k, v] : cut) out.push_back(v);
    return out;
}

}  // namespace

Outcome window_autocorr_closed_form() {
    return timed(1, "window autocorrelation closed form vs quadrature", kC1Budget, [](Outcome& o) {
        double worst = 0.0;
        double worst_peak = 0.0;
        for (double beta : {0.1, 0.25, 0.5}) {
            for (int i = 0; i < kC1Points; ++i) {
                const double nu = -1.0 + 2.0 * i / (kC1Points - 1);
                worst = std::max(worst, std::abs(window_autocorr_rrc(nu, beta) - numeric_spectrum_autocorr(nu, beta)));
            }
            worst_peak = std::max(worst_peak, std::abs(window_autocorr_rrc(0.0, beta) - 1.0 / (1.0 + beta)));
        }
        o.passed = worst <= kC1Tol && worst_peak <= kC1Tol;
        o.detail = "max deviation " + fmt("%.3g", worst) + ", peak deviation " + fmt("%.3g", worst_peak) + " (tol " +
                   fmt("%.0e", kC1Tol) + ")";
    });
}

Outcome nyquist_orthonormality() {
    return timed(2, "Nyquist and basis orthonormality", kC2Budget, [](Outcome& o) {
        double nyq = 0.0;
        for (int k = 1; k <= 64; ++k) {
            nyq = std::max(nyq, std::abs(pulse_matched_autocorr(PulseShape::sinc(), k)));
            nyq = std::max(nyq, std::abs(pulse_matched_autocorr(PulseShape::sinc(), -k)));
        }
        FrameConfig cfg;
        cfg.pulse = PulseShape::sinc();
        cfg.pulse_tail = kC2SincTail;
        cfg.window = WindowShape::rect();
        cfg.oversampling = kC2Oversampling;
        std::vector<std::pair<int, int>> all;
        for (int k = 0; k < cfg.n_doppler; ++k) {
            for (int l = 0; l < cfg.m_delay; ++l) all.emplace_back(k, l);
        }
        const Eigen::MatrixXcd g = orthonormality_gram(cfg, all);
        const double gram = (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
        o.passed = nyq < kC2NyquistTol && gram <= kC2GramTol;
        o.detail = "sinc at integers " + fmt("%.3g", nyq) + ", 64x64 max|G - I| " + fmt("%.3g", gram) + " (tol " +
                   fmt("%.0e", kC2GramTol) + ")";
    });
}

Outcome channel_cross_validation() {
    return timed(3, "discrete vs continuous channel", kC3Budget, [](Outcome& o) {
        FrameConfig cfg;
        cfg.pulse = PulseShape::rrc(0.25);
        cfg.pulse_tail = 32.0;
        const DelayGate gate = delay_gate(cfg);
        const int frame_len = cfg.blocks_per_pri * cfg.nm();
        std::mt19937_64 rng(stream_seed(kSeed, 3));
        double worst = 0.0;
        for (int scene = 0; scene < kC3Scenes; ++scene) {
            DDGrid grid(cfg.n_doppler, cfg.m_delay);
            for (int k = 0; k < cfg.n_doppler; ++k) {
                for (int l = 0; l < cfg.m_delay; ++l) grid.at(k, l) = cplx(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
            }
            const CVector x = transmit_samples(grid, cfg);
            ChannelScene s;
            const double t_d = gate.lo + (gate.hi - gate.lo) * (0.05 + 0.9 * uniform01(rng));
            const double f_d = (2.0 * uniform01(rng) - 1.0) * kC3MaxDoppler / cfg.sample_period;
            s.paths.push_back({std::polar(1.0, 2.0 * kPi * uniform01(rng)), t_d, f_d});
            const PulseFrame tx = assemble_frame(synthesize(x, cfg), cfg);
            const ObservedSamples yc = matched_filter_sample(apply_continuous_channel(tx.signal, s, cfg), cfg);
            const ObservedSamples yd =
                observe(apply_discrete_channel(x, s, frame_len, cfg.pulse, cfg.sample_period), cfg.observation());
            double num = 0.0;
            double den = 0.0;
            for (std::size_t i = 0; i < yc.values.size(); ++i) {
                num += std::norm(yc.values[i] - yd.values[i]);
                den += std::norm(yd.values[i]);
            }
            worst = std::max(worst, std::sqrt(num / den));
        }
        o.passed = worst <= kC3Tol;
        o.detail = "worst relative error " + fmt("%.3g", worst) + " over 20 scenes, rrc pulse (tol " +
                   fmt("%.0e", kC3Tol) + ")";
    });
}

Outcome circulant_discrepancy_phase() {
    return timed(4, "circulant discrepancy", 0.0, [](Outcome& o) {
        const double ts = 1e-6;
        const double t_d = 2.3 * ts;
        const CirculantDiscrepancy zero = circulant_discrepancy(t_d, 0.0, kC4Size, PulseShape::sinc(), ts);
        const double at_zero = zero.delta.cwiseAbs().maxCoeff();

        const double f_d = kC4DopplerSpan / (kC4Size * ts);
        const CirculantDiscrepancy c = circulant_discrepancy(t_d, f_d, kC4Size, PulseShape::sinc(), ts);
        const cplx expect = std::polar(1.0, -kPi * f_d * kC4Size * ts);
        double worst = 0.0;
        int wrapped = 0;
        for (int i = 0; i < kC4Size; ++i) {
            for (int j = i + 1; j < kC4Size; ++j) {
                if (std::abs(c.circulant(i, j)) < 1e-12) continue;
                worst = std::max(worst, std::abs(c.periodic(i, j) / c.circulant(i, j) - expect));
                ++wrapped;
            }
        }
        o.passed = at_zero == 0.0 && wrapped > 0 && worst <= kC4PhaseTol;
        o.detail = "f_D = 0: max|delta| " + fmt("%.3g", at_zero) + "; wrapped phase error " + fmt("%.3g", worst) +
                   " over " + std::to_string(wrapped) + " elements";
    });
}

Outcome integer_bin_detection() {
    return timed(5, "integer-bin detection", 0.0, [](Outcome& o) {
        const ExperimentConfig cfg;
        const DopplerBins bins = detection_bins(cfg.frame);
        int passed = 0;
        int total = 0;
        for (int p = 1; p <= 5; ++p) {
            for (int trial = 0; trial < kC5Trials; ++trial) {
                std::mt19937_64 rng(stream_seed(kSeed, (static_cast<std::uint64_t>(p) << 32) | trial));
                const auto truth = draw_scene(cfg, p, rng, {false, true, true});
                ChannelScene scene;
                std::set<std::pair<int, int>> want;
                for (const TruthPath& t : truth) {
                    scene.paths.push_back(t.params(cfg.frame));
                    want.emplace(t.k, t.l);
                }
                const PipelineResult r = detect_scene(scene, cfg.frame, p, cfg.cfar_factor);
                std::set<std::pair<int, int>> got;
                for (const Candidate& c : r.candidates.entries) {
                    const int k = ((c.k - bins.first) % bins.count + bins.count) % bins.count + bins.first;
                    got.emplace(k, c.l);
                }
                passed += got == want && r.candidates.entries.size() == want.size();
                ++total;
            }
        }
        o.passed = passed == total;
        o.detail = std::to_string(passed) + "/" + std::to_string(total) + " trials (100 per P = 1..5) exact";
    });
}

Outcome doppler_sweep() {
    return timed(6, "fractional Doppler sweep", kC6Budget, [](Outcome& o) {
        const ExperimentConfig cfg;
        const auto lin = sweep_eps_f(cfg, ModelKind::Linear);
        const auto rrc = sweep_eps_f(cfg, ModelKind::RrcAutocorr);
        auto max_err = [](const std::vector<SweepRow>& rows) {
            double m = 0.0;
            for (const SweepRow& r : rows) m = std::max(m, std::abs(r.error));
            return m;
        };
        auto end_err = [](const std::vector<SweepRow>& rows) {
            return std::max(std::abs(rows.front().error), std::abs(rows.back().error));
        };
        const double lin_max = max_err(lin);
        const double rrc_max = max_err(rrc);
        const double lin_end = end_err(lin);
        const double rrc_end = end_err(rrc);
        o.passed = lin_max > kC6LinearMin && rrc_max <= kC6RrcTol && lin_end <= kC6EndpointTol &&
                   rrc_end <= kC6EndpointTol;
        o.detail = "linear max " + fmt("%.4g", lin_max) + ", rrc max " + fmt("%.3g", rrc_max) + ", endpoint errors linear " +
                   fmt("%.4g", lin_end) + " rrc " + fmt("%.3g", rrc_end) + " (endpoint tol " +
                   fmt("%.0e", kC6EndpointTol) + ")";
    });
}

Outcome rmse_ordering() {
    return timed(7, "RMSE ordering in exact mode", kC7Budget, [](Outcome& o) {
        ExperimentConfig cfg;
        cfg.n_sim = kC7Sims;
        cfg.seed = kSeed;
        cfg.input_mode = InputMode::Exact;
        const std::vector<RmseRow> rows = run_montecarlo(cfg);
        bool order = true;
        bool alpha_ok = true;
        bool eps_t_ok = true;
        double worst_alpha = 1.0;
        double worst_eps_t = 1.0;
        for (int p = cfg.paths_min; p <= cfg.paths_max; ++p) {
            const RmseRow* lin = nullptr;
            const RmseRow* rrc = nullptr;
            for (const RmseRow& r : rows) {
                if (r.paths != p) continue;
                (r.model == ModelKind::Linear ? lin : rrc) = &r;
            }
            if (lin == nullptr || rrc == nullptr) throw std::runtime_error("missing RMSE row");
            order = order && lin->rmse_eps_f > rrc->rmse_eps_f;
            const double ra = ratio(lin->rmse_alpha, rrc->rmse_alpha);
            const double rt = ratio(lin->rmse_eps_t, rrc->rmse_eps_t);
            worst_alpha = std::max(worst_alpha, ra);
            worst_eps_t = std::max(worst_eps_t, rt);
            alpha_ok = alpha_ok && ra <= kC7Factor;
            eps_t_ok = eps_t_ok && rt <= kC7Factor;
        }
        o.passed = order && alpha_ok && eps_t_ok;
        o.detail = std::string("eps_f ordering ") + (order ? "holds" : "violated") + "; worst alpha ratio " +
                   fmt("%.3g", worst_alpha) + ", worst eps_t ratio " + fmt("%.3g", worst_eps_t) + " (limit 2)";
    });
}

Outcome ambiguity_oscillation(const std::filesystem::path& scratch) {
    return timed(8, "ambiguity oscillation", kC8Budget, [&](Outcome& o) {
        ExperimentConfig cfg;
        cfg.map_points = kC8Points;
        cfg.map_window_span = kC8Span;
        const auto dir = scratch / "maps";
        export_ambiguity_maps(cfg, dir);
        const int rrc_maxima = count_local_maxima(doppler_cut(dir / "ambiguity_rect_rrc.csv"), kC8Floor);
        const int rect_maxima = count_local_maxima(doppler_cut(dir / "ambiguity_rect_rect.csv"), kC8Floor);
        o.passed = rrc_maxima == 0 && rect_maxima >= 2;
        o.detail = "interior maxima on nu > 0: rect/rrc " + std::to_string(rrc_maxima) + ", rect/rect " +
                   std::to_string(rect_maxima) + " (floor 1e-4 of peak)";
    });
}

Outcome determinism(const std::filesystem::path& scratch) {
    return timed(9, "montecarlo determinism", 0.0, [&](Outcome& o) {
        ExperimentConfig cfg;
        cfg.seed = kSeed;
        const auto a = scratch / "determinism_a.csv";
        const auto b = scratch / "determinism_b.csv";
        atomic_write(a, rmse_csv(run_montecarlo(cfg)));
        atomic_write(b, rmse_csv(run_montecarlo(cfg)));
        const std::string sa = slurp(a);
        o.passed = !sa.empty() && sa == slurp(b);
        o.detail = std::to_string(sa.size()) + " bytes, " + (o.passed ? "identical" : "different");
    });
}

std::vector<Outcome> run_all(const std::filesystem::path& scratch) {
    std::filesystem::create_directories(scratch);
    return {window_autocorr_closed_form(),
            nyquist_orthonormality(),
            channel_cross_validation(),
            circulant_discrepancy_phase(),
            integer_bin_detection(),
            doppler_sweep(),
            rmse_ordering(),
            ambiguity_oscillation(scratch),
            determinism(scratch)};
}

std::string format(const Outcome& o) {
    char head[128];
    std::snprintf(head, sizeof head, "%s [%d] %s (%.2f s): ", o.passed ? "PASS" : "FAIL", o.id, o.name.c_str(),
                  o.seconds);
    return head + o.detail;
}

}  // namespace otfsr::acceptance
