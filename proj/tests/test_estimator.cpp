// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "otfsr/estimator.hpp"
#include "otfsr/waveforms.hpp"

using namespace otfsr;

namespace {

AmbiguitySurface blank_surface(int k_first, int k_count, int l_first, int l_count, int period = 0) {
    AmbiguitySurface s;
    s.k_first = k_first;
    s.k_count = k_count;
    s.l_first = l_first;
    s.l_count = l_count;
    s.doppler_period = period == 0 ? k_count : period;
    s.doppler_bin = 1.0;
    s.delay_bin = 1.0;
    s.values.assign(static_cast<std::size_t>(k_count) * static_cast<std::size_t>(l_count), cplx{});
    return s;
}

// Separable bump |A| = a·g(k − k0)·g(ℓ − ℓ0) with a peaked profile, plus a small floor.
void add_peak(AmbiguitySurface& s, int k0, int l0, double a) {
    static const double profile[] = {1.0, 0.4, 0.1};
    for (int dk = -2; dk <= 2; ++dk) {
        for (int dl = -2; dl <= 2; ++dl) {
            const int k = k0 + dk;
            const int l = l0 + dl;
            if (k < s.k_first || k > s.k_last() || l < s.l_first || l > s.l_last()) continue;
            s.at(k, l) += a * profile[std::abs(dk)] * profile[std::abs(dl)];
        }
    }
}

}  // namespace

TEST_CASE("coarse estimate on synthetic surfaces") {
    AmbiguitySurface zero = blank_surface(-4, 8, 80, 30);
    CHECK(coarse_estimate(zero).entries.empty());

    AmbiguitySurface one = blank_surface(-4, 8, 80, 30);
    add_peak(one, 1, 95, 0.8);
    const CandidateList c1 = coarse_estimate(one);
    REQUIRE(c1.entries.size() == 1);
    CHECK(c1.entries[0].k == 1);
    CHECK(c1.entries[0].l == 95);
    CHECK(c1.entries[0].magnitude == doctest::Approx(0.8));

    AmbiguitySurface two = blank_surface(-4, 8, 80, 40);
    add_peak(two, 2, 110, 1.0);
    add_peak(two, -2, 90, 1.0);
    const CandidateList c2 = coarse_estimate(two);
    REQUIRE(c2.entries.size() == 2);
    CHECK(c2.entries[0].l == 90);  // equal magnitudes: smaller ℓ first
    CHECK(c2.entries[1].l == 110);

    AmbiguitySurface scaled = two;
    for (cplx& v : scaled.values) v *= 37.5;
    const CandidateList c3 = coarse_estimate(scaled);
    REQUIRE(c3.entries.size() == c2.entries.size());
    for (std::size_t i = 0; i < c2.entries.size(); ++i) {
        CHECK(c3.entries[i].k == c2.entries[i].k);
        CHECK(c3.entries[i].l == c2.entries[i].l);
    }

    CHECK(coarse_estimate(two, 1).entries.size() == 1);
    CHECK_THROWS(coarse_estimate(two, 0));
}

TEST_CASE("coarse estimate wraps Doppler neighbourhoods on periodic surfaces") {
    // Peak on the first Doppler row: its k−1 neighbour is the last row.
    AmbiguitySurface s = blank_surface(-4, 8, 0, 20);
    s.at(-4, 10) = 1.0;
    s.at(3, 10) = 1.5;  // larger circular neighbour suppresses the peak at k = −4
    const CandidateList c = coarse_estimate(s);
    REQUIRE(c.entries.size() == 1);
    CHECK(c.entries[0].k == 3);
}

TEST_CASE("coarse estimate keeps the pilot's delay ghosts when max_paths is loose") {
    // Pilot comb: an integer path at (0, ℓ0) leaves ghosts of height (8−n)/8 at ℓ0 ± 8n.
    AmbiguitySurface s = blank_surface(-4, 8, 0, 100);
    for (int n = -5; n <= 5; ++n) s.at(0, 50 + 8 * n) = (8.0 - std::abs(n)) / 8.0;
    CHECK(coarse_estimate(s, 1).entries.size() == 1);
    CHECK(coarse_estimate(s, 1).entries[0].l == 50);
    CHECK(coarse_estimate(s, 10).entries.size() == 10);
}

TEST_CASE("model ambiguity values") {
    const InterpolationModel lin = InterpolationModel::linear();
    const InterpolationModel rrc = InterpolationModel::rrc(0.25);
    CHECK(model_ambiguity(lin, 0.0, 0.0).value == 1.0);
    CHECK(model_ambiguity(rrc, 0.0, 0.0).value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(model_ambiguity(lin, 0.5, 0.5).value == doctest::Approx(pulse_matched_autocorr(lin.pulse, 0.5) * 0.5));
    CHECK(model_ambiguity(rrc, 0.0, 0.4).value == doctest::Approx(1.25 * window_autocorr_rrc(0.4, 0.25)).epsilon(1e-14));
    CHECK(model_ambiguity(rrc, 0.3, -0.4).value == doctest::Approx(0.7 * 1.25 * window_autocorr_rrc(0.4, 0.25)));

    const ModelValue out = model_ambiguity(rrc, 1.2, 0.1);
    CHECK_FALSE(out.in_range);
    CHECK(out.value == 0.0);
    CHECK_FALSE(model_ambiguity(lin, 0.0, -1.01).in_range);

    CHECK(parse_model_kind("linear") == ModelKind::Linear);
    CHECK(parse_model_kind(to_string(ModelKind::RrcAutocorr)) == ModelKind::RrcAutocorr);
    CHECK_THROWS(parse_model_kind("cubic"));
}

TEST_CASE("model patch layout: rows Doppler, columns delay") {
    const InterpolationModel rrc = InterpolationModel::rrc(0.25);
    const PeakPatch p = model_patch(rrc, 0.9, 0.2, 0.7, 3, 100);
    CHECK(p.k0 == 3);
    CHECK(p.l0 == 100);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            CHECK(p.at(i, j) == doctest::Approx(0.9 * pulse_matched_autocorr(rrc.pulse, j - 0.2) *
                                                1.25 * window_autocorr_rrc(i - 0.7, 0.25)));
        }
    }
}

TEST_CASE("objective properties") {
    const InterpolationModel rrc = InterpolationModel::rrc(0.25);
    const PeakPatch p = model_patch(rrc, 0.8, 0.35, 0.6);
    CHECK(objective(p, 0.8, 0.35, 0.6, rrc) == doctest::Approx(0.0));
    double sum_sq = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) sum_sq += p.at(i, j) * p.at(i, j);
    }
    CHECK(objective(p, 0.0, 0.1, 0.9, rrc) == doctest::Approx(sum_sq));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) CHECK(objective(p, 2.0 * u(rng), u(rng), u(rng), rrc) >= 0.0);
}

TEST_CASE("fractional estimate recovers the generating model") {
    const InterpolationModel rrc = InterpolationModel::rrc(0.25);
    const FractionalFit f = fractional_estimate(model_patch(rrc, 1.0, 0.3, 0.7), rrc);
    CHECK(std::abs(f.alpha - 1.0) <= 1e-6);
    CHECK(std::abs(f.eps_t - 0.3) <= 1e-6);
    CHECK(std::abs(f.eps_f - 0.7) <= 1e-6);
    CHECK(f.converged);

    const FractionalFit corner = fractional_estimate(model_patch(rrc, 0.6, 0.0, 0.0), rrc);
    CHECK(corner.alpha == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(std::abs(corner.eps_t) <= 1e-6);
    // α absorbs the Doppler drop of row 0, leaving L ~ W(1 − ε_f)² ~ ε_f⁶: resolvable to ~1e-5 in double.
    CHECK(std::abs(corner.eps_f) <= 1e-4);

    const InterpolationModel lin = InterpolationModel::linear();
    const FractionalFit lf = fractional_estimate(model_patch(lin, 0.7, 0.45, 0.2), lin);
    CHECK(std::abs(lf.eps_t - 0.45) <= 1e-6);
    CHECK(std::abs(lf.eps_f - 0.2) <= 1e-6);
}

TEST_CASE("linear fit of rrc-window data is biased mid-range") {
    const InterpolationModel rrc = InterpolationModel::rrc(0.25);
    const InterpolationModel lin = InterpolationModel::linear();
    for (double eps_f : {0.2, 0.3, 0.4, 0.6, 0.7, 0.8}) {
        const FractionalFit f = fractional_estimate(model_patch(rrc, 1.0, 0.0, eps_f), lin);
        CHECK(std::abs(f.eps_f - eps_f) > 0.01);
    }
}

TEST_CASE("fit is scale equivariant") {
    const InterpolationModel rrc = InterpolationModel::rrc(0.25);
    const InterpolationModel lin = InterpolationModel::linear();
    const PeakPatch base = model_patch(rrc, 0.9, 0.15, 0.55);
    for (const InterpolationModel& m : {rrc, lin}) {
        const FractionalFit f1 = fractional_estimate(base, m);
        PeakPatch scaled = base;
        for (auto& row : scaled.v) {
            for (double& v : row) v *= 4.0;
        }
        const FractionalFit f4 = fractional_estimate(scaled, m);
        CHECK(std::abs(f4.alpha - 4.0 * f1.alpha) <= 1e-8 * 4.0);
        CHECK(std::abs(f4.eps_t - f1.eps_t) <= 1e-8);
        CHECK(std::abs(f4.eps_f - f1.eps_f) <= 1e-8);
    }
}

TEST_CASE("doppler sweep inverse crime") {
    const InterpolationModel rrc = InterpolationModel::rrc(0.25);
    double worst = 0.0;
    double lin_sq = 0.0;
    double rrc_sq = 0.0;
    for (int i = 1; i <= 99; ++i) {
        const double eps_f = 0.01 * i;
        const PeakPatch p = model_patch(rrc, 1.0, 0.0, eps_f);
        const FractionalFit f = fractional_estimate(p, rrc);
        worst = std::max(worst, std::abs(f.eps_f - eps_f));
        rrc_sq += std::pow(f.eps_f - eps_f, 2);
        lin_sq += std::pow(fractional_estimate(p, InterpolationModel::linear()).eps_f - eps_f, 2);
    }
    CHECK(worst <= 1e-5);
    CHECK(lin_sq > rrc_sq);
}

TEST_CASE("patch extraction and folding") {
    AmbiguitySurface s = blank_surface(-4, 8, 80, 20);
    s.at(0, 90) = 2.0;
    s.at(-1, 90) = 0.5;
    s.at(1, 90) = 1.0;
    s.at(0, 89) = 1.2;
    s.at(0, 91) = 0.3;
    s.at(1, 89) = 0.7;
    const PeakPatch p = extract_patch(s, 0, 90, 2.0);
    CHECK(p.k0 == 0);   // Doppler neighbour k+1 is larger
    CHECK(p.l0 == 89);  // delay neighbour ℓ−1 is larger
    CHECK(p.at(0, 1) == doctest::Approx(1.0));
    CHECK(p.at(1, 1) == doctest::Approx(0.5));
    CHECK(p.at(0, 0) == doctest::Approx(0.6));
    CHECK(p.at(1, 0) == doctest::Approx(0.35));

    FractionalFit fit;
    fit.alpha = 0.8;
    fit.eps_t = 1.0;
    fit.eps_f = 0.25;
    const PathEstimate e = to_path_estimate(p, fit);
    CHECK(e.l_hat == 90);
    CHECK(e.eps_t_hat == 0.0);
    CHECK(e.k_hat == 0);
    CHECK(e.delay_bins() == doctest::Approx(90.0));
    CHECK(e.doppler_bins() == doctest::Approx(0.25));
}

TEST_CASE("rmse arithmetic") {
    const std::vector<double> a{0.5};
    const std::vector<double> b{0.3};
    CHECK(rmse(a, b) == doctest::Approx(0.2));
    const std::vector<double> same{0.1, 0.2, 0.3};
    CHECK(rmse(same, same) == 0.0);
    CHECK_THROWS(rmse(a, same));
    CHECK_THROWS(rmse(std::vector<double>{}, std::vector<double>{}));

    RmseAccumulator acc;
    for (int trial = 0; trial < 100; ++trial) {
        for (int path = 0; path < 3; ++path) acc.add(path == 0 ? 0.3 : 0.0);
    }
    CHECK(acc.count() == 300);
    CHECK(acc.value() == doctest::Approx(std::sqrt(100 * 0.09 / 300.0)));
}

TEST_CASE("association is nearest-first within one bin") {
    const std::vector<BinPosition> truth{{1.2, 90.5}, {-2.7, 120.1}};
    const std::vector<BinPosition> est{{-2.5, 120.4}, {1.0, 90.9}, {3.0, 150.0}};
    const Association a = associate(est, truth);
    REQUIRE(a.pairs.size() == 2);
    CHECK(a.spurious == 1);
    CHECK(a.missed == 0);
    for (const auto& [ei, ti] : a.pairs) CHECK(ei == (ti == 0 ? 1 : 0));

    const std::vector<BinPosition> far{{1.2, 92.0}};
    const Association none = associate(far, truth);
    CHECK(none.pairs.empty());
    CHECK(none.missed == 2);
    CHECK(none.spurious == 1);
}
