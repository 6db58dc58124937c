// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "otfsr/channel.hpp"
#include "otfsr/receiver.hpp"
#include "otfsr/waveforms.hpp"

namespace otfsr {

struct Candidate {
    int k = 0;
    int l = 0;
    double magnitude = 0.0;
};

/// Detected peaks, by descending magnitude then (ℓ, k) ascending.
struct CandidateList {
    std::vector<Candidate> entries;
};

/// Top `max_paths` cells by |A|, then a 5x5 local-maximum test, then cell-averaging
/// CFAR: |A| > cfar_factor · mean |A| over the in-surface 5x5 neighbours.
CandidateList coarse_estimate(const AmbiguitySurface& surface, int max_paths = kMaxPaths,
                              double cfar_factor = 1.0);

enum class ModelKind { Linear, RrcAutocorr };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// Separable model A_ss(τ, ν) ≈ p∗p̂(τ)·W(ν), τ in T_s and ν in Doppler bins.
///
/// RrcAutocorr scales the closed-form window autocorrelation by (1+β) so that
/// A_ss(0, 0) = 1 for both kinds; the fitted α is then the path attenuation.
struct InterpolationModel {
    ModelKind kind = ModelKind::RrcAutocorr;
    double beta_w = 0.25;
    PulseShape pulse = PulseShape::rect();

    static InterpolationModel linear(PulseShape pulse = PulseShape::rect()) {
        return {ModelKind::Linear, 0.0, pulse};
    }
    static InterpolationModel rrc(double beta_w, PulseShape pulse = PulseShape::rect()) {
        return {ModelKind::RrcAutocorr, beta_w, pulse};
    }
};

struct ModelValue {
    double value = 0.0;
    bool in_range = true;  ///< false when |τ| > 1 or |ν| > 1; value is then 0
};

ModelValue model_ambiguity(const InterpolationModel& model, double tau, double nu);

/// |A| on the 2x2 cells [k0, k0+1] x [ℓ0, ℓ0+1]. Rows are Doppler offsets,
/// columns delay offsets.
struct PeakPatch {
    int k0 = 0;
    int l0 = 0;
    double v[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

    double at(int doppler_off, int delay_off) const { return v[doppler_off][delay_off]; }
};

/// Noise-free patch α·A_ss(j − ε_t, i − ε_f) of a given model.
PeakPatch model_patch(const InterpolationModel& model, double alpha, double eps_t, double eps_f,
                      int k0 = 0, int l0 = 0);

/// L = Σ_{i,j} (|A_ij| − α·A_ss(j − ε_t, i − ε_f))², i Doppler offset, j delay offset.
double objective(const PeakPatch& patch, double alpha, double eps_t, double eps_f,
                 const InterpolationModel& model);

struct FitOptions {
    double ftol = 1e-10;     ///< spread of L over the simplex
    double xtol = 1e-10;     ///< simplex diameter
    int max_iterations = 2000;  ///< per start
};

struct FractionalFit {
    double alpha = 0.0;
    double eps_t = 0.0;
    double eps_f = 0.0;
    double loss = 0.0;
    bool converged = false;  ///< at least one start met both tolerances
    int evaluations = 0;
};

/// Box-projected Nelder–Mead over (α, ε_t, ε_f) ∈ [0,∞)×[0,1]², started from
/// ε ∈ {0.25, 0.75}² with α = A00 / A_ss(0,0). Best start wins.
FractionalFit fractional_estimate(const PeakPatch& patch, const InterpolationModel& model,
                                  const FitOptions& options = {});

/// Picks the 2x2 block around a detected peak: each axis extends toward the
/// larger neighbour. Magnitudes are divided by `scale`.
PeakPatch extract_patch(const AmbiguitySurface& surface, int k, int l, double scale);

struct PathEstimate {
    int k_hat = 0;
    int l_hat = 0;
    double eps_f_hat = 0.0;  ///< in [0, 1)
    double eps_t_hat = 0.0;  ///< in [0, 1)
    double alpha_hat = 0.0;
    bool converged = false;

    double doppler_bins() const { return k_hat + eps_f_hat; }
    double delay_bins() const { return l_hat + eps_t_hat; }
};

/// Folds a fit on a patch anchored at (k0, ℓ0) into integer + [0, 1) parts.
PathEstimate to_path_estimate(const PeakPatch& patch, const FractionalFit& fit);

/// Path position in bins: Doppler k + ε_f, delay ℓ + ε_t.
struct BinPosition {
    double doppler = 0.0;
    double delay = 0.0;
};

/// Greedy nearest-first matching of estimates to truths. A pair matches only
/// if both coordinates differ by at most `radius` bins.
struct Association {
    std::vector<std::pair<int, int>> pairs;  ///< (estimate index, truth index)
    int missed = 0;                          ///< truths with no estimate
    int spurious = 0;                        ///< estimates with no truth
};
Association associate(std::span<const BinPosition> estimates, std::span<const BinPosition> truths,
                      double radius = 1.0);

/// sqrt(mean((x̂ − x)²)). Throws on length mismatch or empty input.
double rmse(std::span<const double> estimates, std::span<const double> truths);

/// Running sum of squared errors in insertion order.
class RmseAccumulator {
public:
    void add(double error) {
        sum_sq_ += error * error;
        ++count_;
    }
    long count() const { return count_; }
    double value() const;

private:
    double sum_sq_ = 0.0;
    long count_ = 0;
};

}  // namespace otfsr
