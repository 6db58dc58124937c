// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "otfsr/channel.hpp"
#include "otfsr/estimator.hpp"
#include "otfsr/otfs.hpp"
#include "otfsr/receiver.hpp"

namespace otfsr {

/// exact: 2x2 patches come straight from the frame window's model.
/// pipeline: channel, matched filter, cross-ambiguity and coarse detection run first.
enum class InputMode { Exact, Pipeline };

std::string_view to_string(InputMode mode);
InputMode parse_input_mode(std::string_view name);

struct ExperimentConfig {
    FrameConfig frame;
    int paths_min = 1;
    int paths_max = 5;
    int n_sim = 100;
    std::vector<ModelKind> models{ModelKind::Linear, ModelKind::RrcAutocorr};
    InputMode input_mode = InputMode::Exact;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    double alpha_min = 0.5;
    double alpha_max = 1.0;
    int max_paths = kMaxPaths;
    double cfar_factor = 1.0;
    double noise_sigma = 0.0;
    /// RRC window span used for the exported ambiguity maps.
    int map_window_span = 9;
    int map_points = 101;

    void validate() const;
};

/// `key = value` lines; `#` starts a comment. Unknown keys and bad values
/// throw std::invalid_argument prefixed with "<source>:<line>: ".
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical text form; parse_config(write_config(c)) reproduces c.
std::string write_config(const ExperimentConfig& cfg);

/// Scene file: `path = alpha_re alpha_im t_D f_D`, `noise_sigma = s`, `seed = n`.
ChannelScene parse_scene(std::istream& in, const std::string& source = "<scene>");
ChannelScene load_scene(const std::filesystem::path& path);
std::string write_scene(const ChannelScene& scene);

std::uint64_t splitmix64(std::uint64_t x);
/// Independent stream per (master seed, stream index).
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream);

/// Platform-stable draws from a 64-bit engine.
double uniform01(std::mt19937_64& rng);
int uniform_int(std::mt19937_64& rng, int lo, int hi);

/// One drawn path in bin units: delay (l + ε_t)T_s, Doppler (k + ε_f)/T_B.
struct TruthPath {
    int k = 0;
    int l = 0;
    double eps_t = 0.0;
    double eps_f = 0.0;
    cplx alpha{1.0, 0.0};

    BinPosition position() const { return {k + eps_f, l + eps_t}; }
    PathParams params(const FrameConfig& frame) const;
};

struct SceneRules {
    bool fractional = true;   ///< false: ε_t = ε_f = 0
    bool unit_gain = false;   ///< true: |α| = 1
    bool separated = false;   ///< distinct ℓ mod M, outside each other's 5x5 window
};

/// Draws `count` non-colliding paths inside the detectable bin ranges.
/// Throws std::runtime_error after 1000 rejected draws.
std::vector<TruthPath> draw_scene(const ExperimentConfig& cfg, int count, std::mt19937_64& rng,
                                  const SceneRules& rules);

/// Delay bins ℓ whose 5x5 neighbourhood lies in the frame's lag range.
IndexWindow detectable_delays(const FrameConfig& frame);
/// Doppler bins [first, first + period) of the pilot's detection surface.
DopplerBins detection_bins(const FrameConfig& frame);

/// The frame window's own interpolation model (the truth in exact mode).
InterpolationModel truth_model(const FrameConfig& frame);
InterpolationModel make_model(ModelKind kind, const FrameConfig& frame);

struct PipelineResult {
    AmbiguitySurface surface;
    CandidateList candidates;
    std::vector<PeakPatch> patches;
    double scale = 1.0;  ///< ‖x̃‖²/√NM, the noise-free peak of a unit path
};

/// Transmit pilot, continuous channel, noise, matched filter, cross-ambiguity,
/// coarse detection and patch extraction.
PipelineResult detect_scene(const ChannelScene& scene, const FrameConfig& frame, int max_paths,
                            double cfar_factor, Gating gating = Gating::Enforce);

std::vector<PathEstimate> estimate_patches(std::span<const PeakPatch> patches,
                                           const InterpolationModel& model);

struct RmseRow {
    int paths = 0;
    ModelKind model = ModelKind::Linear;
    double rmse_alpha = 0.0;
    double rmse_eps_t = 0.0;
    double rmse_eps_f = 0.0;
    long matched = 0;
    long missed = 0;
    long spurious = 0;
};

std::vector<RmseRow> run_montecarlo(const ExperimentConfig& cfg);

struct SweepRow {
    double eps_f_true = 0.0;
    double eps_f_hat = 0.0;
    double error = 0.0;
};

/// ε_f = 0.01 .. 0.99, ε_t = 0, α = 1, patches from the frame window's model.
std::vector<SweepRow> sweep_eps_f(const ExperimentConfig& cfg, ModelKind model);

/// Pilot fine ambiguity on a points x points grid over ±5T_s and ±5/T_B.
FineAmbiguity pilot_fine_ambiguity(const FrameConfig& frame, int points);

/// Interior local maxima of a sampled curve, ignoring samples below
/// `floor` times the curve's maximum.
int count_local_maxima(std::span<const double> values, double floor);

struct MapFile {
    PulseKind pulse;
    WindowKind window;
    std::filesystem::path csv;
    std::filesystem::path json;
};

/// The 6 pulse/window combinations at 25% roll-off.
std::vector<MapFile> export_ambiguity_maps(const ExperimentConfig& cfg,
                                           const std::filesystem::path& dir);

/// Writes via a sibling temporary and rename.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

std::string rmse_csv(std::span<const RmseRow> rows);
std::string sweep_csv(std::span<const SweepRow> rows, ModelKind model);
std::string ambiguity_csv(const FineAmbiguity& map);

struct EstimateRow {
    int trial = 0;
    int path = 0;
    PathEstimate estimate;
    ModelKind model = ModelKind::Linear;
};
std::string estimates_csv(std::span<const EstimateRow> rows);

}  // namespace otfsr
