// SPDX-License-Identifier: Apache-2.0
#include "otfsr/harness.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace otfsr {

namespace {

constexpr int kMaxDrawAttempts = 1000;
constexpr const char* kRmseSchema = "otfsr.montecarlo/1";
constexpr const char* kSweepSchema = "otfsr.sweep/1";
constexpr const char* kAmbiguitySchema = "otfsr.ambiguity/1";
constexpr const char* kEstimateSchema = "otfsr.estimates/1";

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

double parse_double(const std::string& v) {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument("expected a finite number, got '" + v + "'");
    return x;
}

long long parse_int(const std::string& v) {
    long long x = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc{} || ptr != end) throw std::invalid_argument("expected an integer, got '" + v + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& v) {
    std::uint64_t x = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc{} || ptr != end) throw std::invalid_argument("expected an unsigned integer, got '" + v + "'");
    return x;
}

int parse_count(const std::string& v) {
    const long long x = parse_int(v);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        throw std::invalid_argument("integer out of range: " + v);
    }
    return static_cast<int>(x);
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& config_keys() {
    static const std::map<std::string, Setter> keys = [] {
        std::map<std::string, Setter> k;
        k["n_doppler"] = [](ExperimentConfig& c, const std::string& v) { c.frame.n_doppler = parse_count(v); };
        k["m_delay"] = [](ExperimentConfig& c, const std::string& v) { c.frame.m_delay = parse_count(v); };
        k["blocks_per_pri"] = [](ExperimentConfig& c, const std::string& v) { c.frame.blocks_per_pri = parse_count(v); };
        k["sample_period"] = [](ExperimentConfig& c, const std::string& v) { c.frame.sample_period = parse_double(v); };
        k["oversampling"] = [](ExperimentConfig& c, const std::string& v) { c.frame.oversampling = parse_count(v); };
        k["pulse"] = [](ExperimentConfig& c, const std::string& v) { c.frame.pulse.kind = parse_pulse_kind(v); };
        k["pulse_beta"] = [](ExperimentConfig& c, const std::string& v) { c.frame.pulse.beta = parse_double(v); };
        k["pulse_tail"] = [](ExperimentConfig& c, const std::string& v) { c.frame.pulse_tail = parse_double(v); };
        k["window"] = [](ExperimentConfig& c, const std::string& v) { c.frame.window.kind = parse_window_kind(v); };
        k["window_beta"] = [](ExperimentConfig& c, const std::string& v) { c.frame.window.beta = parse_double(v); };
        k["window_span"] = [](ExperimentConfig& c, const std::string& v) { c.frame.window.span = parse_count(v); };
        k["paths_min"] = [](ExperimentConfig& c, const std::string& v) { c.paths_min = parse_count(v); };
        k["paths_max"] = [](ExperimentConfig& c, const std::string& v) { c.paths_max = parse_count(v); };
        k["n_sim"] = [](ExperimentConfig& c, const std::string& v) { c.n_sim = parse_count(v); };
        k["models"] = [](ExperimentConfig& c, const std::string& v) {
            c.models.clear();
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ',')) c.models.push_back(parse_model_kind(trim(item)));
        };
        k["input_mode"] = [](ExperimentConfig& c, const std::string& v) { c.input_mode = parse_input_mode(v); };
        k["seed"] = [](ExperimentConfig& c, const std::string& v) { c.seed = parse_u64(v); };
        k["output_dir"] = [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; };
        k["alpha_min"] = [](ExperimentConfig& c, const std::string& v) { c.alpha_min = parse_double(v); };
        k["alpha_max"] = [](ExperimentConfig& c, const std::string& v) { c.alpha_max = parse_double(v); };
        k["max_paths"] = [](ExperimentConfig& c, const std::string& v) { c.max_paths = parse_count(v); };
        k["cfar_factor"] = [](ExperimentConfig& c, const std::string& v) { c.cfar_factor = parse_double(v); };
        k["noise_sigma"] = [](ExperimentConfig& c, const std::string& v) { c.noise_sigma = parse_double(v); };
        k["map_window_span"] = [](ExperimentConfig& c, const std::string& v) { c.map_window_span = parse_count(v); };
        k["map_points"] = [](ExperimentConfig& c, const std::string& v) { c.map_points = parse_count(v); };
        // Short aliases.
        k["N"] = k["n_doppler"];
        k["M"] = k["m_delay"];
        k["U"] = k["blocks_per_pri"];
        k["OS"] = k["oversampling"];
        return k;
    }();
    return keys;
}

template <typename F>
void for_each_assignment(std::istream& in, const std::string& source, F&& f) {
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const std::string where = source + ":" + std::to_string(number) + ": ";
        if (eq == std::string::npos) throw std::invalid_argument(where + "expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty() || value.empty()) throw std::invalid_argument(where + "expected 'key = value'");
        try {
            f(key, value);
        } catch (const std::exception& e) {
            throw std::invalid_argument(where + e.what());
        }
    }
}

double circular_distance(int a, int b, int period) {
    if (period <= 0) return std::abs(a - b);
    const int d = ((a - b) % period + period) % period;
    return std::min(d, period - d);
}

int positive_mod(int a, int m) { return ((a % m) + m) % m; }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string_view to_string(InputMode mode) { return mode == InputMode::Exact ? "exact" : "pipeline"; }

InputMode parse_input_mode(std::string_view name) {
    if (name == "exact" || name == "exact_2x2") return InputMode::Exact;
    if (name == "pipeline" || name == "full_pipeline") return InputMode::Pipeline;
    throw std::invalid_argument("unknown input mode '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
    frame.validate();
    if (paths_min < 1 || paths_max < paths_min || paths_max > kMaxPaths) {
        throw std::invalid_argument("paths_min/paths_max must satisfy 1 <= min <= max <= " + std::to_string(kMaxPaths));
    }
    if (n_sim < 1) throw std::invalid_argument("n_sim must be >= 1");
    if (models.empty()) throw std::invalid_argument("models must list at least one model");
    if (!(alpha_min > 0.0 && alpha_max >= alpha_min)) throw std::invalid_argument("need 0 < alpha_min <= alpha_max");
    if (max_paths < 1) throw std::invalid_argument("max_paths must be >= 1");
    if (!(cfar_factor >= 0.0)) throw std::invalid_argument("cfar_factor must be >= 0");
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
    if (map_window_span < 1) throw std::invalid_argument("map_window_span must be >= 1");
    if (map_points < 3 || map_points % 2 == 0) throw std::invalid_argument("map_points must be odd and >= 3");
    if (detectable_delays(frame).size() < 1) {
        throw std::invalid_argument("frame leaves no detectable delay bins; increase blocks_per_pri");
    }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    ExperimentConfig cfg;
    const auto& keys = config_keys();
    for_each_assignment(in, source, [&](const std::string& key, const std::string& value) {
        const auto it = keys.find(key);
        if (it == keys.end()) throw std::invalid_argument("unknown key '" + key + "'");
        it->second(cfg, value);
    });
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw std::invalid_argument(source + ": " + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    return parse_config(in, path.string());
}

std::string write_config(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "n_doppler = " << c.frame.n_doppler << "\n"
      << "m_delay = " << c.frame.m_delay << "\n"
      << "blocks_per_pri = " << c.frame.blocks_per_pri << "\n"
      << "sample_period = " << fmt(c.frame.sample_period) << "\n"
      << "oversampling = " << c.frame.oversampling << "\n"
      << "pulse = " << to_string(c.frame.pulse.kind) << "\n"
      << "pulse_beta = " << fmt(c.frame.pulse.beta) << "\n"
      << "pulse_tail = " << fmt(c.frame.pulse_tail) << "\n"
      << "window = " << to_string(c.frame.window.kind) << "\n"
      << "window_beta = " << fmt(c.frame.window.beta) << "\n"
      << "window_span = " << c.frame.window.span << "\n"
      << "paths_min = " << c.paths_min << "\n"
      << "paths_max = " << c.paths_max << "\n"
      << "n_sim = " << c.n_sim << "\n"
      << "models = ";
    for (std::size_t i = 0; i < c.models.size(); ++i) o << (i ? "," : "") << to_string(c.models[i]);
    o << "\n"
      << "input_mode = " << to_string(c.input_mode) << "\n"
      << "seed = " << c.seed << "\n"
      << "output_dir = " << c.output_dir << "\n"
      << "alpha_min = " << fmt(c.alpha_min) << "\n"
      << "alpha_max = " << fmt(c.alpha_max) << "\n"
      << "max_paths = " << c.max_paths << "\n"
      << "cfar_factor = " << fmt(c.cfar_factor) << "\n"
      << "noise_sigma = " << fmt(c.noise_sigma) << "\n"
      << "map_window_span = " << c.map_window_span << "\n"
      << "map_points = " << c.map_points << "\n";
    return o.str();
}

ChannelScene parse_scene(std::istream& in, const std::string& source) {
    ChannelScene scene;
    for_each_assignment(in, source, [&](const std::string& key, const std::string& value) {
        if (key == "noise_sigma") {
            scene.noise_sigma = parse_double(value);
            if (scene.noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be >= 0");
        } else if (key == "seed") {
            scene.seed = parse_u64(value);
        } else if (key == "path") {
            std::istringstream fields(value);
            std::vector<std::string> parts;
            for (std::string f; fields >> f;) parts.push_back(f);
            if (parts.size() != 4) throw std::invalid_argument("path needs 'alpha_re alpha_im t_D f_D'");
            scene.paths.push_back({{parse_double(parts[0]), parse_double(parts[1])},
                                   parse_double(parts[2]),
                                   parse_double(parts[3])});
        } else {
            throw std::invalid_argument("unknown key '" + key + "'");
        }
    });
    if (scene.paths.empty()) throw std::invalid_argument(source + ": scene lists no paths");
    return scene;
}

ChannelScene load_scene(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    return parse_scene(in, path.string());
}

std::string write_scene(const ChannelScene& scene) {
    std::ostringstream o;
    o << "# path = alpha_re alpha_im t_D[s] f_D[Hz]\n"
      << "noise_sigma = " << fmt(scene.noise_sigma) << "\n"
      << "seed = " << scene.seed << "\n";
    for (const PathParams& p : scene.paths) {
        o << "path = " << fmt(p.alpha.real()) << " " << fmt(p.alpha.imag()) << " " << fmt(p.t_d) << " "
          << fmt(p.f_d) << "\n";
    }
    return o.str();
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ stream);
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return lo + static_cast<int>(x % span);
}

PathParams TruthPath::params(const FrameConfig& frame) const {
    return {alpha, (l + eps_t) * frame.sample_period, (k + eps_f) / frame.block_time()};
}

IndexWindow detectable_delays(const FrameConfig& frame) {
    const IndexWindow lags = frame.lag_range();
    // Room for the 5x5 detector window and the 2x2 patch on either side.
    return {lags.first + 2, lags.last - 3};
}

DopplerBins detection_bins(const FrameConfig& frame) {
    const CVector x = transmit_samples(pilot_grid(frame.n_doppler, frame.m_delay), frame);
    const int period = doppler_period(x, frame.nm());
    return {-(period / 2), period};
}

InterpolationModel truth_model(const FrameConfig& frame) {
    return frame.window.kind == WindowKind::Rrc ? InterpolationModel::rrc(frame.window.beta, frame.pulse)
                                                : InterpolationModel::linear(frame.pulse);
}

InterpolationModel make_model(ModelKind kind, const FrameConfig& frame) {
    const double beta = frame.window.kind == WindowKind::Rrc ? frame.window.beta : 0.25;
    return kind == ModelKind::Linear ? InterpolationModel::linear(frame.pulse)
                                     : InterpolationModel::rrc(beta, frame.pulse);
}

std::vector<TruthPath> draw_scene(const ExperimentConfig& cfg, int count, std::mt19937_64& rng,
                                  const SceneRules& rules) {
    const IndexWindow delays = detectable_delays(cfg.frame);
    const DopplerBins bins = detection_bins(cfg.frame);
    const int m = cfg.frame.m_delay;
    for (int attempt = 0; attempt < kMaxDrawAttempts; ++attempt) {
        std::vector<TruthPath> paths;
        bool ok = true;
        for (int i = 0; i < count && ok; ++i) {
            TruthPath p;
            p.k = uniform_int(rng, bins.first, bins.first + bins.count - 1);
            p.l = uniform_int(rng, delays.first, delays.last);
            if (rules.fractional) {
                p.eps_t = uniform01(rng);
                p.eps_f = uniform01(rng);
            }
            const double mag = rules.unit_gain ? 1.0 : cfg.alpha_min + (cfg.alpha_max - cfg.alpha_min) * uniform01(rng);
            p.alpha = std::polar(mag, 2.0 * kPi * uniform01(rng));
            for (const TruthPath& q : paths) {
                if (p.k == q.k && p.l == q.l) ok = false;
                if (rules.separated) {
                    // Pilot delay ghosts at ℓ ± nM carry Doppler sidelobes on every k.
                    if (positive_mod(p.l - q.l, m) == 0) ok = false;
                    // Paths sharing a 5x5 detector window cannot both be local maxima;
                    // fractional paths also spread one extra bin.
                    const int guard = rules.fractional ? 3 : 2;
                    if (std::abs(p.l - q.l) <= guard && circular_distance(p.k, q.k, bins.count) <= guard) {
                        ok = false;
                    }
                }
            }
            paths.push_back(p);
        }
        if (ok) return paths;
    }
    throw std::runtime_error("draw_scene: no non-colliding placement of " + std::to_string(count) + " paths after " +
                             std::to_string(kMaxDrawAttempts) + " draws (delay bins " + std::to_string(delays.first) +
                             ".." + std::to_string(delays.last) + ", " + std::to_string(bins.count) + " Doppler bins)");
}

PipelineResult detect_scene(const ChannelScene& scene, const FrameConfig& frame, int max_paths,
                            double cfar_factor, Gating gating) {
    const CVector x = transmit_samples(pilot_grid(frame.n_doppler, frame.m_delay), frame);
    const PulseFrame tx = assemble_frame(synthesize(x, frame), frame);
    BasebandSignal r = apply_continuous_channel(tx.signal, scene, frame, gating);
    r = add_awgn(r, scene.noise_sigma, scene.seed);
    const ObservedSamples y = matched_filter_sample(r, frame, tx.observation);

    PipelineResult out;
    out.surface = cross_ambiguity(y, x, frame, frame.lag_range(), detection_bins(frame));
    double energy = 0.0;
    for (const cplx& v : x) energy += std::norm(v);
    out.scale = energy / std::sqrt(static_cast<double>(frame.nm()));
    out.candidates = coarse_estimate(out.surface, max_paths, cfar_factor);
    for (const Candidate& c : out.candidates.entries) {
        try {
            out.patches.push_back(extract_patch(out.surface, c.k, c.l, out.scale));
        } catch (const std::out_of_range&) {
            // Peaks on the lag-range border have no complete 2x2 block.
        }
    }
    return out;
}

std::vector<PathEstimate> estimate_patches(std::span<const PeakPatch> patches, const InterpolationModel& model) {
    std::vector<PathEstimate> out;
    out.reserve(patches.size());
    for (const PeakPatch& p : patches) out.push_back(to_path_estimate(p, fractional_estimate(p, model)));
    return out;
}

std::vector<RmseRow> run_montecarlo(const ExperimentConfig& cfg) {
    cfg.validate();
    const InterpolationModel truth = truth_model(cfg.frame);
    const bool pipeline = cfg.input_mode == InputMode::Pipeline;
    const SceneRules rules{true, false, pipeline};

    std::vector<RmseRow> rows;
    for (int paths = cfg.paths_min; paths <= cfg.paths_max; ++paths) {
        const std::size_t n_models = cfg.models.size();
        std::vector<RmseAccumulator> acc_a(n_models), acc_t(n_models), acc_f(n_models);
        std::vector<long> missed(n_models, 0), spurious(n_models, 0);

        for (int trial = 0; trial < cfg.n_sim; ++trial) {
            const std::uint64_t stream = (static_cast<std::uint64_t>(paths) << 32) | static_cast<std::uint64_t>(trial);
            std::mt19937_64 rng(stream_seed(cfg.seed, stream));
            const std::vector<TruthPath> scene = draw_scene(cfg, paths, rng, rules);
            std::vector<BinPosition> truth_pos;
            for (const TruthPath& p : scene) truth_pos.push_back(p.position());

            std::vector<PeakPatch> patches;
            if (pipeline) {
                ChannelScene cs;
                for (const TruthPath& p : scene) cs.paths.push_back(p.params(cfg.frame));
                cs.noise_sigma = cfg.noise_sigma;
                cs.seed = rng();
                patches = detect_scene(cs, cfg.frame, cfg.max_paths, cfg.cfar_factor).patches;
            } else {
                for (const TruthPath& p : scene) {
                    patches.push_back(model_patch(truth, std::abs(p.alpha), p.eps_t, p.eps_f, p.k, p.l));
                }
            }

            for (std::size_t mi = 0; mi < n_models; ++mi) {
                const std::vector<PathEstimate> est = estimate_patches(patches, make_model(cfg.models[mi], cfg.frame));
                std::vector<BinPosition> est_pos;
                for (const PathEstimate& e : est) est_pos.push_back({e.doppler_bins(), e.delay_bins()});
                const Association assoc = associate(est_pos, truth_pos);
                for (const auto& [ei, ti] : assoc.pairs) {
                    const PathEstimate& e = est[static_cast<std::size_t>(ei)];
                    const TruthPath& t = scene[static_cast<std::size_t>(ti)];
                    acc_a[mi].add(e.alpha_hat - std::abs(t.alpha));
                    acc_t[mi].add(e.delay_bins() - t.position().delay);
                    acc_f[mi].add(e.doppler_bins() - t.position().doppler);
                }
                missed[mi] += assoc.missed;
                spurious[mi] += assoc.spurious;
            }
        }
        for (std::size_t mi = 0; mi < n_models; ++mi) {
            rows.push_back({paths, cfg.models[mi], acc_a[mi].value(), acc_t[mi].value(), acc_f[mi].value(),
                            acc_a[mi].count(), missed[mi], spurious[mi]});
        }
    }
    return rows;
}

std::vector<SweepRow> sweep_eps_f(const ExperimentConfig& cfg, ModelKind model) {
    const InterpolationModel truth = truth_model(cfg.frame);
    const InterpolationModel fit_model = make_model(model, cfg.frame);
    std::vector<SweepRow> rows;
    for (int i = 1; i <= 99; ++i) {
        const double eps_f = i / 100.0;
        const PeakPatch patch = model_patch(truth, 1.0, 0.0, eps_f);
        const FractionalFit fit = fractional_estimate(patch, fit_model);
        rows.push_back({eps_f, fit.eps_f, fit.eps_f - eps_f});
    }
    return rows;
}

FineAmbiguity pilot_fine_ambiguity(const FrameConfig& frame, int points) {
    if (points < 3 || points % 2 == 0) throw std::invalid_argument("pilot_fine_ambiguity: points must be odd and >= 3");
    const CVector x = transmit_samples(pilot_grid(frame.n_doppler, frame.m_delay), frame);
    const BasebandSignal s = synthesize(x, frame);
    const int half = points / 2;
    std::vector<double> tau(static_cast<std::size_t>(points));
    std::vector<double> nu(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double u = 5.0 * (i - half) / half;
        tau[static_cast<std::size_t>(i)] = u * frame.sample_period;
        nu[static_cast<std::size_t>(i)] = u / frame.block_time();
    }
    return fine_ambiguity(s, tau, nu);
}

int count_local_maxima(std::span<const double> values, double floor) {
    if (values.size() < 3) return 0;
    const double peak = *std::max_element(values.begin(), values.end());
    const double threshold = floor * peak;
    int count = 0;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        const double v = values[i];
        if (v < threshold) continue;
        if (v > values[i - 1] && v >= values[i + 1]) ++count;
    }
    return count;
}

std::vector<MapFile> export_ambiguity_maps(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<MapFile> files;
    for (PulseKind pk : {PulseKind::Rect, PulseKind::Sinc, PulseKind::Rrc}) {
        for (WindowKind wk : {WindowKind::Rect, WindowKind::Rrc}) {
            FrameConfig frame = cfg.frame;
            frame.pulse = {pk, 0.25};
            frame.window = wk == WindowKind::Rrc ? WindowShape::rrc(0.25, cfg.map_window_span) : WindowShape::rect();
            const FineAmbiguity map = pilot_fine_ambiguity(frame, cfg.map_points);

            const std::string stem = "ambiguity_" + std::string(to_string(pk)) + "_" + std::string(to_string(wk));
            MapFile f{pk, wk, dir / (stem + ".csv"), dir / (stem + ".json")};
            atomic_write(f.csv, ambiguity_csv(map));

            nlohmann::json meta;
            meta["schema"] = kAmbiguitySchema;
            meta["pulse"] = to_string(pk);
            meta["window"] = to_string(wk);
            meta["rolloff"] = 0.25;
            meta["window_span"] = wk == WindowKind::Rrc ? cfg.map_window_span : 1;
            meta["n_doppler"] = frame.n_doppler;
            meta["m_delay"] = frame.m_delay;
            meta["oversampling"] = frame.oversampling;
            meta["points"] = cfg.map_points;
            meta["delay_bin_s"] = frame.sample_period;
            meta["doppler_bin_hz"] = 1.0 / frame.block_time();
            meta["tau_step_s"] = map.tau[1] - map.tau[0];
            meta["nu_step_hz"] = map.nu[1] - map.nu[0];
            meta["tau_min_s"] = map.tau.front();
            meta["nu_min_hz"] = map.nu.front();
            meta["index_origin"] = cfg.map_points / 2;
            meta["columns"] = {"k: Doppler grid index", "l: delay grid index", "re", "im", "abs"};
            atomic_write(f.json, meta.dump(2) + "\n");
            files.push_back(f);
        }
    }
    return files;
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string rmse_csv(std::span<const RmseRow> rows) {
    std::ostringstream o;
    o << "# schema: " << kRmseSchema << "\n"
      << "P,model,rmse_alpha,rmse_eps_t,rmse_eps_f,matched,missed,spurious\n";
    for (const RmseRow& r : rows) {
        o << r.paths << "," << to_string(r.model) << "," << fmt(r.rmse_alpha) << "," << fmt(r.rmse_eps_t) << ","
          << fmt(r.rmse_eps_f) << "," << r.matched << "," << r.missed << "," << r.spurious << "\n";
    }
    return o.str();
}

std::string sweep_csv(std::span<const SweepRow> rows, ModelKind model) {
    std::ostringstream o;
    o << "# schema: " << kSweepSchema << " model=" << to_string(model) << "\n"
      << "eps_f_true,eps_f_hat,error\n";
    for (const SweepRow& r : rows) o << fmt(r.eps_f_true) << "," << fmt(r.eps_f_hat) << "," << fmt(r.error) << "\n";
    return o.str();
}

std::string ambiguity_csv(const FineAmbiguity& map) {
    std::ostringstream o;
    o << "# schema: " << kAmbiguitySchema << "\n"
      << "k,l,re,im,abs\n";
    const int half_nu = static_cast<int>(map.nu.size() / 2);
    const int half_tau = static_cast<int>(map.tau.size() / 2);
    for (std::size_t i = 0; i < map.nu.size(); ++i) {
        for (std::size_t j = 0; j < map.tau.size(); ++j) {
            const cplx v = map.at(i, j);
            o << static_cast<int>(i) - half_nu << "," << static_cast<int>(j) - half_tau << "," << fmt(v.real()) << ","
              << fmt(v.imag()) << "," << fmt(std::abs(v)) << "\n";
        }
    }
    return o.str();
}

std::string estimates_csv(std::span<const EstimateRow> rows) {
    std::ostringstream o;
    o << "# schema: " << kEstimateSchema << "\n"
      << "trial,path,k_hat,l_hat,eps_t_hat,eps_f_hat,alpha_hat,model_kind\n";
    for (const EstimateRow& r : rows) {
        o << r.trial << "," << r.path << "," << r.estimate.k_hat << "," << r.estimate.l_hat << ","
          << fmt(r.estimate.eps_t_hat) << "," << fmt(r.estimate.eps_f_hat) << "," << fmt(r.estimate.alpha_hat) << ","
          << to_string(r.model) << "\n";
    }
    return o.str();
}

}  // namespace otfsr
