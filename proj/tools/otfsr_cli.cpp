// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "otfsr/acceptance.hpp"
#include "otfsr/harness.hpp"

namespace fs = std::filesystem;
using namespace otfsr;

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string mode;
    std::string model;
    std::optional<int> max_paths;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "key = value experiment config")->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
    cmd->add_option("--out", f.out, "output directory (overrides the config)");
}

ExperimentConfig resolve(const CommonFlags& f) {
    ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
    if (f.seed) cfg.seed = *f.seed;
    if (!f.out.empty()) cfg.output_dir = f.out;
    if (!f.mode.empty()) cfg.input_mode = parse_input_mode(f.mode);
    if (!f.model.empty()) cfg.models = {parse_model_kind(f.model)};
    if (f.max_paths) cfg.max_paths = *f.max_paths;
    cfg.validate();
    return cfg;
}

// Run metadata; deliberately free of timestamps and host details.
nlohmann::json metadata(const std::string& command, const ExperimentConfig& cfg) {
    nlohmann::json meta;
    meta["command"] = command;
    meta["seed"] = cfg.seed;
    meta["input_mode"] = to_string(cfg.input_mode);
    std::vector<std::string> models;
    for (ModelKind m : cfg.models) models.emplace_back(to_string(m));
    meta["models"] = models;
    meta["config"] = write_config(cfg);
    return meta;
}

void write_meta(const fs::path& path, const nlohmann::json& meta) { atomic_write(path, meta.dump(2) + "\n"); }

int run_montecarlo_cmd(const ExperimentConfig& cfg) {
    const fs::path dir = cfg.output_dir;
    const auto rows = run_montecarlo(cfg);
    atomic_write(dir / "montecarlo.csv", rmse_csv(rows));
    nlohmann::json meta = metadata("montecarlo", cfg);
    meta["schema"] = "otfsr.montecarlo/1";
    meta["csv"] = "montecarlo.csv";
    write_meta(dir / "montecarlo.json", meta);
    std::cout << (dir / "montecarlo.csv").string() << "\n";
    return 0;
}

int run_sweep_cmd(const ExperimentConfig& cfg) {
    const fs::path dir = cfg.output_dir;
    nlohmann::json meta = metadata("sweep", cfg);
    meta["schema"] = "otfsr.sweep/1";
    for (ModelKind m : cfg.models) {
        const std::string name = "sweep_" + std::string(to_string(m)) + ".csv";
        atomic_write(dir / name, sweep_csv(sweep_eps_f(cfg, m), m));
        meta["csv"].push_back(name);
        std::cout << (dir / name).string() << "\n";
    }
    write_meta(dir / "sweep.json", meta);
    return 0;
}

int run_ambiguity_cmd(const ExperimentConfig& cfg) {
    for (const MapFile& f : export_ambiguity_maps(cfg, cfg.output_dir)) std::cout << f.csv.string() << "\n";
    return 0;
}

int run_estimate_cmd(const ExperimentConfig& cfg, const std::string& scene_path, bool ungated) {
    ChannelScene scene = load_scene(scene_path);
    const PipelineResult r =
        detect_scene(scene, cfg.frame, cfg.max_paths, cfg.cfar_factor, ungated ? Gating::Disabled : Gating::Enforce);
    std::vector<EstimateRow> rows;
    for (ModelKind m : cfg.models) {
        const auto est = estimate_patches(r.patches, make_model(m, cfg.frame));
        for (std::size_t i = 0; i < est.size(); ++i) rows.push_back({0, static_cast<int>(i), est[i], m});
    }
    const fs::path dir = cfg.output_dir;
    atomic_write(dir / "estimates.csv", estimates_csv(rows));
    nlohmann::json meta = metadata("estimate", cfg);
    meta["schema"] = "otfsr.estimates/1";
    meta["csv"] = "estimates.csv";
    meta["scene"] = write_scene(scene);
    meta["candidates"] = r.candidates.entries.size();
    write_meta(dir / "estimates.json", meta);
    std::cout << (dir / "estimates.csv").string() << "\n";
    return 0;
}

int run_selftest_cmd(const ExperimentConfig& cfg) {
    int failed = 0;
    for (const auto& o : acceptance::run_all(fs::path(cfg.output_dir) / "selftest")) {
        std::printf("%s\n", acceptance::format(o).c_str());
        std::fflush(stdout);
        failed += !o.passed;
    }
    std::printf("%d of 9 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delay-Doppler estimation toolkit for windowed pilot frames"};
    app.require_subcommand(1);

    CommonFlags amb_flags;
    CommonFlags mc_flags;
    CommonFlags sweep_flags;
    CommonFlags est_flags;
    CommonFlags self_flags;
    std::string scene_path;
    bool ungated = false;

    const std::vector<std::string> modes{"exact", "exact_2x2", "pipeline", "full_pipeline"};
    const std::vector<std::string> model_names{"linear", "rrc"};

    auto* amb = app.add_subcommand("ambiguity", "export the six fine ambiguity maps");
    add_common(amb, amb_flags);

    auto* mc = app.add_subcommand("montecarlo", "RMSE of both interpolation models over random scenes");
    add_common(mc, mc_flags);
    mc->add_option("--mode", mc_flags.mode, "2x2 input source")->check(CLI::IsMember(modes));
    mc->add_option("--model", mc_flags.model, "restrict to one model")->check(CLI::IsMember(model_names));

    auto* sweep = app.add_subcommand("sweep", "fractional Doppler error sweep, 0.01..0.99");
    add_common(sweep, sweep_flags);
    sweep->add_option("--model", sweep_flags.model, "restrict to one model")->check(CLI::IsMember(model_names));

    auto* est = app.add_subcommand("estimate", "run the full receiver on one scene file");
    add_common(est, est_flags);
    est->add_option("--scene", scene_path, "scene file")->required()->check(CLI::ExistingFile);
    est->add_option("--model", est_flags.model, "restrict to one model")->check(CLI::IsMember(model_names));
    est->add_option("--max-paths", est_flags.max_paths, "candidate cap for coarse detection")->check(CLI::Range(1, kMaxPaths));
    est->add_flag("--ungated", ungated, "skip the delay gate check");

    auto* self = app.add_subcommand("selftest", "run the acceptance criteria");
    add_common(self, self_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (amb->parsed()) return run_ambiguity_cmd(resolve(amb_flags));
        if (mc->parsed()) return run_montecarlo_cmd(resolve(mc_flags));
        if (sweep->parsed()) return run_sweep_cmd(resolve(sweep_flags));
        if (est->parsed()) return run_estimate_cmd(resolve(est_flags), scene_path, ungated);
        if (self->parsed()) return run_selftest_cmd(resolve(self_flags));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "otfsr: %s\n", e.what());
        return 2;
    }
    return 0;
}
