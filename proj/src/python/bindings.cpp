// SPDX-License-Identifier: Apache-2.0
#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "otfsr/acceptance.hpp"
#include "otfsr/harness.hpp"

namespace py = pybind11;
using namespace otfsr;

namespace {

ExperimentConfig config_from(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "<python>");
}

py::array_t<double> vectorize(py::array_t<double, py::array::c_style | py::array::forcecast> x,
                              const std::function<double(double)>& f) {
    py::array_t<double> out(x.request().shape);
    const auto in = x.unchecked();
    auto* dst = out.mutable_data();
    const double* src = in.data();
    for (py::ssize_t i = 0; i < x.size(); ++i) dst[i] = f(src[i]);
    return out;
}

PeakPatch patch_from(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    if (a.ndim() != 2 || a.shape(0) != 2 || a.shape(1) != 2) throw py::value_error("patch must be 2x2");
    PeakPatch p;
    const auto v = a.unchecked<2>();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) p.v[i][j] = v(i, j);
    }
    return p;
}

InterpolationModel model_from(const std::string& name, double beta_w) {
    return parse_model_kind(name) == ModelKind::Linear ? InterpolationModel::linear() : InterpolationModel::rrc(beta_w);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Delay-Doppler estimation core";

    m.def(
        "window_autocorr_rrc",
        [](py::array_t<double> nu, double beta) {
            return vectorize(nu, [beta](double v) { return window_autocorr_rrc(v, beta); });
        },
        py::arg("nu"), py::arg("beta"));
    m.def(
        "numeric_spectrum_autocorr",
        [](py::array_t<double> nu, double beta) {
            return vectorize(nu, [beta](double v) { return numeric_spectrum_autocorr(v, beta); });
        },
        py::arg("nu"), py::arg("beta"));
    m.def(
        "pulse_matched_autocorr",
        [](const std::string& kind, py::array_t<double> tau, double beta) {
            const PulseShape p{parse_pulse_kind(kind), beta};
            return vectorize(tau, [p](double t) { return pulse_matched_autocorr(p, t); });
        },
        py::arg("kind"), py::arg("tau"), py::arg("beta") = 0.0);

    m.def(
        "model_patch",
        [](const std::string& model, double alpha, double eps_t, double eps_f, double beta_w) {
            const PeakPatch p = model_patch(model_from(model, beta_w), alpha, eps_t, eps_f);
            py::array_t<double> out({2, 2});
            auto o = out.mutable_unchecked<2>();
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) o(i, j) = p.v[i][j];
            }
            return out;
        },
        py::arg("model"), py::arg("alpha"), py::arg("eps_t"), py::arg("eps_f"), py::arg("beta_w") = 0.25,
        "2x2 |A| patch; rows Doppler offsets, columns delay offsets.");
    m.def(
        "fractional_estimate",
        [](py::array_t<double> patch, const std::string& model, double beta_w) {
            const FractionalFit f = fractional_estimate(patch_from(patch), model_from(model, beta_w));
            py::dict d;
            d["alpha"] = f.alpha;
            d["eps_t"] = f.eps_t;
            d["eps_f"] = f.eps_f;
            d["loss"] = f.loss;
            d["converged"] = f.converged;
            return d;
        },
        py::arg("patch"), py::arg("model"), py::arg("beta_w") = 0.25);

    m.def(
        "parse_config", [](const std::string& text) { return write_config(config_from(text)); }, py::arg("text"),
        "Validates a config and returns its canonical text.");

    m.def(
        "sweep",
        [](const std::string& model, const std::string& config) {
            const auto rows = sweep_eps_f(config_from(config), parse_model_kind(model));
            std::vector<double> t;
            std::vector<double> h;
            std::vector<double> e;
            for (const SweepRow& r : rows) {
                t.push_back(r.eps_f_true);
                h.push_back(r.eps_f_hat);
                e.push_back(r.error);
            }
            py::dict d;
            d["eps_f_true"] = py::array_t<double>(static_cast<py::ssize_t>(t.size()), t.data());
            d["eps_f_hat"] = py::array_t<double>(static_cast<py::ssize_t>(h.size()), h.data());
            d["error"] = py::array_t<double>(static_cast<py::ssize_t>(e.size()), e.data());
            return d;
        },
        py::arg("model"), py::arg("config") = "");

    m.def(
        "montecarlo",
        [](const std::string& config) {
            py::list out;
            for (const RmseRow& r : run_montecarlo(config_from(config))) {
                py::dict d;
                d["P"] = r.paths;
                d["model"] = std::string(to_string(r.model));
                d["rmse_alpha"] = r.rmse_alpha;
                d["rmse_eps_t"] = r.rmse_eps_t;
                d["rmse_eps_f"] = r.rmse_eps_f;
                d["matched"] = r.matched;
                d["missed"] = r.missed;
                d["spurious"] = r.spurious;
                out.append(d);
            }
            return out;
        },
        py::arg("config") = "");

    m.def(
        "fine_ambiguity",
        [](const std::string& pulse, const std::string& window, int points, int window_span) {
            FrameConfig frame;
            frame.pulse = {parse_pulse_kind(pulse), 0.25};
            frame.window = parse_window_kind(window) == WindowKind::Rrc ? WindowShape::rrc(0.25, window_span)
                                                                         : WindowShape::rect();
            const FineAmbiguity a = pilot_fine_ambiguity(frame, points);
            py::array_t<cplx> values({static_cast<py::ssize_t>(a.nu.size()), static_cast<py::ssize_t>(a.tau.size())});
            auto v = values.mutable_unchecked<2>();
            for (std::size_t i = 0; i < a.nu.size(); ++i) {
                for (std::size_t j = 0; j < a.tau.size(); ++j) {
                    v(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = a.at(i, j);
                }
            }
            return py::make_tuple(py::array_t<double>(static_cast<py::ssize_t>(a.tau.size()), a.tau.data()),
                                  py::array_t<double>(static_cast<py::ssize_t>(a.nu.size()), a.nu.data()), values);
        },
        py::arg("pulse"), py::arg("window"), py::arg("points") = 101, py::arg("window_span") = 9,
        "Returns (tau [s], nu [Hz], values[nu, tau]).");

    m.def(
        "detect",
        [](const std::vector<std::tuple<cplx, double, double>>& paths, int max_paths, double cfar_factor,
           const std::string& config) {
            const ExperimentConfig cfg = config_from(config);
            ChannelScene scene;
            for (const auto& [alpha, t_d, f_d] : paths) scene.paths.push_back({alpha, t_d, f_d});
            const PipelineResult r = detect_scene(scene, cfg.frame, max_paths, cfar_factor);
            py::list out;
            for (const Candidate& c : r.candidates.entries) out.append(py::make_tuple(c.k, c.l, c.magnitude / r.scale));
            return out;
        },
        py::arg("paths"), py::arg("max_paths"), py::arg("cfar_factor") = 1.0, py::arg("config") = "",
        "paths: [(alpha, t_D [s], f_D [Hz])]. Returns [(k, l, |A| / peak scale)].");

    m.def(
        "export_ambiguity_maps",
        [](const std::filesystem::path& dir, const std::string& config) {
            std::vector<std::filesystem::path> csvs;
            for (const MapFile& f : export_ambiguity_maps(config_from(config), dir)) csvs.push_back(f.csv);
            return csvs;
        },
        py::arg("dir"), py::arg("config") = "");

    m.def(
        "acceptance",
        [](const std::filesystem::path& scratch) {
            py::list out;
            for (const auto& o : acceptance::run_all(scratch)) {
                py::dict d;
                d["id"] = o.id;
                d["name"] = o.name;
                d["passed"] = o.passed;
                d["detail"] = o.detail;
                d["seconds"] = o.seconds;
                out.append(d);
            }
            return out;
        },
        py::arg("scratch"));
}
