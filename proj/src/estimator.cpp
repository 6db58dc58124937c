// SPDX-License-Identifier: Apache-2.0
#include "otfsr/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace otfsr {

namespace {

constexpr int kNeighbourhood = 2;  // 5x5 window half-width

bool ranks_before(const Candidate& a, const Candidate& b) {
    if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
    if (a.l != b.l) return a.l < b.l;
    return a.k < b.k;
}

using Point = std::array<double, 3>;  // α, ε_t, ε_f

Point project(Point x) {
    x[0] = std::max(x[0], 0.0);
    x[1] = std::clamp(x[1], 0.0, 1.0);
    x[2] = std::clamp(x[2], 0.0, 1.0);
    return x;
}

constexpr int kMaxRestarts = 8;

struct SimplexResult {
    Point x{};
    double f = 0.0;
    bool converged = false;
    int evaluations = 0;
};

// Nelder–Mead with standard coefficients. Vertices move freely; the objective
// is read at their projection onto the box plus the squared distance to it,
// so the exterior is strictly uphill and the simplex never collapses onto a
// face. The reported point is projected.
template <typename F>
SimplexResult nelder_mead(F&& f, const Point& x0, const Point& step, const FitOptions& opt) {
    constexpr int kDim = 3;
    std::array<Point, kDim + 1> pts{};
    std::array<double, kDim + 1> val{};
    SimplexResult res;
    auto eval = [&](const Point& p) {
        ++res.evaluations;
        const Point q = project(p);
        double outside = 0.0;
        for (std::size_t d = 0; d < kDim; ++d) outside += (p[d] - q[d]) * (p[d] - q[d]);
        return f(q) + outside;
    };
    pts[0] = project(x0);
    for (int i = 0; i < kDim; ++i) {
        Point p = pts[0];
        p[static_cast<std::size_t>(i)] += step[static_cast<std::size_t>(i)];
        pts[static_cast<std::size_t>(i + 1)] = p;
    }
    for (std::size_t i = 0; i <= kDim; ++i) val[i] = eval(pts[i]);

    std::array<std::size_t, kDim + 1> order{0, 1, 2, 3};
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
        const std::size_t best = order[0];
        const std::size_t worst = order[kDim];
        const std::size_t second = order[kDim - 1];

        double diameter = 0.0;
        for (std::size_t i = 1; i <= kDim; ++i) {
            for (std::size_t d = 0; d < kDim; ++d) {
                diameter = std::max(diameter, std::abs(pts[order[i]][d] - pts[best][d]));
            }
        }
        if (val[worst] - val[best] <= opt.ftol && diameter <= opt.xtol) {
            res.converged = true;
            break;
        }

        Point centroid{};
        for (std::size_t i = 0; i < kDim; ++i) {
            for (std::size_t d = 0; d < kDim; ++d) centroid[d] += pts[order[i]][d] / kDim;
        }
        auto along = [&](double coef) {
            Point p{};
            for (std::size_t d = 0; d < kDim; ++d) p[d] = centroid[d] + coef * (pts[worst][d] - centroid[d]);
            return p;
        };

        const Point xr = along(-1.0);
        const double fr = eval(xr);
        if (fr < val[best]) {
            const Point xe = along(-2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                val[worst] = fe;
            } else {
                pts[worst] = xr;
                val[worst] = fr;
            }
            continue;
        }
        if (fr < val[second]) {
            pts[worst] = xr;
            val[worst] = fr;
            continue;
        }
        const bool outside = fr < val[worst];
        const Point xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : val[worst])) {
            pts[worst] = xc;
            val[worst] = fc;
            continue;
        }
        for (std::size_t i = 1; i <= kDim; ++i) {
            const std::size_t idx = order[i];
            for (std::size_t d = 0; d < kDim; ++d) pts[idx][d] = pts[best][d] + 0.5 * (pts[idx][d] - pts[best][d]);
            val[idx] = eval(pts[idx]);
        }
    }
    const auto it = std::min_element(val.begin(), val.end());
    res.x = project(pts[static_cast<std::size_t>(it - val.begin())]);
    res.f = f(res.x);
    return res;
}

}  // namespace

CandidateList coarse_estimate(const AmbiguitySurface& surface, int max_paths, double cfar_factor) {
    if (surface.k_count < 1 || surface.l_count < 1) throw std::invalid_argument("coarse_estimate: empty surface");
    if (max_paths < 1) throw std::invalid_argument("coarse_estimate: max_paths must be >= 1");

    std::vector<Candidate> cells;
    cells.reserve(surface.values.size());
    for (int k = surface.k_first; k <= surface.k_last(); ++k) {
        for (int l = surface.l_first; l <= surface.l_last(); ++l) {
            cells.push_back({k, l, std::abs(surface.at(k, l))});
        }
    }
    const auto top = std::min<std::size_t>(static_cast<std::size_t>(max_paths), cells.size());
    std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(top), cells.end(), ranks_before);
    cells.resize(top);

    CandidateList out;
    for (const Candidate& c : cells) {
        bool local_max = true;
        double sum = 0.0;
        int count = 0;
        for (int dk = -kNeighbourhood; dk <= kNeighbourhood && local_max; ++dk) {
            for (int dl = -kNeighbourhood; dl <= kNeighbourhood; ++dl) {
                if (dk == 0 && dl == 0) continue;
                cplx v;
                if (!surface.lookup(c.k + dk, c.l + dl, v)) continue;
                const double mag = std::abs(v);
                if (mag > c.magnitude) {
                    local_max = false;
                    break;
                }
                sum += mag;
                ++count;
            }
        }
        if (!local_max) continue;
        const double mean = count > 0 ? sum / count : 0.0;
        if (c.magnitude > cfar_factor * mean) out.entries.push_back(c);
    }
    return out;
}

std::string_view to_string(ModelKind kind) {
    return kind == ModelKind::Linear ? "linear" : "rrc";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "linear") return ModelKind::Linear;
    if (name == "rrc") return ModelKind::RrcAutocorr;
    throw std::invalid_argument("unknown interpolation model '" + std::string(name) + "'");
}

ModelValue model_ambiguity(const InterpolationModel& model, double tau, double nu) {
    if (!(std::abs(tau) <= 1.0 && std::abs(nu) <= 1.0)) return {0.0, false};
    const double window = model.kind == ModelKind::Linear
                              ? window_autocorr_linear(nu)
                              : (1.0 + model.beta_w) * window_autocorr_rrc(nu, model.beta_w);
    return {pulse_matched_autocorr(model.pulse, tau) * window, true};
}

PeakPatch model_patch(const InterpolationModel& model, double alpha, double eps_t, double eps_f,
                      int k0, int l0) {
    PeakPatch p;
    p.k0 = k0;
    p.l0 = l0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) p.v[i][j] = alpha * model_ambiguity(model, j - eps_t, i - eps_f).value;
    }
    return p;
}

double objective(const PeakPatch& patch, double alpha, double eps_t, double eps_f,
                 const InterpolationModel& model) {
    double loss = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double r = patch.at(i, j) - alpha * model_ambiguity(model, j - eps_t, i - eps_f).value;
            loss += r * r;
        }
    }
    return loss;
}

FractionalFit fractional_estimate(const PeakPatch& patch, const InterpolationModel& model,
                                  const FitOptions& options) {
    const double peak = model_ambiguity(model, 0.0, 0.0).value;
    double alpha0 = peak > 0.0 ? patch.at(0, 0) / peak : 0.0;
    if (!(alpha0 > 0.0)) {
        for (const auto& row : patch.v) {
            for (double x : row) alpha0 = std::max(alpha0, x);
        }
    }
    const Point step{std::max(0.1 * alpha0, 1e-3), 0.1, 0.1};
    auto f = [&](const Point& x) { return objective(patch, x[0], x[1], x[2], model); };

    FractionalFit best;
    best.loss = std::numeric_limits<double>::infinity();
    for (double et : {0.25, 0.75}) {
        for (double ef : {0.25, 0.75}) {
            SimplexResult r = nelder_mead(f, {alpha0, et, ef}, step, options);
            best.evaluations += r.evaluations;
            // Fresh simplices at the optimum escape premature collapse; repeat while they help.
            const Point small{step[0] * 1e-2, 1e-3, 1e-3};
            for (int restart = 0; restart < kMaxRestarts; ++restart) {
                const SimplexResult r2 = nelder_mead(f, r.x, small, options);
                best.evaluations += r2.evaluations;
                const bool improved = r2.f < r.f;
                r.converged = r.converged || r2.converged;
                if (!improved) break;
                r.x = r2.x;
                r.f = r2.f;
            }
            if (r.f < best.loss) {
                best.alpha = r.x[0];
                best.eps_t = r.x[1];
                best.eps_f = r.x[2];
                best.loss = r.f;
            }
            best.converged = best.converged || r.converged;
        }
    }
    return best;
}

PeakPatch extract_patch(const AmbiguitySurface& surface, int k, int l, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("extract_patch: scale must be > 0");
    auto mag = [&](int kk, int ll) {
        cplx v;
        return surface.lookup(kk, ll, v) ? std::abs(v) : -1.0;
    };
    const int k0 = mag(k + 1, l) >= mag(k - 1, l) ? k : k - 1;
    const int l0 = mag(k, l + 1) >= mag(k, l - 1) ? l : l - 1;
    PeakPatch p;
    p.k0 = k0;
    p.l0 = l0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            cplx v;
            if (!surface.lookup(k0 + i, l0 + j, v)) {
                throw std::out_of_range("extract_patch: 2x2 block leaves the surface at (" +
                                        std::to_string(k0 + i) + ", " + std::to_string(l0 + j) + ")");
            }
            p.v[i][j] = std::abs(v) / scale;
        }
    }
    return p;
}

PathEstimate to_path_estimate(const PeakPatch& patch, const FractionalFit& fit) {
    PathEstimate e;
    e.k_hat = patch.k0;
    e.l_hat = patch.l0;
    e.eps_f_hat = fit.eps_f;
    e.eps_t_hat = fit.eps_t;
    e.alpha_hat = fit.alpha;
    e.converged = fit.converged;
    if (e.eps_f_hat >= 1.0) {
        e.eps_f_hat -= 1.0;
        ++e.k_hat;
    }
    if (e.eps_t_hat >= 1.0) {
        e.eps_t_hat -= 1.0;
        ++e.l_hat;
    }
    return e;
}

Association associate(std::span<const BinPosition> estimates, std::span<const BinPosition> truths,
                      double radius) {
    struct Pair {
        double dist;
        int e;
        int t;
    };
    std::vector<Pair> pairs;
    for (std::size_t e = 0; e < estimates.size(); ++e) {
        for (std::size_t t = 0; t < truths.size(); ++t) {
            const double dd = std::abs(estimates[e].doppler - truths[t].doppler);
            const double dl = std::abs(estimates[e].delay - truths[t].delay);
            if (dd <= radius && dl <= radius) {
                pairs.push_back({std::hypot(dd, dl), static_cast<int>(e), static_cast<int>(t)});
            }
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.dist < b.dist; });
    std::vector<bool> e_used(estimates.size(), false);
    std::vector<bool> t_used(truths.size(), false);
    Association out;
    for (const Pair& p : pairs) {
        if (e_used[static_cast<std::size_t>(p.e)] || t_used[static_cast<std::size_t>(p.t)]) continue;
        e_used[static_cast<std::size_t>(p.e)] = true;
        t_used[static_cast<std::size_t>(p.t)] = true;
        out.pairs.emplace_back(p.e, p.t);
    }
    out.missed = static_cast<int>(std::count(t_used.begin(), t_used.end(), false));
    out.spurious = static_cast<int>(std::count(e_used.begin(), e_used.end(), false));
    return out;
}

double rmse(std::span<const double> estimates, std::span<const double> truths) {
    if (estimates.size() != truths.size()) throw std::invalid_argument("rmse: length mismatch");
    if (estimates.empty()) throw std::invalid_argument("rmse: empty input");
    RmseAccumulator acc;
    for (std::size_t i = 0; i < estimates.size(); ++i) acc.add(estimates[i] - truths[i]);
    return acc.value();
}

double RmseAccumulator::value() const {
    if (count_ == 0) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(sum_sq_ / static_cast<double>(count_));
}

}  // namespace otfsr
