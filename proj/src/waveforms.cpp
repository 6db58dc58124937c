// SPDX-License-Identifier: Apache-2.0
#include "otfsr/waveforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace otfsr {

namespace {

// Distance below which a removable singularity is replaced by its limit.
constexpr double kSingularityGuard = 1e-8;

void require_rolloff(double beta, const char* what) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw std::domain_error(std::string(what) + ": roll-off must lie in (0, 1], got " +
                                std::to_string(beta));
    }
}

double sqrt_rc(double x, double beta) { return std::sqrt(raised_cosine_spectrum(x, beta)); }

double simpson(double lo, double hi, double max_step, auto&& f) {
    const double width = hi - lo;
    if (width <= 0.0) return 0.0;
    auto n = static_cast<long>(std::ceil(width / max_step));
    if (n % 2 != 0) ++n;
    const double h = width / static_cast<double>(n);
    double acc = f(lo) + f(hi);
    for (long i = 1; i < n; ++i) {
        acc += (i % 2 != 0 ? 4.0 : 2.0) * f(lo + h * static_cast<double>(i));
    }
    return acc * h / 3.0;
}

}  // namespace

void PulseShape::validate() const {
    if (kind == PulseKind::Rrc) require_rolloff(beta, "rrc pulse");
}

void WindowShape::validate() const {
    if (kind == WindowKind::Rrc) {
        require_rolloff(beta, "rrc window");
        if (span < 1) throw std::domain_error("rrc window: span must be >= 1");
    }
}

std::string_view to_string(PulseKind kind) {
    switch (kind) {
        case PulseKind::Rect: return "rect";
        case PulseKind::Sinc: return "sinc";
        case PulseKind::Rrc: return "rrc";
    }
    return "?";
}

std::string_view to_string(WindowKind kind) {
    return kind == WindowKind::Rect ? "rect" : "rrc";
}

PulseKind parse_pulse_kind(std::string_view name) {
    if (name == "rect") return PulseKind::Rect;
    if (name == "sinc") return PulseKind::Sinc;
    if (name == "rrc") return PulseKind::Rrc;
    throw std::invalid_argument("unknown pulse kind '" + std::string(name) + "'");
}

WindowKind parse_window_kind(std::string_view name) {
    if (name == "rect") return WindowKind::Rect;
    if (name == "rrc") return WindowKind::Rrc;
    throw std::invalid_argument("unknown window kind '" + std::string(name) + "'");
}

double raised_cosine_spectrum(double x, double beta) {
    require_rolloff(beta, "raised_cosine_spectrum");
    const double f = std::abs(x);
    const double lo = 0.5 * (1.0 - beta);
    const double hi = 0.5 * (1.0 + beta);
    if (f < lo) return 1.0;
    if (f > hi) return 0.0;
    return 0.5 * (1.0 + std::cos(kPi / beta * (f - lo)));
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = kPi * x;
    return std::sin(px) / px;
}

double rrc_impulse(double t, double beta) {
    if (std::abs(t) < kSingularityGuard) return 1.0 - beta + 4.0 * beta / kPi;
    const double q = 4.0 * beta * t;
    if (std::abs(1.0 - q * q) < kSingularityGuard) {
        const double arg = kPi / (4.0 * beta);
        return beta / std::sqrt(2.0) *
               ((1.0 + 2.0 / kPi) * std::sin(arg) + (1.0 - 2.0 / kPi) * std::cos(arg));
    }
    const double num = std::sin(kPi * t * (1.0 - beta)) + q * std::cos(kPi * t * (1.0 + beta));
    return num / (kPi * t * (1.0 - q * q));
}

double rc_impulse(double t, double beta) {
    const double q = 2.0 * beta * t;
    if (std::abs(1.0 - q * q) < kSingularityGuard) {
        return kPi / 4.0 * sinc(1.0 / (2.0 * beta));
    }
    return sinc(t) * std::cos(kPi * beta * t) / (1.0 - q * q);
}

double pulse_value(const PulseShape& shape, double t) {
    switch (shape.kind) {
        case PulseKind::Rect: {
            const double a = std::abs(t);
            if (a < 0.5) return 1.0;
            return a == 0.5 ? 0.5 : 0.0;
        }
        case PulseKind::Sinc: return sinc(t);
        case PulseKind::Rrc: return rrc_impulse(t, shape.beta);
    }
    return 0.0;
}

double pulse_grid_value(const PulseShape& shape, int i, int os) {
    if (shape.kind == PulseKind::Rect) return 2 * i >= -os && 2 * i < os ? 1.0 : 0.0;
    return pulse_value(shape, static_cast<double>(i) / static_cast<double>(os));
}

double pulse_matched_autocorr(const PulseShape& shape, double tau) {
    switch (shape.kind) {
        case PulseKind::Rect: return std::max(0.0, 1.0 - std::abs(tau));
        case PulseKind::Sinc: return sinc(tau);
        case PulseKind::Rrc: return rc_impulse(tau, shape.beta);
    }
    return 0.0;
}

double pulse_support(const PulseShape& shape) {
    return shape.kind == PulseKind::Rect ? 0.5 : std::numeric_limits<double>::infinity();
}

std::size_t window_length(const WindowShape& shape, int n_doppler, int m_delay) {
    if (n_doppler < 1 || m_delay < 1) throw std::invalid_argument("window: N and M must be >= 1");
    const auto nm = static_cast<double>(n_doppler) * m_delay;
    if (shape.kind == WindowKind::Rect) return static_cast<std::size_t>(n_doppler) * m_delay;
    shape.validate();
    // small guard so that e.g. 1.25 * 64 lands on 80 and not 79.999...
    return static_cast<std::size_t>(std::floor(shape.span * (1.0 + shape.beta) * nm + 1e-9));
}

RVector window_samples(const WindowShape& shape, int n_doppler, int m_delay) {
    const std::size_t len = window_length(shape, n_doppler, m_delay);
    if (shape.kind == WindowKind::Rect) return RVector(len, 1.0);

    // RRC pulse whose symbol period is (1+beta)NT, centred on the support.
    const double period = (1.0 + shape.beta) * n_doppler * m_delay;
    const double centre = 0.5 * (static_cast<double>(len) - 1.0);
    RVector w(len);
    for (std::size_t l = 0; l < len; ++l) {
        w[l] = rrc_impulse((static_cast<double>(l) - centre) / period, shape.beta);
    }
    return w;
}

double window_autocorr_linear(double nu) {
    const double a = std::abs(nu);
    return a <= 1.0 ? 1.0 - a : 0.0;
}

double window_autocorr_rrc(double nu, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw std::domain_error("window_autocorr_rrc: roll-off must lie in (0, 1)");
    }
    const double v = std::abs(nu);
    const double a = (1.0 - beta) / (2.0 * (1.0 + beta));
    const double b = kPi * (1.0 + beta) / (2.0 * beta);
    using std::cos;
    using std::sin;

    if (v <= 0.5 - a) {
        return 0.5 * cos(b * v) * (1.0 - 2.0 * v - 2.0 * a) + sin(b - b * v - 2.0 * b * a) / (2.0 * b) -
               1.5 / b * sin(-b * v) + 2.0 * a - v;
    }
    if (v <= 2.0 * a) {
        return 2.0 / b * sin(0.5 * b - b * a) + 2.0 * a - v;
    }
    if (v <= a + 0.5) {
        return 2.0 / b * (sin(0.5 * b - b * a) - sin(-2.0 * b * a + b * v)) +
               1.0 / (4.0 * b) * (sin(-2.0 * b * a + b * v) - sin(2.0 * b * (a - v) + b * v)) +
               0.5 * cos(b * v - 2.0 * b * a) * (v - 2.0 * a);
    }
    if (v <= 1.0) {
        return 0.5 * (sin(b - b * v) / b + cos(-2.0 * b * a + b * v) * (1.0 - v));
    }
    return 0.0;
}

double numeric_spectrum_autocorr(double nu, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw std::domain_error("numeric_spectrum_autocorr: roll-off must lie in (0, 1)");
    }
    // The first factor lives on |x| <= 1/2, the second on |x - nu| <= 1/2.
    const double lo = std::max(-0.5, nu - 0.5);
    const double hi = std::min(0.5, nu + 0.5);
    if (hi <= lo) return 0.0;

    // Split at every kink of either factor so that each piece is smooth.
    const double flat = (1.0 - beta) / (2.0 * (1.0 + beta));
    std::vector<double> knots{lo, hi, -flat, flat, nu - flat, nu + flat};
    std::sort(knots.begin(), knots.end());
    auto integrand = [&](double x) {
        return sqrt_rc((1.0 + beta) * x, beta) * sqrt_rc((1.0 + beta) * (x - nu), beta);
    };
    constexpr double kStep = 1.0 / 4096.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double a = std::max(knots[i], lo);
        const double b = std::min(knots[i + 1], hi);
        if (b > a) acc += simpson(a, b, kStep, integrand);
    }
    return acc;
}

}  // namespace otfsr
