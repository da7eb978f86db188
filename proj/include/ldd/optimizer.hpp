#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ldd/curves.hpp"
#include "ldd/rng.hpp"

namespace ldd {

enum class CurveKind { Cubic, Lissajous };

inline const char* to_string(CurveKind kind) {
    return kind == CurveKind::Cubic ? "cubic" : "lissajous";
}

inline constexpr std::size_t theta_size(CurveKind kind) {
    return kind == CurveKind::Cubic ? 4 : 3;
}

using Target = std::variant<CubicParams, LissajousParams>;

inline CurveKind kind_of(const Target& target) {
    return std::holds_alternative<CubicParams>(target) ? CurveKind::Cubic : CurveKind::Lissajous;
}

/// Learnable part of a target, laid out like theta.
inline std::vector<double> learnable_params(const Target& target) {
    if (const auto* cubic = std::get_if<CubicParams>(&target)) {
        auto c = cubic->coefficients();
        return {c.begin(), c.end()};
    }
    auto p = std::get<LissajousParams>(target).phases();
    return {p.begin(), p.end()};
}

struct LossReport {
    double loss = 0.0;
    std::vector<double> grad;
};

/// Optimizer state for one learning episode: a fixed target, a fixed sample
/// grid, and the learned parameters theta (a,b,c,d for cubics, the three
/// phases for Lissajous knots).
struct LearnState {
    CurveKind kind = CurveKind::Cubic;
    std::vector<double> theta;
    Target target;
    SampleGrid grid;
    std::uint64_t step_count = 0;
    double last_loss = 0.0;
    std::vector<double> last_grad;

    bool valid() const {
        return kind_of(target) == kind && theta.size() == theta_size(kind) &&
               last_grad.size() == theta.size() && last_loss >= 0.0 && grid.valid();
    }

    friend bool operator==(const LearnState&, const LearnState&) = default;
};

/// Raised by step() when the update leaves the finite reals.
class NonFiniteUpdate : public std::runtime_error {
public:
    NonFiniteUpdate() : std::runtime_error("gradient step produced a non-finite parameter") {}
};

namespace detail {

inline LossReport cubic_loss(const std::vector<double>& theta, const CubicParams& target,
                             const SampleGrid& grid) {
    const CubicParams learned{theta[0], theta[1], theta[2], theta[3]};
    const auto xs = sample_points(grid);
    const double n = static_cast<double>(xs.size());
    LossReport report{0.0, std::vector<double>(4, 0.0)};
    for (double x : xs) {
        const double r = eval_cubic(learned, x) - eval_cubic(target, x);
        report.loss += r * r;
        const double x2 = x * x;
        report.grad[0] += r * x2 * x;
        report.grad[1] += r * x2;
        report.grad[2] += r * x;
        report.grad[3] += r;
    }
    report.loss /= n;
    for (double& g : report.grad) g *= 2.0 / n;
    return report;
}

inline LossReport lissajous_loss(const std::vector<double>& theta, const LissajousParams& target,
                                 const SampleGrid& grid) {
    const auto ts = sample_points(grid);
    const double n = static_cast<double>(ts.size());
    const auto freq = target.frequencies();
    const auto true_phase = target.phases();
    LossReport report{0.0, std::vector<double>(3, 0.0)};
    for (double t : ts) {
        for (std::size_t c = 0; c < 3; ++c) {
            const double arg = freq[c] * t + theta[c];
            const double r = std::cos(arg) - std::cos(freq[c] * t + true_phase[c]);
            report.loss += r * r;
            report.grad[c] += r * -std::sin(arg);
        }
    }
    report.loss /= n;
    for (double& g : report.grad) g *= 2.0 / n;
    return report;
}

inline LossReport evaluate(CurveKind kind, const std::vector<double>& theta, const Target& target,
                           const SampleGrid& grid) {
    if (theta.size() != theta_size(kind) || kind_of(target) != kind) {
        throw std::invalid_argument("loss: theta/target do not match curve kind");
    }
    if (kind == CurveKind::Cubic) return cubic_loss(theta, std::get<CubicParams>(target), grid);
    return lissajous_loss(theta, std::get<LissajousParams>(target), grid);
}

}  // namespace detail

/// Mean squared residual over the grid and its analytic gradient in theta.
/// For Lissajous knots the residual is the 3-vector and its squared Euclidean
/// norm is averaged.
inline LossReport loss(const LearnState& state) {
    return detail::evaluate(state.kind, state.theta, state.target, state.grid);
}

/// Central-difference gradient of loss() in theta.
inline std::vector<double> finite_diff_gradient(const LearnState& state, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite_diff_gradient: h must be positive");
    std::vector<double> grad(state.theta.size());
    std::vector<double> probe = state.theta;
    for (std::size_t j = 0; j < probe.size(); ++j) {
        const double saved = probe[j];
        probe[j] = saved + h;
        const double up = detail::evaluate(state.kind, probe, state.target, state.grid).loss;
        probe[j] = saved - h;
        const double down = detail::evaluate(state.kind, probe, state.target, state.grid).loss;
        probe[j] = saved;
        grad[j] = (up - down) / (2.0 * h);
    }
    return grad;
}

inline constexpr double kDefaultAlpha = 0.1;

/// One plain gradient-descent update. last_loss and last_grad describe the
/// theta the step started from.
inline LearnState step(const LearnState& state, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("step: alpha must be positive");
    const LossReport report = loss(state);
    LearnState next = state;
    for (std::size_t j = 0; j < next.theta.size(); ++j) {
        next.theta[j] -= alpha * report.grad[j];
        if (!std::isfinite(next.theta[j])) throw NonFiniteUpdate();
    }
    next.step_count = state.step_count + 1;
    next.last_loss = report.loss;
    next.last_grad = report.grad;
    return next;
}

inline std::vector<double> init_theta(CurveKind kind, Rng& rng) {
    std::vector<double> theta(theta_size(kind));
    if (kind == CurveKind::Cubic) {
        for (double& v : theta) v = rng.uniform(kCubicCoeffLo, kCubicCoeffHi);
    } else {
        for (double& v : theta) v = rng.uniform(0.0, kTwoPi);
    }
    return theta;
}

inline SampleGrid default_grid(CurveKind kind) {
    return kind == CurveKind::Cubic ? default_cubic_grid() : default_lissajous_grid();
}

/// Fresh episode at step 0, with last_loss/last_grad filled in for the
/// starting theta.
inline LearnState make_learn_state(Target target, std::vector<double> theta) {
    LearnState state;
    state.kind = kind_of(target);
    state.target = std::move(target);
    state.theta = std::move(theta);
    state.grid = default_grid(state.kind);
    LossReport report = loss(state);
    state.last_loss = report.loss;
    state.last_grad = std::move(report.grad);
    return state;
}

/// Draws a target and an approximant from rng, in that order.
inline LearnState random_learn_state(CurveKind kind, Rng& rng) {
    Target target = kind == CurveKind::Cubic ? Target{sample_target_cubic(rng)}
                                             : Target{sample_target_lissajous(rng)};
    auto theta = init_theta(kind, rng);
    return make_learn_state(std::move(target), std::move(theta));
}

/// Componentwise agreement check used by the gradient verification sweep:
/// absolute error within abs_tol, or relative error below rel_tol.
struct GradientCheck {
    double max_relative_error = 0.0;
    double max_absolute_error = 0.0;
    bool ok = true;
};

inline GradientCheck compare_gradients(const std::vector<double>& analytic,
                                       const std::vector<double>& numeric, double rel_tol = 1e-6,
                                       double abs_tol = 1e-9) {
    GradientCheck check;
    if (analytic.size() != numeric.size()) {
        check.ok = false;
        return check;
    }
    for (std::size_t j = 0; j < analytic.size(); ++j) {
        const double diff = std::abs(analytic[j] - numeric[j]);
        const double scale = std::max(std::abs(analytic[j]), std::abs(numeric[j]));
        check.max_absolute_error = std::max(check.max_absolute_error, diff);
        if (diff <= abs_tol) continue;
        const double rel = diff / scale;
        check.max_relative_error = std::max(check.max_relative_error, rel);
        if (!(rel < rel_tol)) check.ok = false;
    }
    return check;
}

}  // namespace ldd
