#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ldd/rng.hpp"

namespace ldd {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Cubic polynomial a·x³ + b·x² + c·x + d.
struct CubicParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    std::array<double, 4> coefficients() const { return {a, b, c, d}; }

    bool valid() const {
        return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
    }

    friend CubicParams operator+(const CubicParams& p, const CubicParams& q) {
        return {p.a + q.a, p.b + q.b, p.c + q.c, p.d + q.d};
    }
    friend bool operator==(const CubicParams&, const CubicParams&) = default;
};

/// Lissajous knot t ↦ (cos(nx·t + pa), cos(ny·t + pb), cos(nz·t + pc)).
/// The integer frequencies are fixed per knot; only the phases are learnable.
struct LissajousParams {
    int nx = 1;
    int ny = 1;
    int nz = 1;
    double pa = 0.0;
    double pb = 0.0;
    double pc = 0.0;

    std::array<int, 3> frequencies() const { return {nx, ny, nz}; }
    std::array<double, 3> phases() const { return {pa, pb, pc}; }

    bool valid() const {
        return nx >= 1 && ny >= 1 && nz >= 1 && std::isfinite(pa) && std::isfinite(pb) &&
               std::isfinite(pc);
    }

    friend bool operator==(const LissajousParams&, const LissajousParams&) = default;
};

using Vec3 = std::array<double, 3>;

/// Uniform half-open grid over [lo, hi).
struct SampleGrid {
    double lo = -1.0;
    double hi = 1.0;
    std::size_t count = 64;

    bool valid() const { return lo < hi && count >= 2 && std::isfinite(lo) && std::isfinite(hi); }

    friend bool operator==(const SampleGrid&, const SampleGrid&) = default;
};

inline constexpr std::size_t kDefaultGridCount = 64;

inline SampleGrid default_cubic_grid() { return {-1.0, 1.0, kDefaultGridCount}; }
inline SampleGrid default_lissajous_grid() { return {0.0, kTwoPi, kDefaultGridCount}; }

// Horner form.
inline double eval_cubic(const CubicParams& p, double x) {
    return ((p.a * x + p.b) * x + p.c) * x + p.d;
}

inline Vec3 eval_lissajous(const LissajousParams& p, double t) {
    return {std::cos(p.nx * t + p.pa), std::cos(p.ny * t + p.pb), std::cos(p.nz * t + p.pc)};
}

inline std::vector<double> sample_points(const SampleGrid& grid) {
    if (!grid.valid()) throw std::invalid_argument("sample_points: invalid grid");
    std::vector<double> points(grid.count);
    const double span = grid.hi - grid.lo;
    const double n = static_cast<double>(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        points[i] = grid.lo + static_cast<double>(i) * span / n;
    }
    return points;
}

inline constexpr double kCubicCoeffLo = -1.0;
inline constexpr double kCubicCoeffHi = 1.0;
inline constexpr int kLissajousFreqMin = 1;
inline constexpr int kLissajousFreqMax = 7;

inline CubicParams sample_target_cubic(Rng& rng) {
    CubicParams p;
    p.a = rng.uniform(kCubicCoeffLo, kCubicCoeffHi);
    p.b = rng.uniform(kCubicCoeffLo, kCubicCoeffHi);
    p.c = rng.uniform(kCubicCoeffLo, kCubicCoeffHi);
    p.d = rng.uniform(kCubicCoeffLo, kCubicCoeffHi);
    return p;
}

inline LissajousParams sample_target_lissajous(Rng& rng) {
    LissajousParams p;
    p.nx = static_cast<int>(rng.uniform_int(kLissajousFreqMin, kLissajousFreqMax));
    p.ny = static_cast<int>(rng.uniform_int(kLissajousFreqMin, kLissajousFreqMax));
    p.nz = static_cast<int>(rng.uniform_int(kLissajousFreqMin, kLissajousFreqMax));
    p.pa = rng.uniform(0.0, kTwoPi);
    p.pb = rng.uniform(0.0, kTwoPi);
    p.pc = rng.uniform(0.0, kTwoPi);
    return p;
}

}  // namespace ldd
