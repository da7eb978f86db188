#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ldd {

struct OvertoneSeries {
    double fundamental = 0.0;
    std::vector<double> overtones;

    friend bool operator==(const OvertoneSeries&, const OvertoneSeries&) = default;
};

struct DetunedSeries {
    double fundamental = 0.0;
    std::vector<double> overtones;
    double loss_applied = 0.0;

    friend bool operator==(const DetunedSeries&, const DetunedSeries&) = default;
};

class OutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

inline constexpr int kDefaultOvertoneCount = 3;
inline constexpr double kLossCap = 1.0;

/// Twelve-tone equal temperament, A4 (MIDI 69) = 440 Hz.
inline double midi_to_hz(int note) {
    if (note < 0 || note > 127) throw OutOfRange("midi note outside 0..127");
    return 440.0 * std::exp2((note - 69) / 12.0);
}

/// Fundamental plus k harmonics 2f, 3f, ..., (k+1)f.
inline OvertoneSeries harmonic_series(double fundamental, int k = kDefaultOvertoneCount) {
    if (!(fundamental > 0.0)) throw std::invalid_argument("harmonic_series: fundamental must be > 0");
    if (k < 1) throw std::invalid_argument("harmonic_series: need at least one overtone");
    OvertoneSeries series{fundamental, {}};
    series.overtones.reserve(static_cast<std::size_t>(k));
    for (int i = 2; i <= k + 1; ++i) series.overtones.push_back(i * fundamental);
    return series;
}

/// Scales every overtone by 1 + min(loss, cap); the fundamental is untouched.
inline DetunedSeries detune(const OvertoneSeries& series, double loss, double cap = kLossCap) {
    if (!(loss >= 0.0) || !std::isfinite(loss)) {
        throw std::invalid_argument("detune: loss must be finite and non-negative");
    }
    const double effective = std::min(loss, cap);
    DetunedSeries out{series.fundamental, series.overtones, effective};
    const double factor = 1.0 + effective;
    for (double& f : out.overtones) f *= factor;
    return out;
}

}  // namespace ldd
