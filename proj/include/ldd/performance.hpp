#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "ldd/optimizer.hpp"
#include "ldd/rng.hpp"
#include "ldd/sonics.hpp"

namespace ldd {

struct NoteEvent {
    int note = 0;
    int velocity = 0;
    bool on = false;
    double timestamp_ms = 0.0;

    bool valid() const {
        return note >= 0 && note <= 127 && velocity >= 0 && velocity <= 127 &&
               std::isfinite(timestamp_ms);
    }
};

enum class PerformancePart { Part1 = 1, Part2 = 2, Part3 = 3, Part4 = 4 };

inline int part_number(PerformancePart part) { return static_cast<int>(part); }

inline PerformancePart next_part(PerformancePart part) {
    switch (part) {
        case PerformancePart::Part1: return PerformancePart::Part2;
        case PerformancePart::Part2: return PerformancePart::Part3;
        case PerformancePart::Part3: return PerformancePart::Part4;
        case PerformancePart::Part4: return PerformancePart::Part1;
    }
    return PerformancePart::Part1;
}

/// Parts 1 and 4 learn cubics from single bass notes; parts 2 and 3 learn
/// Lissajous knots from held chords.
inline bool is_note_driven(PerformancePart part) {
    return part == PerformancePart::Part1 || part == PerformancePart::Part4;
}

inline CurveKind curve_kind_for(PerformancePart part) {
    return is_note_driven(part) ? CurveKind::Cubic : CurveKind::Lissajous;
}

using Offset2 = std::array<double, 2>;

struct DistortionParams {
    std::array<Offset2, 3> rgb_offsets{};  // pixels, R / G / B
    Offset2 displacement_phase{1.0, 1.0};
    double scale = 1.0;

    friend bool operator==(const DistortionParams&, const DistortionParams&) = default;
};

/// RGB split offsets from the first three partials (R along x, G along y,
/// B along the diagonal) and the displacement pair (cos g1, cos g2).
inline DistortionParams compute_distortion(std::span<const double> grad, double gain) {
    if (grad.size() < 2) throw std::invalid_argument("compute_distortion: need >= 2 partials");
    const double g1 = grad[0];
    const double g2 = grad[1];
    const double g3 = grad.size() >= 3 ? grad[2] : 0.0;
    DistortionParams out;
    out.rgb_offsets = {Offset2{gain * g1, 0.0}, Offset2{0.0, gain * g2},
                       Offset2{gain * g3, gain * g3}};
    out.displacement_phase = {std::cos(g1), std::cos(g2)};
    out.scale = gain;
    return out;
}

struct EngineConfig {
    int split_note = 60;
    int chord_min_size = 3;
    double chord_window_ms = 50.0;
    double alpha = kDefaultAlpha;
    double steps_per_second_held = 30.0;
    int overtone_count = kDefaultOvertoneCount;
    double distortion_gain = 40.0;
    std::uint64_t seed = 1;

    void validate() const {
        if (split_note < 0 || split_note > 127) throw std::invalid_argument("split_note must be in 0..127");
        if (chord_min_size < 2) throw std::invalid_argument("chord_min_size must be >= 2");
        if (!(chord_window_ms > 0.0)) throw std::invalid_argument("chord_window_ms must be > 0");
        if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
        if (!(steps_per_second_held > 0.0)) throw std::invalid_argument("steps_per_second_held must be > 0");
        if (overtone_count < 1) throw std::invalid_argument("overtone_count must be >= 1");
        if (!(distortion_gain > 0.0)) throw std::invalid_argument("distortion_gain must be > 0");
    }
};

// ---- actions -------------------------------------------------------------

struct NewTarget {
    Target target;
};

struct NewApproximant {
    CurveKind kind = CurveKind::Cubic;
    std::vector<double> theta;
};

struct Detune {
    int note = 0;
    DetunedSeries series;
    std::uint64_t step_count = 0;
};

struct SpawnBubble {
    int note = 0;
    int velocity = 0;
};

struct DistortionUpdate {
    DistortionParams params;
};

using Action = std::variant<NewTarget, NewApproximant, Detune, SpawnBubble, DistortionUpdate>;

// Absorbs rounding in the fractional step accumulator, e.g. 50 x 0.6 summing
// to 29.999999999999996.
inline constexpr double kStepCarryEpsilon = 1e-9;

// ---- engine --------------------------------------------------------------

struct EngineState {
    PerformancePart part = PerformancePart::Part1;
    std::optional<LearnState> learn;
    std::map<int, double> held_chord;  // bass note -> onset time (ms)
    bool chord_active = false;
    double step_accumulator = 0.0;     // fractional steps carried between ticks
    std::map<int, int> sounding;       // upper note -> velocity
    std::map<int, DetunedSeries> detune_out;
    DistortionParams distortion;
    Rng rng;
    EngineConfig config;
    double now_ms = 0.0;
    std::uint64_t total_steps = 0;
    std::uint64_t ignored_events = 0;
};

struct Transition {
    EngineState state;
    std::vector<Action> actions;
};

inline DistortionParams idle_distortion(const EngineConfig& config) {
    const double zero[3] = {0.0, 0.0, 0.0};
    return compute_distortion(zero, config.distortion_gain);
}

inline EngineState make_engine(const EngineConfig& config) {
    config.validate();
    EngineState state;
    state.config = config;
    state.rng = Rng(config.seed);
    state.distortion = idle_distortion(config);
    return state;
}

namespace detail {

inline void resample_target(EngineState& s, std::vector<Action>& out) {
    s.learn = random_learn_state(curve_kind_for(s.part), s.rng);
    out.push_back(NewTarget{s.learn->target});
    out.push_back(NewApproximant{s.learn->kind, s.learn->theta});
}

// Keeps the target, draws a new theta.
inline void recover_divergence(EngineState& s, std::vector<Action>& out) {
    auto theta = init_theta(s.learn->kind, s.rng);
    const std::uint64_t steps = s.learn->step_count;
    s.learn = make_learn_state(s.learn->target, std::move(theta));
    s.learn->step_count = steps;
    out.push_back(NewApproximant{s.learn->kind, s.learn->theta});
}

inline void emit_detune(EngineState& s, int note, std::vector<Action>& out) {
    const auto series = harmonic_series(midi_to_hz(note), s.config.overtone_count);
    DetunedSeries detuned = detune(series, s.learn->last_loss);
    s.detune_out[note] = detuned;
    out.push_back(Detune{note, std::move(detuned), s.learn->step_count});
}

/// Returns false when the step diverged and theta was re-drawn.
inline bool optimizer_step(EngineState& s, std::vector<Action>& out) {
    try {
        s.learn = step(*s.learn, s.config.alpha);
        ++s.total_steps;
        return true;
    } catch (const NonFiniteUpdate&) {
        recover_divergence(s, out);
        return false;
    }
}

inline int count_recent_bass(const EngineState& s, double now) {
    int n = 0;
    for (const auto& [note, onset] : s.held_chord) {
        if (onset >= now - s.config.chord_window_ms) ++n;
    }
    return n;
}

}  // namespace detail

/// Applies one note event. A note-on with velocity 0 is a note-off, as in MIDI.
/// Invalid events are counted in ignored_events and produce no actions.
inline Transition handle_event(EngineState state, const NoteEvent& ev) {
    std::vector<Action> out;
    if (!ev.valid()) {
        ++state.ignored_events;
        return {std::move(state), std::move(out)};
    }
    state.now_ms = std::max(state.now_ms, ev.timestamp_ms);
    const bool on = ev.on && ev.velocity > 0;
    const bool bass = ev.note < state.config.split_note;

    if (bass) {
        if (on) {
            state.held_chord[ev.note] = ev.timestamp_ms;
            if (is_note_driven(state.part)) {
                detail::resample_target(state, out);
            } else if (!state.chord_active &&
                       detail::count_recent_bass(state, ev.timestamp_ms) >= state.config.chord_min_size) {
                detail::resample_target(state, out);
                state.chord_active = true;
                state.step_accumulator = 0.0;
            }
        } else {
            state.held_chord.erase(ev.note);
            if (static_cast<int>(state.held_chord.size()) < state.config.chord_min_size) {
                state.chord_active = false;
            }
        }
        return {std::move(state), std::move(out)};
    }

    if (!on) {
        state.sounding.erase(ev.note);
        state.detune_out.erase(ev.note);
        return {std::move(state), std::move(out)};
    }

    state.sounding[ev.note] = ev.velocity;
    if (!state.learn) return {std::move(state), std::move(out)};

    if (is_note_driven(state.part)) {
        if (detail::optimizer_step(state, out)) {
            detail::emit_detune(state, ev.note, out);
        }
        if (state.part == PerformancePart::Part4) out.push_back(SpawnBubble{ev.note, ev.velocity});
    } else {
        detail::emit_detune(state, ev.note, out);
    }
    return {std::move(state), std::move(out)};
}

/// Advances the clock by dt_ms. While a chord is held in parts 2/3 this runs
/// steps at steps_per_second_held, carrying the fractional remainder. The
/// distortion parameters are refreshed every tick and a DistortionUpdate is
/// emitted whenever they change.
inline Transition tick(EngineState state, double dt_ms) {
    if (!(dt_ms >= 0.0)) throw std::invalid_argument("tick: dt must be >= 0");
    std::vector<Action> out;
    state.now_ms += dt_ms;
    if (!state.learn) return {std::move(state), std::move(out)};

    if (!is_note_driven(state.part) && state.chord_active) {
        state.step_accumulator += dt_ms * state.config.steps_per_second_held / 1000.0;
        const double whole = std::floor(state.step_accumulator + kStepCarryEpsilon);
        state.step_accumulator -= whole;
        for (auto i = static_cast<std::uint64_t>(whole); i > 0; --i) {
            if (!detail::optimizer_step(state, out)) break;
            for (const auto& [note, velocity] : state.sounding) detail::emit_detune(state, note, out);
        }
    }

    DistortionParams fresh = compute_distortion(state.learn->last_grad, state.config.distortion_gain);
    if (fresh != state.distortion) {
        state.distortion = fresh;
        out.push_back(DistortionUpdate{fresh});
    }
    return {std::move(state), std::move(out)};
}

/// Moves to the next part and ends the current episode.
inline EngineState advance_part(EngineState state) {
    state.part = next_part(state.part);
    state.learn.reset();
    state.held_chord.clear();
    state.chord_active = false;
    state.step_accumulator = 0.0;
    state.sounding.clear();
    state.detune_out.clear();
    state.distortion = idle_distortion(state.config);
    return state;
}

}  // namespace ldd
