#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>

#include "ldd/performance.hpp"

namespace ldd {

/// Owns the engine state and drives it on a clock: ticks fire on a fixed grid
/// of tick_ms, plus one partial tick up to each incoming event time so held
/// durations are credited exactly. Both the headless replay and the live loop
/// go through this, which keeps their step accounting identical.
class Conductor {
public:
    using ActionSink = std::function<void(double t_ms, PerformancePart part, const Action&)>;

    Conductor(const EngineConfig& config, double tick_ms, ActionSink sink = {})
        : state_(make_engine(config)), tick_ms_(tick_ms), sink_(std::move(sink)) {
        if (!(tick_ms > 0.0)) throw std::invalid_argument("Conductor: tick_ms must be > 0");
    }

    const EngineState& state() const { return state_; }
    double now() const { return state_.now_ms; }

    void advance_to(double t_ms) {
        while (static_cast<double>(tick_index_ + 1) * tick_ms_ <= t_ms) {
            ++tick_index_;
            run_tick(static_cast<double>(tick_index_) * tick_ms_ - state_.now_ms);
        }
        if (state_.now_ms < t_ms) run_tick(t_ms - state_.now_ms);
    }

    void note(NoteEvent ev) {
        if (ev.timestamp_ms < state_.now_ms) ev.timestamp_ms = state_.now_ms;
        advance_to(ev.timestamp_ms);
        deliver(handle_event(std::move(state_), ev));
    }

    void advance_part(double t_ms) {
        advance_to(t_ms);
        state_ = ldd::advance_part(std::move(state_));
    }

private:
    void run_tick(double dt) {
        if (dt < 0.0) dt = 0.0;
        deliver(tick(std::move(state_), dt));
    }

    void deliver(Transition tr) {
        state_ = std::move(tr.state);
        if (!sink_) return;
        for (const Action& a : tr.actions) sink_(state_.now_ms, state_.part, a);
    }

    EngineState state_;
    double tick_ms_;
    std::uint64_t tick_index_ = 0;
    ActionSink sink_;
};

}  // namespace ldd
