#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <stop_token>
#include <thread>
#include <vector>

#include "ldd/bridge/conductor.hpp"
#include "ldd/bridge/event_queue.hpp"
#include "ldd/bridge/script.hpp"
#include "ldd/bridge/snapshot.hpp"

namespace ldd {

inline constexpr double kDefaultPublishHz = 60.0;

/// The engine's single logical thread in live mode. Consumes the merged input
/// queue in arrival order, ticks on the publish grid and hands an immutable
/// snapshot to every sink at publish_hz.
class LiveEngine {
public:
    using SnapshotSink = std::function<void(const StateSnapshot&)>;
    using ActionSink = Conductor::ActionSink;

    LiveEngine(const EngineConfig& config, const MonotonicClock& clock, double publish_hz = kDefaultPublishHz)
        : clock_(clock),
          period_ms_(1000.0 / publish_hz),
          conductor_(config, 1000.0 / publish_hz, [this](double t, PerformancePart p, const Action& a) {
              for (const auto& sink : action_sinks_) sink(t, p, a);
          }) {}

    LiveEngine(const LiveEngine&) = delete;
    LiveEngine& operator=(const LiveEngine&) = delete;

    EventQueue& queue() { return queue_; }
    void add_snapshot_sink(SnapshotSink sink) { snapshot_sinks_.push_back(std::move(sink)); }
    void add_action_sink(ActionSink sink) { action_sinks_.push_back(std::move(sink)); }

    std::uint64_t publishes() const { return publishes_.load(); }
    const EngineState& state() const { return conductor_.state(); }

    /// Runs until a StopCommand arrives or `interrupt` becomes true.
    void run(const std::atomic<bool>* interrupt = nullptr) {
        double next_publish = clock_.now_ms() + period_ms_;
        while (!(interrupt && interrupt->load())) {
            const double now = clock_.now_ms();
            if (now >= next_publish) {
                publish(now);
                next_publish += period_ms_;
                // Skip missed frames instead of bursting to catch up.
                if (next_publish <= now) next_publish = now + period_ms_;
            }
            auto item = queue_.pop_until(clock_.at(std::min(next_publish, now + 50.0)));
            if (!item) continue;
            if (std::holds_alternative<StopCommand>(*item)) break;
            if (const auto* note = std::get_if<NoteEvent>(&*item)) {
                conductor_.note(*note);
            } else if (const auto* adv = std::get_if<AdvanceCommand>(&*item)) {
                conductor_.advance_part(std::max(adv->timestamp_ms, conductor_.now()));
            }
        }
        publish(clock_.now_ms());
    }

private:
    void publish(double now) {
        conductor_.advance_to(now);
        const StateSnapshot snap = take_snapshot(conductor_.state());
        for (const auto& sink : snapshot_sinks_) sink(snap);
        ++publishes_;
    }

    const MonotonicClock& clock_;
    double period_ms_;
    EventQueue queue_;
    std::vector<SnapshotSink> snapshot_sinks_;
    std::vector<ActionSink> action_sinks_;
    Conductor conductor_;
    std::atomic<std::uint64_t> publishes_{0};
};

/// Plays a parsed script into an engine queue in real time, relative to the
/// moment run() starts. Pushes StopCommand when the script's end is reached.
class ScriptPlayer {
public:
    ScriptPlayer(std::vector<ScriptedEvent> events, const MonotonicClock& clock, EventQueue& queue)
        : events_(std::move(events)), clock_(clock), queue_(queue) {}

    void run(std::stop_token stop) {
        const double origin = clock_.now_ms();
        for (const ScriptedEvent& ev : events_) {
            const double due = origin + static_cast<double>(ev.at_ms);
            while (!stop.stop_requested()) {
                const double wait = due - clock_.now_ms();
                if (wait <= 0) break;
                std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(std::min(wait, 20.0)));
            }
            if (stop.stop_requested()) return;
            switch (ev.kind) {
                case ScriptedEvent::Kind::NoteOn:
                case ScriptedEvent::Kind::NoteOff:
                    queue_.push(NoteEvent{ev.note, ev.velocity, ev.kind == ScriptedEvent::Kind::NoteOn, due});
                    break;
                case ScriptedEvent::Kind::AdvancePart: queue_.push(AdvanceCommand{due}); break;
                case ScriptedEvent::Kind::End: queue_.push(StopCommand{}); return;
            }
        }
    }

private:
    std::vector<ScriptedEvent> events_;
    const MonotonicClock& clock_;
    EventQueue& queue_;
};

}  // namespace ldd
