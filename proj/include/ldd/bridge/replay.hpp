#pragma once

#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "ldd/bridge/action_log.hpp"
#include "ldd/bridge/conductor.hpp"
#include "ldd/bridge/script.hpp"

namespace ldd {

/// Tick period of headless replays.
inline constexpr double kReplayTickMs = 20.0;

struct ReplayStats {
    std::size_t actions = 0;
    std::uint64_t steps = 0;
    double end_ms = 0.0;
};

inline NoteEvent to_note_event(const ScriptedEvent& ev) {
    return NoteEvent{ev.note, ev.velocity, ev.kind == ScriptedEvent::Kind::NoteOn,
                     static_cast<double>(ev.at_ms)};
}

/// Runs a parsed script on simulated time and writes the action log as
/// JSON lines. Output depends only on (events, config, tick_ms).
inline ReplayStats replay(std::span<const ScriptedEvent> events, const EngineConfig& config,
                          std::ostream& log, double tick_ms = kReplayTickMs) {
    ReplayStats stats;
    Conductor conductor(config, tick_ms, [&](double t, PerformancePart part, const Action& a) {
        log << action_json(t, part, a) << '\n';
        ++stats.actions;
    });
    for (const ScriptedEvent& ev : events) {
        const auto at = static_cast<double>(ev.at_ms);
        switch (ev.kind) {
            case ScriptedEvent::Kind::NoteOn:
            case ScriptedEvent::Kind::NoteOff:
                conductor.note(to_note_event(ev));
                break;
            case ScriptedEvent::Kind::AdvancePart:
                conductor.advance_part(at);
                break;
            case ScriptedEvent::Kind::End:
                conductor.advance_to(at);
                stats.steps = conductor.state().total_steps;
                stats.end_ms = conductor.now();
                return stats;
        }
    }
    stats.steps = conductor.state().total_steps;
    stats.end_ms = conductor.now();
    return stats;
}

inline ReplayStats replay_script(std::string_view script_text, const EngineConfig& config,
                                 std::ostream& log, double tick_ms = kReplayTickMs) {
    const auto events = parse_script(script_text);
    return replay(events, config, log, tick_ms);
}

}  // namespace ldd
