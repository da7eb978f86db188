#pragma once

#include <string>
#include <variant>

#include "ldd/bridge/json_out.hpp"
#include "ldd/bridge/snapshot.hpp"
#include "ldd/performance.hpp"

namespace ldd {

/// One JSON-lines record of the action log (no trailing newline). Every record
/// starts with the engine time and part, then "action" and its fields. Numbers
/// use the shortest round-trip form so logs compare byte-for-byte.
inline std::string action_json(double t_ms, PerformancePart part, const Action& action) {
    using namespace json_out;
    std::string out = "{";
    key(out, "t");
    number(out, t_ms);
    out += ',';
    key(out, "part");
    integer(out, part_number(part));
    out += ',';
    key(out, "action");

    std::visit(
        [&out](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, NewTarget>) {
                string(out, "new_target");
                out += ',';
                key(out, "kind");
                string(out, to_string(kind_of(a.target)));
                if (const auto* knot = std::get_if<LissajousParams>(&a.target)) {
                    out += ',';
                    key(out, "frequencies");
                    numbers<int>(out, knot->frequencies());
                }
                out += ',';
                key(out, "params");
                numbers<double>(out, learnable_params(a.target));
            } else if constexpr (std::is_same_v<T, NewApproximant>) {
                string(out, "new_approximant");
                out += ',';
                key(out, "kind");
                string(out, to_string(a.kind));
                out += ',';
                key(out, "theta");
                numbers<double>(out, a.theta);
            } else if constexpr (std::is_same_v<T, Detune>) {
                string(out, "detune");
                out += ',';
                key(out, "note");
                integer(out, a.note);
                out += ',';
                key(out, "step");
                integer(out, static_cast<std::int64_t>(a.step_count));
                out += ',';
                detail::write_detuned(out, a.series);
            } else if constexpr (std::is_same_v<T, SpawnBubble>) {
                string(out, "spawn_bubble");
                out += ',';
                key(out, "note");
                integer(out, a.note);
                out += ',';
                key(out, "velocity");
                integer(out, a.velocity);
            } else if constexpr (std::is_same_v<T, DistortionUpdate>) {
                string(out, "distortion");
                out += ',';
                key(out, "params");
                detail::write_distortion(out, a.params);
            }
        },
        action);
    out += '}';
    return out;
}

}  // namespace ldd
