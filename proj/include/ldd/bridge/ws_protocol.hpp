#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ldd/bridge/event_queue.hpp"
#include "ldd/bridge/json_out.hpp"

namespace ldd {

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Decodes one inbound client message:
///   {"type":"note","on":bool,"note":int,"velocity":int}
///   {"type":"advance_part"}
/// The timestamp is assigned by the server, never taken from the client.
inline EngineInput parse_client_message(std::string_view text, double server_time_ms) {
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ProtocolError("invalid JSON");
    if (!doc.is_object()) throw ProtocolError("message must be a JSON object");
    const auto type = doc.find("type");
    if (type == doc.end() || !type->is_string()) throw ProtocolError("missing string field 'type'");

    if (*type == "advance_part") return AdvanceCommand{server_time_ms};
    if (*type != "note") throw ProtocolError("unknown message type '" + type->get<std::string>() + "'");

    const auto on = doc.find("on");
    const auto note = doc.find("note");
    const auto velocity = doc.find("velocity");
    if (on == doc.end() || !on->is_boolean()) throw ProtocolError("note: 'on' must be a boolean");
    if (note == doc.end() || !note->is_number_integer()) throw ProtocolError("note: 'note' must be an integer");
    if (velocity == doc.end() || !velocity->is_number_integer()) {
        throw ProtocolError("note: 'velocity' must be an integer");
    }
    const auto n = note->get<long long>();
    const auto v = velocity->get<long long>();
    if (n < 0 || n > 127) throw ProtocolError("note: 'note' must be in 0..127");
    if (v < 0 || v > 127) throw ProtocolError("note: 'velocity' must be in 0..127");
    return NoteEvent{static_cast<int>(n), static_cast<int>(v), on->get<bool>(), server_time_ms};
}

inline std::string error_frame(std::string_view message) {
    std::string out = "{";
    json_out::key(out, "type");
    json_out::string(out, "error");
    out += ',';
    json_out::key(out, "message");
    json_out::string(out, message);
    out += '}';
    return out;
}

}  // namespace ldd
