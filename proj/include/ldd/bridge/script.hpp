#pragma once

#include <charconv>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ldd {

/// Line format: `<at_ms> <kind> [note] [velocity]` where kind is one of
/// on, off, advance, end. `#` starts a comment; blank lines are skipped.
/// `on`/`off` take a note and an optional velocity (defaults 64 / 0).
/// `end` must appear exactly once, as the last event.
struct ScriptedEvent {
    enum class Kind { NoteOn, NoteOff, AdvancePart, End };

    std::uint64_t at_ms = 0;
    Kind kind = Kind::End;
    int note = 0;
    int velocity = 0;

    friend bool operator==(const ScriptedEvent&, const ScriptedEvent&) = default;
};

class ScriptError : public std::runtime_error {
public:
    ScriptError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class ParseError : public ScriptError {
public:
    using ScriptError::ScriptError;
};

class OrderError : public ScriptError {
public:
    using ScriptError::ScriptError;
};

namespace detail {

template <typename Int>
bool parse_int(std::string_view token, Int& value) {
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && !(line[j] == ' ' || line[j] == '\t' || line[j] == '\r')) ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
    }
    return tokens;
}

}  // namespace detail

inline std::vector<ScriptedEvent> parse_script(std::string_view text) {
    std::vector<ScriptedEvent> events;
    std::size_t line_no = 0;
    bool ended = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto tok = detail::split_ws(line);
        if (tok.empty()) continue;

        if (ended) throw ParseError(line_no, "event after 'end'");
        ScriptedEvent ev;
        if (!detail::parse_int(tok[0], ev.at_ms)) throw ParseError(line_no, "bad timestamp '" + std::string(tok[0]) + "'");

        if (tok.size() < 2) throw ParseError(line_no, "missing event kind");
        const std::string_view kind = tok[1];
        if (kind == "on" || kind == "off") {
            ev.kind = kind == "on" ? ScriptedEvent::Kind::NoteOn : ScriptedEvent::Kind::NoteOff;
            if (tok.size() < 3 || tok.size() > 4) throw ParseError(line_no, "expected: <at_ms> on|off <note> [velocity]");
            if (!detail::parse_int(tok[2], ev.note) || ev.note < 0 || ev.note > 127) {
                throw ParseError(line_no, "note must be an integer in 0..127");
            }
            ev.velocity = ev.kind == ScriptedEvent::Kind::NoteOn ? 64 : 0;
            if (tok.size() == 4 && (!detail::parse_int(tok[3], ev.velocity) || ev.velocity < 0 || ev.velocity > 127)) {
                throw ParseError(line_no, "velocity must be an integer in 0..127");
            }
        } else if (kind == "advance" || kind == "end") {
            if (tok.size() != 2) throw ParseError(line_no, "'" + std::string(kind) + "' takes no arguments");
            ev.kind = kind == "end" ? ScriptedEvent::Kind::End : ScriptedEvent::Kind::AdvancePart;
            ended = ev.kind == ScriptedEvent::Kind::End;
        } else {
            throw ParseError(line_no, "unknown event kind '" + std::string(kind) + "'");
        }

        if (!events.empty() && ev.at_ms < events.back().at_ms) {
            throw OrderError(line_no, "timestamp decreases");
        }
        events.push_back(ev);
    }
    if (!ended) throw ParseError(line_no, "script has no 'end' event");
    return events;
}

}  // namespace ldd
