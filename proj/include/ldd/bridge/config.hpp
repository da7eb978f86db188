#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ldd/performance.hpp"

namespace ldd {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_config_value(std::string_view key, std::string_view value, std::size_t line) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("config line " + std::to_string(line) + ": bad value for '" +
                          std::string(key) + "'");
    }
    return out;
}

}  // namespace detail

/// `key = value` lines over the EngineConfig field names; `#` comments.
/// Keys that are absent keep the values already in `base`.
inline EngineConfig parse_config(std::string_view text, EngineConfig base = {}) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        using detail::parse_config_value;
        if (key == "split_note") base.split_note = parse_config_value<int>(key, value, line_no);
        else if (key == "chord_min_size") base.chord_min_size = parse_config_value<int>(key, value, line_no);
        else if (key == "chord_window_ms") base.chord_window_ms = parse_config_value<double>(key, value, line_no);
        else if (key == "alpha") base.alpha = parse_config_value<double>(key, value, line_no);
        else if (key == "steps_per_second_held") base.steps_per_second_held = parse_config_value<double>(key, value, line_no);
        else if (key == "overtone_count") base.overtone_count = parse_config_value<int>(key, value, line_no);
        else if (key == "distortion_gain") base.distortion_gain = parse_config_value<double>(key, value, line_no);
        else if (key == "seed") base.seed = parse_config_value<std::uint64_t>(key, value, line_no);
        else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
    try {
        base.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return base;
}

inline EngineConfig load_config(const std::string& path, EngineConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), base);
}

}  // namespace ldd
