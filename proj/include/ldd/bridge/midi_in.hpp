#pragma once

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <fcntl.h>
#include <functional>
#include <optional>
#include <poll.h>
#include <stdexcept>
#include <string>
#include <sys/stat.h>
#include <unistd.h>
#include <variant>

#include "ldd/bridge/event_queue.hpp"

namespace ldd {

/// Incremental parser for a raw MIDI 1.0 byte stream (running status,
/// interleaved realtime bytes, SysEx skipped). Note-on/off become NoteEvents;
/// Program Change on any channel is the part-advance command.
class MidiParser {
public:
    struct ProgramChange {};
    using Message = std::variant<NoteEvent, ProgramChange>;

    /// Feeds one byte; returns a message when one completes.
    std::optional<Message> feed(std::uint8_t byte, double timestamp_ms) {
        if (byte >= 0xF8) return std::nullopt;  // realtime: clock, start, stop, sensing...
        if (byte & 0x80) {
            if (byte == 0xF0) {
                in_sysex_ = true;
                status_ = 0;
                return std::nullopt;
            }
            if (byte == 0xF7) {
                in_sysex_ = false;
                return std::nullopt;
            }
            in_sysex_ = false;
            // System common messages cancel running status.
            status_ = byte < 0xF0 ? byte : 0;
            count_ = 0;
            return std::nullopt;
        }
        if (in_sysex_ || status_ == 0) return std::nullopt;

        data_[count_++] = byte;
        const std::uint8_t type = status_ & 0xF0;
        const int needed = (type == 0xC0 || type == 0xD0) ? 1 : 2;
        if (count_ < needed) return std::nullopt;
        count_ = 0;

        switch (type) {
            case 0x90: return NoteEvent{data_[0], data_[1], data_[1] > 0, timestamp_ms};
            case 0x80: return NoteEvent{data_[0], data_[1], false, timestamp_ms};
            case 0xC0: return ProgramChange{};
            default: return std::nullopt;
        }
    }

private:
    std::uint8_t status_ = 0;
    std::uint8_t data_[2] = {0, 0};
    int count_ = 0;
    bool in_sysex_ = false;
};

/// Reads raw MIDI bytes from a character device or FIFO (e.g.
/// /dev/snd/midiC1D0) on a background thread and enqueues engine inputs.
class MidiInput {
public:
    /// `name` is a path; a bare name is looked up under /dev/snd/ and /dev/.
    static std::string resolve_device(const std::string& name) {
        struct stat st{};
        if (!name.empty() && name[0] == '/') return name;
        for (const std::string prefix : {"/dev/snd/", "/dev/"}) {
            if (::stat((prefix + name).c_str(), &st) == 0) return prefix + name;
        }
        return name;
    }

    MidiInput(const std::string& name, const MonotonicClock& clock, EventQueue& queue)
        : clock_(clock), queue_(queue) {
        const std::string path = resolve_device(name);
        fd_ = ::open(path.c_str(), O_RDONLY | O_NONBLOCK);
        if (fd_ < 0) throw std::runtime_error("cannot open MIDI input '" + path + "': " + std::strerror(errno));
    }

    MidiInput(const MidiInput&) = delete;
    MidiInput& operator=(const MidiInput&) = delete;
    ~MidiInput() {
        if (fd_ >= 0) ::close(fd_);
    }

    /// Polls until stop is requested; returns on EOF or read error.
    template <typename StopToken>
    void run(StopToken stop) {
        std::uint8_t buf[256];
        while (!stop.stop_requested()) {
            pollfd pfd{fd_, POLLIN, 0};
            const int ready = ::poll(&pfd, 1, 50);
            if (ready < 0 && errno != EINTR) return;
            if (ready <= 0) continue;
            const ssize_t n = ::read(fd_, buf, sizeof buf);
            if (n == 0) {
                if (pfd.revents & POLLHUP) return;
                continue;
            }
            if (n < 0) {
                if (errno == EAGAIN || errno == EINTR) continue;
                return;
            }
            const double now = clock_.now_ms();
            for (ssize_t i = 0; i < n; ++i) {
                auto msg = parser_.feed(buf[i], now);
                if (!msg) continue;
                if (auto* note = std::get_if<NoteEvent>(&*msg)) {
                    queue_.push(*note);
                } else {
                    queue_.push(AdvanceCommand{now});
                }
            }
        }
    }

private:
    const MonotonicClock& clock_;
    EventQueue& queue_;
    MidiParser parser_;
    int fd_ = -1;
};

}  // namespace ldd
