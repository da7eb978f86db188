#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <variant>

#include "ldd/performance.hpp"

namespace ldd {

/// Milliseconds since construction on the steady clock. Producers stamp
/// inbound events with it so the engine sees one monotonic timeline.
class MonotonicClock {
public:
    double now_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }
    std::chrono::steady_clock::time_point at(double ms) const {
        return start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double, std::milli>(ms));
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct AdvanceCommand {
    double timestamp_ms = 0.0;
};

struct StopCommand {};

using EngineInput = std::variant<NoteEvent, AdvanceCommand, StopCommand>;

/// Multi-producer, single-consumer queue feeding the engine thread.
class EventQueue {
public:
    void push(EngineInput input) {
        {
            std::lock_guard lock(mutex_);
            items_.push_back(std::move(input));
        }
        cv_.notify_one();
    }

    /// Waits until an item is available or the deadline passes.
    template <typename Clock, typename Duration>
    std::optional<EngineInput> pop_until(std::chrono::time_point<Clock, Duration> deadline) {
        std::unique_lock lock(mutex_);
        if (!cv_.wait_until(lock, deadline, [this] { return !items_.empty(); })) return std::nullopt;
        EngineInput item = std::move(items_.front());
        items_.pop_front();
        return item;
    }

    std::optional<EngineInput> try_pop() {
        std::lock_guard lock(mutex_);
        if (items_.empty()) return std::nullopt;
        EngineInput item = std::move(items_.front());
        items_.pop_front();
        return item;
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return items_.size();
    }

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<EngineInput> items_;
};

}  // namespace ldd
