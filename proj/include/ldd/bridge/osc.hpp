#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "ldd/bridge/snapshot.hpp"

namespace ldd::osc {

using Packet = std::vector<std::uint8_t>;

/// Builder for a single OSC 1.0 message with int32 and float32 arguments.
/// Arguments are buffered until bytes() so the type-tag string can precede them.
class Message {
public:
    explicit Message(std::string address) : address_(std::move(address)) {}

    Message& add_int32(std::int32_t v) {
        tags_ += 'i';
        put_u32(args_, static_cast<std::uint32_t>(v));
        return *this;
    }

    Message& add_float32(float v) {
        tags_ += 'f';
        put_u32(args_, std::bit_cast<std::uint32_t>(v));
        return *this;
    }

    Message& add_float32(double v) { return add_float32(static_cast<float>(v)); }

    Packet bytes() const {
        Packet out;
        put_padded_string(out, address_);
        put_padded_string(out, "," + tags_);
        out.insert(out.end(), args_.begin(), args_.end());
        return out;
    }

private:
    static void put_u32(Packet& out, std::uint32_t v) {
        out.push_back(static_cast<std::uint8_t>(v >> 24));
        out.push_back(static_cast<std::uint8_t>(v >> 16));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v));
    }

    // NUL-terminated, zero-padded to a multiple of 4 bytes.
    static void put_padded_string(Packet& out, std::string_view s) {
        out.insert(out.end(), s.begin(), s.end());
        std::size_t pad = 4 - (s.size() % 4);
        out.insert(out.end(), pad, 0);
    }

    std::string address_;
    std::string tags_;
    Packet args_;
};

inline constexpr std::string_view kLossAddress = "/ldd/loss";
inline constexpr std::string_view kGradAddress = "/ldd/grad";
inline constexpr std::string_view kDetuneAddress = "/ldd/detune";
inline constexpr std::string_view kPartAddress = "/ldd/part";

/// Telemetry for one snapshot: loss, grad, one detune message per sounding
/// note, then part. Standalone messages, no bundles.
inline std::vector<Packet> encode_snapshot(const StateSnapshot& snap) {
    std::vector<Packet> packets;
    packets.push_back(Message(std::string(kLossAddress)).add_float32(snap.loss).bytes());

    Message grad{std::string(kGradAddress)};
    for (double g : snap.grad) grad.add_float32(g);
    packets.push_back(grad.bytes());

    for (const auto& [note, series] : snap.detuned_notes) {
        Message detune{std::string(kDetuneAddress)};
        detune.add_int32(note).add_float32(series.fundamental);
        for (double f : series.overtones) detune.add_float32(f);
        packets.push_back(detune.bytes());
    }

    packets.push_back(Message(std::string(kPartAddress)).add_int32(snap.part).bytes());
    return packets;
}

}  // namespace ldd::osc

namespace ldd {

inline std::vector<osc::Packet> encode_osc(const StateSnapshot& snap) { return osc::encode_snapshot(snap); }

}  // namespace ldd
