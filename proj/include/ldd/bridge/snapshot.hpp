#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ldd/bridge/json_out.hpp"
#include "ldd/performance.hpp"

namespace ldd {

/// Published view of the engine: the loss, its partials and everything the
/// renderer and synthesizer need for one frame.
struct StateSnapshot {
    int part = 1;
    CurveKind kind = CurveKind::Cubic;
    bool active = false;                // false until the part's first target
    std::vector<double> target_params;  // same layout as theta
    std::vector<int> frequencies;       // nx, ny, nz for Lissajous knots
    std::vector<double> theta;
    double loss = 0.0;
    std::vector<double> grad;
    DistortionParams distortion;
    std::vector<std::pair<int, DetunedSeries>> detuned_notes;
    std::uint64_t step_count = 0;
    double timestamp_ms = 0.0;
};

inline StateSnapshot take_snapshot(const EngineState& state) {
    StateSnapshot snap;
    snap.part = part_number(state.part);
    snap.kind = curve_kind_for(state.part);
    snap.distortion = state.distortion;
    snap.timestamp_ms = state.now_ms;
    if (state.learn) {
        const LearnState& learn = *state.learn;
        snap.active = true;
        snap.kind = learn.kind;
        snap.target_params = learnable_params(learn.target);
        if (const auto* knot = std::get_if<LissajousParams>(&learn.target)) {
            auto f = knot->frequencies();
            snap.frequencies.assign(f.begin(), f.end());
        }
        snap.theta = learn.theta;
        snap.loss = learn.last_loss;
        snap.grad = learn.last_grad;
        snap.step_count = learn.step_count;
    }
    for (const auto& entry : state.detune_out) snap.detuned_notes.push_back(entry);
    return snap;
}

namespace detail {

inline void write_distortion(std::string& out, const DistortionParams& d) {
    using namespace json_out;
    out += '{';
    key(out, "rgb_offsets");
    out += '[';
    for (std::size_t i = 0; i < 3; ++i) {
        if (i) out += ',';
        numbers<double>(out, d.rgb_offsets[i]);
    }
    out += "],";
    key(out, "displacement_phase");
    numbers<double>(out, d.displacement_phase);
    out += ',';
    key(out, "scale");
    number(out, d.scale);
    out += '}';
}

inline void write_detuned(std::string& out, const DetunedSeries& s) {
    using namespace json_out;
    key(out, "fundamental");
    number(out, s.fundamental);
    out += ',';
    key(out, "overtones");
    numbers<double>(out, s.overtones);
    out += ',';
    key(out, "loss");
    number(out, s.loss_applied);
}

}  // namespace detail

inline std::string snapshot_json(const StateSnapshot& s) {
    using namespace json_out;
    std::string out = "{";
    key(out, "type");
    string(out, "snapshot");
    out += ',';
    key(out, "part");
    integer(out, s.part);
    out += ',';
    key(out, "kind");
    string(out, to_string(s.kind));
    out += ',';
    key(out, "active");
    out += s.active ? "true" : "false";
    out += ',';
    key(out, "target_params");
    numbers<double>(out, s.target_params);
    out += ',';
    key(out, "frequencies");
    numbers<int>(out, s.frequencies);
    out += ',';
    key(out, "theta");
    numbers<double>(out, s.theta);
    out += ',';
    key(out, "loss");
    number(out, s.loss);
    out += ',';
    key(out, "grad");
    numbers<double>(out, s.grad);
    out += ',';
    key(out, "distortion");
    detail::write_distortion(out, s.distortion);
    out += ',';
    key(out, "detuned_notes");
    out += '[';
    for (std::size_t i = 0; i < s.detuned_notes.size(); ++i) {
        if (i) out += ',';
        out += '{';
        key(out, "note");
        integer(out, s.detuned_notes[i].first);
        out += ',';
        detail::write_detuned(out, s.detuned_notes[i].second);
        out += '}';
    }
    out += "],";
    key(out, "step_count");
    integer(out, static_cast<std::int64_t>(s.step_count));
    out += ',';
    key(out, "timestamp_ms");
    number(out, s.timestamp_ms);
    out += '}';
    return out;
}

}  // namespace ldd
