// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ldd/ldd.hpp"
#include "support/files.hpp"
#include "support/osc_reference.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---------------------------------------------------------------------------

Outcome gradient_oracle() {
    constexpr int kTrialsPerKind = 100;
    constexpr double kH = 1e-6;
    constexpr double kRelTol = 1e-6;
    constexpr double kAbsTol = 1e-9;
    constexpr double kMaxSeconds = 5.0;

    const auto t0 = Clock::now();
    ldd::Rng rng(20240101);
    int failures = 0;
    double worst = 0.0;
    for (auto kind : {ldd::CurveKind::Cubic, ldd::CurveKind::Lissajous}) {
        for (int i = 0; i < kTrialsPerKind; ++i) {
            const auto s = ldd::random_learn_state(kind, rng);
            const auto check = ldd::compare_gradients(ldd::loss(s).grad, ldd::finite_diff_gradient(s, kH), kRelTol, kAbsTol);
            failures += !check.ok;
            worst = std::max(worst, check.max_relative_error);
        }
    }
    const double elapsed = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d states, %d failures, max rel err %.3g, %.3f s", 2 * kTrialsPerKind, failures,
                  worst, elapsed);
    return {failures == 0 && elapsed < kMaxSeconds, buf};
}

// Steps until loss < threshold; returns true if reached within max_steps.
bool converges(ldd::LearnState s, double threshold, int max_steps) {
    for (int k = 0; k <= max_steps; ++k) {
        if (ldd::loss(s).loss < threshold) return true;
        if (k == max_steps) break;
        s = ldd::step(s, ldd::kDefaultAlpha);
    }
    return false;
}

Outcome convergence() {
    constexpr int kSeeds = 100;
    constexpr double kCubicThreshold = 1e-3;
    constexpr int kCubicSteps = 500;
    constexpr int kCubicRequired = 95;
    constexpr double kKnotThreshold = 1e-2;
    constexpr int kKnotSteps = 2000;
    constexpr int kKnotRequired = 90;
    constexpr double kMaxSeconds = 30.0;

    const auto t0 = Clock::now();
    int cubic_ok = 0, knot_ok = 0;
    for (int seed = 0; seed < kSeeds; ++seed) {
        ldd::Rng rng(static_cast<std::uint64_t>(seed));
        cubic_ok += converges(ldd::random_learn_state(ldd::CurveKind::Cubic, rng), kCubicThreshold, kCubicSteps);
        ldd::Rng rng2(static_cast<std::uint64_t>(seed));
        knot_ok += converges(ldd::random_learn_state(ldd::CurveKind::Lissajous, rng2), kKnotThreshold, kKnotSteps);
    }
    const double elapsed = seconds_since(t0);
    char buf[200];
    std::snprintf(buf, sizeof buf, "cubic %d/%d below 1e-3 in 500 steps (need %d), lissajous %d/%d below 1e-2 in 2000 (need %d), %.2f s",
                  cubic_ok, kSeeds, kCubicRequired, knot_ok, kSeeds, kKnotRequired, elapsed);
    return {cubic_ok >= kCubicRequired && knot_ok >= kKnotRequired && elapsed < kMaxSeconds, buf};
}

Outcome descent() {
    constexpr int kTrials = 100;
    constexpr double kAlpha = 1e-3;
    constexpr double kTol = 1e-12;
    ldd::Rng rng(77);
    int violations = 0;
    double worst_increase = -INFINITY;
    for (int i = 0; i < kTrials; ++i) {
        const auto kind = i % 2 ? ldd::CurveKind::Cubic : ldd::CurveKind::Lissajous;
        const auto s = ldd::random_learn_state(kind, rng);
        const double before = ldd::loss(s).loss;
        const double after = ldd::loss(ldd::step(s, kAlpha)).loss;
        worst_increase = std::max(worst_increase, after - before);
        violations += !(after <= before + kTol);
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "%d steps, %d increases, largest change %.3g", kTrials, violations, worst_increase);
    return {violations == 0, buf};
}

Outcome detune_arithmetic() {
    const ldd::OvertoneSeries a{440.0, {880.0, 1320.0, 1760.0}};
    const auto same = ldd::detune(a, 0.0);
    const auto half = ldd::detune(a, 0.5);
    const bool identity = same.fundamental == a.fundamental && same.overtones == a.overtones;
    const bool halfway = half.fundamental == 440.0 && half.overtones == std::vector<double>{1320.0, 1980.0, 2640.0};
    const bool from_note = ldd::harmonic_series(ldd::midi_to_hz(69), 3) == a;
    return {identity && halfway && from_note,
            std::string("loss 0 identity ") + (identity ? "exact" : "WRONG") + ", loss 0.5 -> {440; 1320, 1980, 2640} " +
                (halfway ? "exact" : "WRONG")};
}

Outcome golden_replay() {
    const std::string script = ldd::testing::slurp(ldd::testing::kPerformanceScript);
    const std::string golden = ldd::testing::slurp(ldd::testing::kPerformanceGolden);
    const auto events = ldd::parse_script(script);
    if (events.back().at_ms < 60000) return {false, "bundled script shorter than 60 s"};

    std::ostringstream first, second;
    const auto stats = ldd::replay(events, ldd::EngineConfig{}, first);
    ldd::replay(events, ldd::EngineConfig{}, second);

    bool parts[5] = {};
    {
        std::istringstream in(first.str());
        std::string line;
        while (std::getline(in, line)) {
            const auto p = line.find("\"part\":");
            if (p != std::string::npos) parts[line[p + 7] - '0'] = true;
        }
    }
    const bool all_parts = parts[1] && parts[2] && parts[3] && parts[4];
    const bool repeat = first.str() == second.str();
    const bool matches = first.str() == golden;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu actions, %llu steps; rerun %s, golden %s, all 4 parts %s", stats.actions,
                  static_cast<unsigned long long>(stats.steps), repeat ? "identical" : "DIFFERS",
                  matches ? "identical" : "DIFFERS", all_parts ? "present" : "MISSING");
    return {repeat && matches && all_parts, buf};
}

Outcome osc_conformance() {
    const auto events = ldd::parse_script(ldd::testing::slurp(ldd::testing::kPerformanceScript));
    ldd::Conductor conductor(ldd::EngineConfig{}, ldd::kReplayTickMs);
    std::size_t messages = 0, failures = 0;
    std::string first_error;

    auto check_snapshot = [&](const ldd::StateSnapshot& snap) {
        const auto packets = ldd::encode_osc(snap);
        std::size_t detune_index = 0;
        for (const auto& p : packets) {
            ++messages;
            try {
                if (p.size() % 4 != 0) throw std::runtime_error("length not a multiple of 4");
                const auto m = ldd::testing::decode_osc(p);
                if (m.address == "/ldd/loss") {
                    if (m.tags != "f" || m.floats(0) != static_cast<float>(snap.loss)) throw std::runtime_error("loss mismatch");
                } else if (m.address == "/ldd/grad") {
                    if (m.tags != std::string(snap.grad.size(), 'f')) throw std::runtime_error("grad tags");
                    for (std::size_t i = 0; i < snap.grad.size(); ++i) {
                        if (m.floats(i) != static_cast<float>(snap.grad[i])) throw std::runtime_error("grad mismatch");
                    }
                } else if (m.address == "/ldd/detune") {
                    const auto& [note, series] = snap.detuned_notes.at(detune_index++);
                    if (m.tags != "i" + std::string(1 + series.overtones.size(), 'f')) throw std::runtime_error("detune tags");
                    if (m.ints(0) != note || m.floats(1) != static_cast<float>(series.fundamental)) {
                        throw std::runtime_error("detune header mismatch");
                    }
                    for (std::size_t k = 0; k < series.overtones.size(); ++k) {
                        if (m.floats(2 + k) != static_cast<float>(series.overtones[k])) throw std::runtime_error("overtone mismatch");
                    }
                } else if (m.address == "/ldd/part") {
                    if (m.tags != "i" || m.ints(0) != snap.part) throw std::runtime_error("part mismatch");
                } else {
                    throw std::runtime_error("unexpected address " + m.address);
                }
            } catch (const std::exception& e) {
                if (failures++ == 0) first_error = e.what();
            }
        }
        if (detune_index != snap.detuned_notes.size()) {
            if (failures++ == 0) first_error = "missing detune messages";
        }
    };

    // Snapshot on a 60 Hz publish grid across the whole performance.
    std::size_t next = 0;
    for (double t = 0.0; t <= static_cast<double>(events.back().at_ms); t += 1000.0 / 60.0) {
        while (next < events.size() && static_cast<double>(events[next].at_ms) <= t) {
            const auto& ev = events[next++];
            if (ev.kind == ldd::ScriptedEvent::Kind::AdvancePart) {
                conductor.advance_part(static_cast<double>(ev.at_ms));
            } else if (ev.kind != ldd::ScriptedEvent::Kind::End) {
                conductor.note(ldd::to_note_event(ev));
            }
        }
        conductor.advance_to(t);
        check_snapshot(ldd::take_snapshot(conductor.state()));
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu messages decoded, %zu failures%s%s", messages, failures,
                  failures ? ": " : "", first_error.c_str());
    return {failures == 0 && messages > 0, buf};
}

Outcome zero_gradient_distortion() {
    bool ok = true;
    for (std::size_t n : {2u, 3u, 4u}) {
        const std::vector<double> zero(n, 0.0);
        for (double gain : {1.0, 40.0, 1e6}) {
            const auto d = ldd::compute_distortion(zero, gain);
            for (const auto& o : d.rgb_offsets) ok &= o[0] == 0.0 && o[1] == 0.0;
            ok &= d.displacement_phase[0] == 1.0 && d.displacement_phase[1] == 1.0;
        }
    }
    return {ok, ok ? "rgb offsets all (0,0), displacement phase (1,1)" : "non-identity output"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"gradient-oracle", gradient_oracle},
        {"convergence", convergence},
        {"descent-property", descent},
        {"detune-arithmetic", detune_arithmetic},
        {"golden-replay", golden_replay},
        {"osc-conformance", osc_conformance},
        {"zero-gradient-distortion", zero_gradient_distortion},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("[%s] %-26s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed ? 1 : 0;
}
