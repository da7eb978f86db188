#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ldd/bridge/action_log.hpp"
#include "ldd/performance.hpp"

namespace {

using ldd::Action;
using ldd::EngineState;
using ldd::NoteEvent;
using ldd::PerformancePart;

template <typename T>
std::size_t count_of(const std::vector<Action>& actions) {
    std::size_t n = 0;
    for (const auto& a : actions) n += std::holds_alternative<T>(a);
    return n;
}

NoteEvent on(int note, double t, int velocity = 90) { return {note, velocity, true, t}; }
NoteEvent off(int note, double t) { return {note, 0, false, t}; }

EngineState engine_in(PerformancePart part, std::uint64_t seed = 7) {
    ldd::EngineConfig config;
    config.seed = seed;
    auto s = ldd::make_engine(config);
    while (s.part != part) s = ldd::advance_part(std::move(s));
    return s;
}

// Applies an event and returns the actions, updating the state in place.
std::vector<Action> apply(EngineState& s, const NoteEvent& ev) {
    auto tr = ldd::handle_event(std::move(s), ev);
    s = std::move(tr.state);
    return std::move(tr.actions);
}

std::vector<Action> run_tick(EngineState& s, double dt) {
    auto tr = ldd::tick(std::move(s), dt);
    s = std::move(tr.state);
    return std::move(tr.actions);
}

TEST(HandleEvent, BassNoteInPart1ResamplesCubic) {
    auto s = engine_in(PerformancePart::Part1);
    const auto actions = apply(s, on(40, 0));
    ASSERT_EQ(actions.size(), 2u);
    const auto& nt = std::get<ldd::NewTarget>(actions[0]);
    EXPECT_EQ(ldd::kind_of(nt.target), ldd::CurveKind::Cubic);
    EXPECT_TRUE(std::holds_alternative<ldd::NewApproximant>(actions[1]));
    ASSERT_TRUE(s.learn);
    EXPECT_EQ(s.learn->step_count, 0u);
    EXPECT_EQ(s.learn->target, nt.target);
}

TEST(HandleEvent, UpperNoteInPart1TakesOneStep) {
    auto s = engine_in(PerformancePart::Part1);
    apply(s, on(40, 0));
    const auto before = *s.learn;
    const auto actions = apply(s, on(72, 10));
    EXPECT_EQ(s.learn->step_count, before.step_count + 1);
    ASSERT_EQ(actions.size(), 1u);
    const auto& d = std::get<ldd::Detune>(actions[0]);
    EXPECT_EQ(d.note, 72);
    EXPECT_EQ(d.series.loss_applied, std::min(s.learn->last_loss, 1.0));
    EXPECT_EQ(s.learn->last_loss, ldd::loss(before).loss);
    EXPECT_EQ(d.series, ldd::detune(ldd::harmonic_series(ldd::midi_to_hz(72), 3), s.learn->last_loss));
    EXPECT_EQ(s.detune_out.at(72), d.series);
}

TEST(HandleEvent, UpperNoteWithoutTargetDoesNothing) {
    auto s = engine_in(PerformancePart::Part1);
    EXPECT_TRUE(apply(s, on(72, 0)).empty());
    EXPECT_FALSE(s.learn);
    EXPECT_EQ(s.total_steps, 0u);
}

TEST(HandleEvent, Part4SpawnsBubble) {
    auto s = engine_in(PerformancePart::Part4);
    apply(s, on(36, 0));
    const auto actions = apply(s, on(84, 5, 101));
    ASSERT_EQ(count_of<ldd::SpawnBubble>(actions), 1u);
    EXPECT_EQ(count_of<ldd::Detune>(actions), 1u);
    const auto& b = std::get<ldd::SpawnBubble>(actions.back());
    EXPECT_EQ(b.note, 84);
    EXPECT_EQ(b.velocity, 101);
}

TEST(HandleEvent, ChordWithinWindowResamplesOnce) {
    auto s = engine_in(PerformancePart::Part2);
    EXPECT_TRUE(apply(s, on(48, 1000)).empty());
    EXPECT_TRUE(apply(s, on(52, 1020)).empty());
    const auto third = apply(s, on(55, 1040));
    ASSERT_EQ(count_of<ldd::NewTarget>(third), 1u);
    EXPECT_EQ(ldd::kind_of(std::get<ldd::NewTarget>(third[0]).target), ldd::CurveKind::Lissajous);
    EXPECT_TRUE(s.chord_active);
    EXPECT_TRUE(apply(s, on(57, 1045)).empty());
}

TEST(HandleEvent, SpreadNotesAreNotAChord) {
    auto s = engine_in(PerformancePart::Part2);
    apply(s, on(48, 0));
    apply(s, on(52, 30));
    EXPECT_TRUE(apply(s, on(55, 60)).empty());  // 48 struck 60 ms earlier
    EXPECT_FALSE(s.learn);
    // A fourth note close to the last two completes a chord of three.
    EXPECT_EQ(count_of<ldd::NewTarget>(apply(s, on(59, 70))), 1u);
}

TEST(HandleEvent, ChordReleaseStopsStepping) {
    auto s = engine_in(PerformancePart::Part3);
    apply(s, on(48, 0));
    apply(s, on(52, 0));
    apply(s, on(55, 0));
    run_tick(s, 100);
    const auto steps = s.learn->step_count;
    EXPECT_EQ(steps, 3u);
    apply(s, off(52, 100));
    EXPECT_FALSE(s.chord_active);
    run_tick(s, 1000);
    EXPECT_EQ(s.learn->step_count, steps);
}

TEST(HandleEvent, UpperNoteInPart2DetunesWithoutStepping) {
    auto s = engine_in(PerformancePart::Part2);
    apply(s, on(48, 0));
    apply(s, on(52, 0));
    apply(s, on(55, 0));
    const auto actions = apply(s, on(72, 10));
    ASSERT_EQ(actions.size(), 1u);
    EXPECT_EQ(std::get<ldd::Detune>(actions[0]).series.loss_applied, std::min(1.0, s.learn->last_loss));
    EXPECT_EQ(s.learn->step_count, 0u);
}

TEST(HandleEvent, ZeroVelocityNoteOnIsNoteOff) {
    auto s = engine_in(PerformancePart::Part2);
    apply(s, on(48, 0));
    apply(s, on(52, 0));
    apply(s, on(55, 0));
    apply(s, NoteEvent{55, 0, true, 5});
    EXPECT_FALSE(s.chord_active);
    EXPECT_EQ(s.held_chord.count(55), 0u);
}

TEST(HandleEvent, InvalidEventIgnored) {
    auto s = engine_in(PerformancePart::Part1);
    EXPECT_TRUE(apply(s, NoteEvent{200, 10, true, 0}).empty());
    EXPECT_TRUE(apply(s, NoteEvent{40, -3, true, 0}).empty());
    EXPECT_EQ(s.ignored_events, 2u);
    EXPECT_FALSE(s.learn);
}

TEST(HandleEvent, DivergenceResamplesThetaKeepsTarget) {
    ldd::EngineConfig config;
    config.alpha = INFINITY;  // any non-zero partial overflows
    auto s = ldd::make_engine(config);
    apply(s, on(40, 0));
    const auto target = s.learn->target;
    const auto theta = s.learn->theta;
    const auto actions = apply(s, on(72, 1));
    ASSERT_EQ(actions.size(), 1u);
    const auto& na = std::get<ldd::NewApproximant>(actions[0]);
    EXPECT_EQ(s.learn->target, target);
    EXPECT_NE(na.theta, theta);
    EXPECT_EQ(na.theta, s.learn->theta);
    EXPECT_TRUE(s.learn->valid());
}

TEST(Tick, HeldChordRunsAtConfiguredRate) {
    auto s = engine_in(PerformancePart::Part2);
    apply(s, on(48, 0));
    apply(s, on(52, 0));
    apply(s, on(55, 0));
    apply(s, on(72, 0));
    apply(s, on(79, 0));
    const auto actions = run_tick(s, 1000);
    EXPECT_EQ(s.learn->step_count, 30u);
    EXPECT_EQ(count_of<ldd::Detune>(actions), 60u);  // two sounding upper notes
    EXPECT_EQ(count_of<ldd::DistortionUpdate>(actions), 1u);
}

TEST(Tick, NoChordNoSteps) {
    auto s = engine_in(PerformancePart::Part2);
    apply(s, on(48, 0));
    apply(s, on(52, 0));
    apply(s, on(55, 0));
    apply(s, off(48, 1));
    run_tick(s, 10);  // absorb the pending distortion refresh
    const auto before = s;
    const auto actions = run_tick(s, 1000);
    EXPECT_TRUE(actions.empty());
    EXPECT_EQ(*s.learn, *before.learn);
    EXPECT_EQ(s.distortion, before.distortion);
}

TEST(Tick, FractionalCarry) {
    // Accumulator oracle: 3 x 333 ms at 30/s = 29.97 steps -> floor 29.
    double acc = 0.0;
    std::uint64_t expected = 0;
    for (int i = 0; i < 3; ++i) {
        acc += 333.0 * 30.0 / 1000.0;
        expected += static_cast<std::uint64_t>(std::floor(acc));
        acc -= std::floor(acc);
    }
    ASSERT_EQ(expected, 29u);

    auto s = engine_in(PerformancePart::Part3);
    apply(s, on(48, 0));
    apply(s, on(52, 0));
    apply(s, on(55, 0));
    for (int i = 0; i < 3; ++i) run_tick(s, 333);
    EXPECT_EQ(s.learn->step_count, expected);
    // The remainder carries: 30 more ticks of 333 + 1 ms -> total time 11 s, 330 steps.
    for (int i = 0; i < 30; ++i) run_tick(s, 333);
    run_tick(s, 11.0 * 1000 - 33 * 333);
    EXPECT_EQ(s.learn->step_count, 330u);
}

TEST(Tick, Part1RefreshesDistortionWithoutStepping) {
    auto s = engine_in(PerformancePart::Part1);
    apply(s, on(40, 0));
    const auto first = run_tick(s, 16);
    ASSERT_EQ(first.size(), 1u);
    const auto& d = std::get<ldd::DistortionUpdate>(first[0]);
    EXPECT_EQ(d.params, ldd::compute_distortion(s.learn->last_grad, 40.0));
    EXPECT_TRUE(run_tick(s, 16).empty());  // unchanged -> no new update
    EXPECT_EQ(s.learn->step_count, 0u);
}

TEST(Tick, NoActionsWithoutTarget) {
    auto s = engine_in(PerformancePart::Part2);
    EXPECT_TRUE(run_tick(s, 500).empty());
    EXPECT_THROW(run_tick(s, -1), std::invalid_argument);
}

TEST(ComputeDistortion, ZeroGradientIsIdentity) {
    const std::vector<double> zero{0, 0, 0};
    const auto d = ldd::compute_distortion(zero, 123.0);
    for (const auto& o : d.rgb_offsets) {
        EXPECT_EQ(o[0], 0.0);
        EXPECT_EQ(o[1], 0.0);
    }
    EXPECT_EQ(d.displacement_phase[0], 1.0);
    EXPECT_EQ(d.displacement_phase[1], 1.0);
    EXPECT_EQ(d.scale, 123.0);
}

TEST(ComputeDistortion, Arithmetic) {
    const std::vector<double> g{0.5, -0.25, 0.1};
    const auto d = ldd::compute_distortion(g, 40.0);
    EXPECT_EQ(d.rgb_offsets[0], (ldd::Offset2{20, 0}));
    EXPECT_EQ(d.rgb_offsets[1], (ldd::Offset2{0, -10}));
    EXPECT_NEAR(d.rgb_offsets[2][0], 4.0, 1e-12);
    EXPECT_NEAR(d.rgb_offsets[2][1], 4.0, 1e-12);
}

TEST(ComputeDistortion, CosinePhaseAndShortGrad) {
    const std::vector<double> g{std::numbers::pi, std::numbers::pi / 2};
    const auto d = ldd::compute_distortion(g, 1.0);
    EXPECT_NEAR(d.displacement_phase[0], -1.0, 1e-12);
    EXPECT_NEAR(d.displacement_phase[1], 0.0, 1e-12);
    EXPECT_EQ(d.rgb_offsets[2], (ldd::Offset2{0, 0}));
    const std::vector<double> one{1.0};
    EXPECT_THROW(ldd::compute_distortion(one, 1.0), std::invalid_argument);
}

TEST(AdvancePart, CyclesAndResets) {
    auto s = engine_in(PerformancePart::Part1);
    apply(s, on(40, 0));
    apply(s, on(72, 1));
    s = ldd::advance_part(std::move(s));
    EXPECT_EQ(s.part, PerformancePart::Part2);
    EXPECT_FALSE(s.learn);
    EXPECT_TRUE(s.held_chord.empty());
    EXPECT_TRUE(s.detune_out.empty());
    s = ldd::advance_part(ldd::advance_part(std::move(s)));
    EXPECT_EQ(s.part, PerformancePart::Part4);
    s = ldd::advance_part(std::move(s));
    EXPECT_EQ(s.part, PerformancePart::Part1);
}

// Random event streams: invariants that must hold after every transition.
class RandomStream : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RandomStream, Invariants) {
    ldd::Rng gen(GetParam());
    ldd::EngineConfig config;
    config.seed = GetParam();
    auto s = ldd::make_engine(config);
    double t = 0.0;
    std::uint64_t expected_steps = 0;
    double acc = 0.0;
    for (int i = 0; i < 3000; ++i) {
        const double r = gen.uniform01();
        std::vector<Action> actions;
        const bool had_learn = s.learn.has_value();
        if (r < 0.02) {
            s = ldd::advance_part(std::move(s));
            acc = 0.0;
        } else if (r < 0.5) {
            const double dt = static_cast<double>(gen.uniform_int(0, 40));
            t += dt;
            const bool stepping = !ldd::is_note_driven(s.part) && s.chord_active && s.learn;
            if (stepping) {
                acc += dt * config.steps_per_second_held / 1000.0;
                const double whole = std::floor(acc + ldd::kStepCarryEpsilon);
                expected_steps += static_cast<std::uint64_t>(whole);
                acc -= whole;
            }
            actions = run_tick(s, dt);
        } else {
            const int note = static_cast<int>(gen.uniform_int(30, 90));
            const bool is_on = gen.uniform01() < 0.6;
            const bool counts = is_on && note >= config.split_note && s.learn && ldd::is_note_driven(s.part);
            const bool was_active = s.chord_active;
            actions = apply(s, NoteEvent{note, is_on ? 80 : 0, is_on, t});
            if (counts) ++expected_steps;
            if (!was_active && s.chord_active) acc = 0.0;
        }
        if (!had_learn && !s.learn) {
            EXPECT_TRUE(actions.empty());
        }
        if (!had_learn) {
            for (const auto& a : actions) {
                EXPECT_TRUE(std::holds_alternative<ldd::NewTarget>(a) ||
                            std::holds_alternative<ldd::NewApproximant>(a));
            }
        }
        if (s.learn) {
            EXPECT_EQ(s.learn->kind, ldd::curve_kind_for(s.part));
            EXPECT_TRUE(s.learn->valid());
        }
        for (const auto& [note, onset] : s.held_chord) EXPECT_LT(note, config.split_note);
    }
    EXPECT_EQ(s.total_steps, expected_steps);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomStream, ::testing::Values(1u, 2u, 3u, 4u, 5u, 6u));

TEST(Determinism, IdenticalStreamsGiveIdenticalActionLogs) {
    auto run = [] {
        auto s = engine_in(PerformancePart::Part1, 1234);
        std::string log;
        const NoteEvent script[] = {on(40, 0), on(72, 10), on(74, 20), on(45, 30), on(76, 40)};
        for (const auto& ev : script) {
            for (const auto& a : apply(s, ev)) log += ldd::action_json(s.now_ms, s.part, a) + "\n";
            for (const auto& a : run_tick(s, 5)) log += ldd::action_json(s.now_ms, s.part, a) + "\n";
        }
        return log;
    };
    const auto a = run();
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, run());
}

}  // namespace
