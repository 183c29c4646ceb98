// Copyright 2026 The pulsestack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <numbers>

#include "pulsestack/error.hpp"
#include "pulsestack/passes.hpp"
#include "pulsestack/simulator.hpp"
#include "support/oracles.hpp"

using namespace pulsestack;
using namespace pulsestack::passes;
using std::numbers::pi;

namespace {

const FrameId f0{"f0"};
const FrameId f1{"f1"};

Schedule two_frames() {
    Schedule s;
    s.frames.emplace(f0, make_frame(f0, PortId{"d0"}, 5.0e9));
    s.frames.emplace(f1, make_frame(f1, PortId{"d0"}, 5.0e9));
    return s;
}

Waveform flat(std::int64_t n, double amp = 0.1) {
    return make_parametric_waveform(WaveformTemplate::constant, n, {{"amp", amp}, {"phase", 0.0}});
}

Schedule with(std::vector<PulseInstruction> ins) {
    auto s = two_frames();
    s.instructions = std::move(ins);
    return s;
}

// Frame (hz, rad) seen by every Play and Capture, in program order.
std::vector<std::pair<double, double>> observed_frame_state(const Schedule& s) {
    std::map<FrameId, std::pair<double, double>> state;
    for (const auto& [id, f] : s.frames) state[id] = {f.frequency_hz, f.phase_rad};
    std::vector<std::pair<double, double>> seen;
    for (const auto& ins : s.instructions) {
        if (const auto* p = std::get_if<instr::ShiftPhase>(&ins)) state[p->frame].second += p->delta_rad;
        if (const auto* p = std::get_if<instr::SetPhase>(&ins)) state[p->frame].second = p->phase_rad;
        if (const auto* p = std::get_if<instr::ShiftFrequency>(&ins)) state[p->frame].first += p->delta_hz;
        if (const auto* p = std::get_if<instr::SetFrequency>(&ins)) state[p->frame].first = p->frequency_hz;
        if (const auto* p = std::get_if<instr::Play>(&ins)) seen.push_back(state[p->frame]);
        if (const auto* p = std::get_if<instr::Capture>(&ins)) seen.push_back(state[p->frame]);
    }
    return seen;
}

double circle_gap(double a, double b) {
    const double d = std::fmod(std::abs(a - b), kTwoPi);
    return std::min(d, kTwoPi - d);
}

}  // namespace

TEST(Timing, SequentialOnOneFrame) {
    const auto t = resolve_timing(with({instr::Play{f0, flat(16)}, instr::Play{f0, flat(8)}}));
    EXPECT_EQ(*t.timing, (std::vector<std::int64_t>{0, 16}));
}

TEST(Timing, BarrierLiftsClocks) {
    const auto t = resolve_timing(
        with({instr::Play{f0, flat(16)}, instr::Play{f1, flat(8)}, make_barrier({f0, f1}), instr::Play{f1, flat(4)}}));
    EXPECT_EQ(*t.timing, (std::vector<std::int64_t>{0, 0, 16, 16}));
}

TEST(Timing, FrameUpdatesTakeNoTime) {
    const auto t = resolve_timing(with({instr::ShiftPhase{f0, pi}, instr::Play{f0, flat(8)}}));
    EXPECT_EQ(*t.timing, (std::vector<std::int64_t>{0, 0}));
}

TEST(Timing, ClocksStartAtElapsed) {
    auto s = two_frames();
    s.frames.at(f1).elapsed_samples = 5;
    s.instructions = {instr::Delay{f1, 3}, instr::Play{f0, flat(2)}, make_barrier({f0, f1}),
                      instr::Measure{SiteId{0}, ResultId{0}}};
    EXPECT_EQ(*resolve_timing(s).timing, (std::vector<std::int64_t>{5, 0, 8, 8}));
}

TEST(Timing, UnknownFrame) {
    auto s = with({instr::Delay{FrameId{"zz"}, 3}});
    EXPECT_THROW(resolve_timing(s), Error);
}

TEST(TimingProperty, MatchesClockReplay) {
    testsupport::Rng rng(31);
    testsupport::ScheduleShape shape;
    shape.max_elapsed = 20;
    for (int k = 0; k < 300; ++k) {
        const auto s = testsupport::random_schedule(rng, shape);
        const auto timed = resolve_timing(s);
        ASSERT_EQ(*timed.timing, testsupport::replay_timing(s)) << "schedule " << k;
        EXPECT_NO_THROW(validate_schedule(timed));
    }
}

TEST(MergeDelays, Examples) {
    EXPECT_EQ(merge_delays(with({instr::Delay{f0, 4}, instr::Delay{f0, 4}})).instructions,
              (std::vector<PulseInstruction>{instr::Delay{f0, 8}}));
    const auto blocked = with({instr::Delay{f0, 4}, instr::Play{f0, flat(8)}, instr::Delay{f0, 4}});
    EXPECT_EQ(merge_delays(blocked), blocked);
    const auto distinct = with({instr::Delay{f0, 4}, instr::Delay{f1, 4}});
    EXPECT_EQ(merge_delays(distinct), distinct);
}

TEST(MergeDelays, OtherFramesDoNotInterrupt) {
    const auto s = with({instr::Delay{f0, 4}, instr::Play{f1, flat(8)}, instr::Delay{f0, 2}});
    EXPECT_EQ(merge_delays(s).instructions,
              (std::vector<PulseInstruction>{instr::Delay{f0, 6}, instr::Play{f1, flat(8)}}));
}

TEST(FoldPhase, Examples) {
    const auto summed = fold_phase(with({instr::ShiftPhase{f0, pi / 2}, instr::ShiftPhase{f0, pi / 2}}));
    ASSERT_EQ(summed.instructions.size(), 1u);
    EXPECT_NEAR(std::get<instr::ShiftPhase>(summed.instructions[0]).delta_rad, pi, 1e-15);

    const auto absorbed = fold_phase(with({instr::SetPhase{f0, 0.1}, instr::ShiftPhase{f0, 0.2}}));
    ASSERT_EQ(absorbed.instructions.size(), 1u);
    EXPECT_NEAR(std::get<instr::SetPhase>(absorbed.instructions[0]).phase_rad, 0.3, 1e-15);

    const auto blocked = with({instr::ShiftPhase{f0, pi}, instr::Play{f0, flat(8)}, instr::ShiftPhase{f0, pi}});
    EXPECT_EQ(fold_phase(blocked), blocked);
}

TEST(FoldPhase, FrequencyOpsFoldSeparately) {
    const auto s = fold_phase(with({instr::SetFrequency{f0, 5.0e9}, instr::ShiftFrequency{f0, 1.0e6},
                                    instr::ShiftPhase{f0, 0.5}, instr::ShiftFrequency{f1, 2.0}, instr::ShiftFrequency{f1, 3.0}}));
    EXPECT_EQ(s.instructions, (std::vector<PulseInstruction>{instr::SetFrequency{f0, 5.001e9}, instr::ShiftPhase{f0, 0.5},
                                                             instr::ShiftFrequency{f1, 5.0}}));
}

TEST(Legalize, PadsToGranularity) {
    auto dev = testsupport::one_qubit_device(5.0e9, testsupport::constraints(8, 8, 1.0, 4.5e9, 5.5e9));
    auto s = with({instr::Play{f0, flat(12)}});
    const auto r = legalize(s, dev, LegalizeMode::pad);
    EXPECT_FALSE(has_errors(r.diagnostics));
    const auto& w = std::get<instr::Play>(r.schedule.instructions[0]).waveform;
    EXPECT_EQ(waveform_duration(w), 16);
    const auto samples = waveform_samples(w);
    for (int n = 0; n < 12; ++n) EXPECT_EQ(samples[n], Complex(0.1, 0.0));
    for (int n = 12; n < 16; ++n) EXPECT_EQ(samples[n], Complex(0.0, 0.0));

    const auto strict = legalize(s, dev, LegalizeMode::strict);
    EXPECT_TRUE(has_errors(strict.diagnostics));
    EXPECT_EQ(strict.diagnostics.at(0).instruction_index, std::optional<std::size_t>(0));
}

TEST(Legalize, PadsUpToMinimumDuration) {
    auto dev = testsupport::one_qubit_device(5.0e9, testsupport::constraints(4, 32, 1.0, 4.5e9, 5.5e9));
    const auto r = legalize(with({instr::Play{f0, flat(8)}}), dev, LegalizeMode::pad);
    EXPECT_EQ(waveform_duration(std::get<instr::Play>(r.schedule.instructions[0]).waveform), 32);
}

TEST(Legalize, AmplitudeAndFrequencyAreErrorsInBothModes) {
    auto dev = testsupport::one_qubit_device(5.0e9, testsupport::constraints(1, 1, 0.8, 4.5e9, 5.5e9));
    for (auto mode : {LegalizeMode::pad, LegalizeMode::strict}) {
        EXPECT_TRUE(has_errors(legalize(with({instr::Play{f0, flat(8, 0.9)}}), dev, mode).diagnostics));
        EXPECT_TRUE(has_errors(legalize(with({instr::SetFrequency{f0, 6.0e9}}), dev, mode).diagnostics));
        EXPECT_TRUE(has_errors(legalize(with({instr::ShiftFrequency{f0, 0.6e9}}), dev, mode).diagnostics));
        EXPECT_FALSE(has_errors(legalize(with({instr::Play{f0, flat(8, 0.8)}}), dev, mode).diagnostics));
    }
}

TEST(Legalize, CaptureOnDrivePort) {
    const auto dev = testsupport::one_qubit_device();
    const auto r = legalize(with({instr::Capture{f0, ResultId{0}}}), dev, LegalizeMode::pad);
    EXPECT_TRUE(has_errors(r.diagnostics));
}

TEST(Pipeline, EmptyIsIdentity) {
    const auto s = with({instr::Delay{f0, 4}, instr::Delay{f0, 4}});
    const auto r = run_pipeline(s, PipelineConfig{}, testsupport::one_qubit_device());
    EXPECT_EQ(r.schedule, s);
    EXPECT_TRUE(r.diagnostics.empty());
}

TEST(Pipeline, MergeThenTime) {
    const auto s = with({instr::Delay{f0, 4}, instr::Delay{f0, 4}, instr::Play{f0, flat(8)}});
    const auto r = run_pipeline(s, parse_pipeline("merge_delays,resolve_timing"), testsupport::one_qubit_device());
    EXPECT_EQ(r.schedule.instructions.size(), 2u);
    ASSERT_TRUE(r.schedule.is_timed());
    EXPECT_EQ(*r.schedule.timing, (std::vector<std::int64_t>{0, 8}));
}

TEST(Pipeline, FailingPassReturnsInput) {
    auto dev = testsupport::one_qubit_device(5.0e9, testsupport::constraints(1, 1, 0.5, 4.5e9, 5.5e9));
    const auto s = with({instr::Delay{f0, 4}, instr::Delay{f0, 4}, instr::Play{f0, flat(8, 0.9)}});
    const auto r = run_pipeline(s, parse_pipeline("merge_delays,legalize,resolve_timing", LegalizeMode::strict), dev);
    EXPECT_EQ(r.schedule, s);
    EXPECT_TRUE(has_errors(r.diagnostics));
}

TEST(Pipeline, UnknownPass) {
    try {
        run_pipeline(with({}), parse_pipeline("merge_delays,nope"), testsupport::one_qubit_device());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownPass);
    }
}

TEST(Pipeline, ParseDropsBlanks) {
    EXPECT_EQ(parse_pipeline(" fold_phase, ,verify,").passes, (std::vector<std::string>{"fold_phase", "verify"}));
}

TEST(PassProperty, MergeDelaysKeepsTimingAndIsIdempotent) {
    testsupport::Rng rng(32);
    for (int k = 0; k < 300; ++k) {
        const auto s = testsupport::random_schedule(rng);
        const auto once = merge_delays(s);
        EXPECT_EQ(merge_delays(once), once);
        const auto before = resolve_timing(s);
        const auto after = resolve_timing(once);
        // Every non-delay instruction keeps its start time.
        std::vector<std::pair<PulseInstruction, std::int64_t>> a;
        std::vector<std::pair<PulseInstruction, std::int64_t>> b;
        for (std::size_t i = 0; i < s.instructions.size(); ++i) {
            if (!std::holds_alternative<instr::Delay>(s.instructions[i])) a.emplace_back(s.instructions[i], (*before.timing)[i]);
        }
        for (std::size_t i = 0; i < once.instructions.size(); ++i) {
            if (!std::holds_alternative<instr::Delay>(once.instructions[i])) b.emplace_back(once.instructions[i], (*after.timing)[i]);
        }
        EXPECT_EQ(a, b);
    }
}

TEST(PassProperty, FoldPhaseKeepsObservedFrameStateAndIsIdempotent) {
    testsupport::Rng rng(33);
    for (int k = 0; k < 300; ++k) {
        const auto s = testsupport::random_schedule(rng);
        const auto once = fold_phase(s);
        EXPECT_EQ(fold_phase(once), once);
        const auto a = observed_frame_state(s);
        const auto b = observed_frame_state(once);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_NEAR(a[i].first, b[i].first, 1e-6);
            EXPECT_LT(circle_gap(a[i].second, b[i].second), 1e-9);
        }
    }
}

TEST(PassProperty, PassesPreserveSimulatedState) {
    const auto dev = testsupport::one_qubit_device();
    testsupport::Rng rng(34);
    for (int k = 0; k < 50; ++k) {
        const auto s = testsupport::random_single_qubit_schedule(rng);
        const auto ref = sim::final_states(resolve_timing(s), dev, *dev.simulation).at(SiteId{0});
        for (const auto& out : {merge_delays(s), fold_phase(s), fold_phase(merge_delays(s))}) {
            const auto got = sim::final_states(resolve_timing(out), dev, *dev.simulation).at(SiteId{0});
            EXPECT_GE(sim::fidelity(ref, got), 1.0 - 1e-9);
        }
    }
}

TEST(PassProperty, PadOutputPassesStrictAndPadIsIdempotent) {
    testsupport::Rng rng(35);
    for (int k = 0; k < 200; ++k) {
        const auto g = testsupport::uniform_int(rng, 1, 16);
        const auto c = testsupport::constraints(g, g * testsupport::uniform_int(rng, 1, 4), 1.0, 0.0, 1.0e10);
        const auto dev = testsupport::one_qubit_device(5.0e9, c);
        testsupport::ScheduleShape shape;
        shape.max_ports = 1;
        shape.measurements = false;
        auto s = testsupport::random_schedule(rng, shape);
        for (auto& [id, f] : s.frames) f.port = PortId{"d0"};
        const auto padded = legalize(s, dev, LegalizeMode::pad);
        ASSERT_FALSE(has_errors(padded.diagnostics));
        EXPECT_FALSE(has_errors(legalize(padded.schedule, dev, LegalizeMode::strict).diagnostics));
        EXPECT_EQ(legalize(padded.schedule, dev, LegalizeMode::pad).schedule, padded.schedule);
    }
}
