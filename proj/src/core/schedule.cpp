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

#include "pulsestack/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pulsestack/error.hpp"

namespace pulsestack {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

double normalize_phase(double phi) {
    if (!std::isfinite(phi)) fail(ErrorCode::NonFinite, "phase is not finite");
    double r = std::fmod(phi, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

Frame make_frame(FrameId id, PortId port, double frequency_hz, double phase_rad,
                 std::int64_t elapsed_samples) {
    if (!is_frame_token(id.value())) {
        fail(ErrorCode::InvalidSchedule, "invalid frame name '" + id.value() + "'");
    }
    if (!std::isfinite(frequency_hz)) fail(ErrorCode::NonFinite, "frame frequency is not finite");
    if (elapsed_samples < 0) fail(ErrorCode::InvalidSchedule, "negative elapsed time");
    return Frame{std::move(id), std::move(port), frequency_hz, normalize_phase(phase_rad),
                 elapsed_samples};
}

instr::Barrier make_barrier(std::vector<FrameId> frames) {
    std::sort(frames.begin(), frames.end());
    frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
    if (frames.size() < 2) fail(ErrorCode::InvalidSchedule, "barrier needs at least two frames");
    return instr::Barrier{std::move(frames)};
}

std::vector<FrameId> frames_of(const PulseInstruction& instruction) {
    return std::visit(overloaded{
                          [](const instr::Barrier& b) { return b.frames; },
                          [](const instr::Measure&) { return std::vector<FrameId>{}; },
                          [](const auto& op) { return std::vector<FrameId>{op.frame}; },
                      },
                      instruction);
}

std::int64_t instruction_duration(const PulseInstruction& instruction) {
    if (const auto* play = std::get_if<instr::Play>(&instruction)) {
        return waveform_duration(play->waveform);
    }
    if (const auto* delay = std::get_if<instr::Delay>(&instruction)) {
        return delay->duration_samples;
    }
    return 0;
}

std::string_view instruction_name(const PulseInstruction& instruction) {
    return std::visit(overloaded{
                          [](const instr::Play&) { return std::string_view{"play"}; },
                          [](const instr::ShiftPhase&) { return std::string_view{"shift_phase"}; },
                          [](const instr::SetPhase&) { return std::string_view{"set_phase"}; },
                          [](const instr::ShiftFrequency&) { return std::string_view{"shift_frequency"}; },
                          [](const instr::SetFrequency&) { return std::string_view{"set_frequency"}; },
                          [](const instr::Delay&) { return std::string_view{"delay"}; },
                          [](const instr::Barrier&) { return std::string_view{"barrier"}; },
                          [](const instr::Capture&) { return std::string_view{"capture"}; },
                          [](const instr::Measure&) { return std::string_view{"measure"}; },
                      },
                      instruction);
}

void validate_schedule(const Schedule& schedule) {
    for (const auto& [id, frame] : schedule.frames) {
        if (id != frame.id) {
            fail(ErrorCode::InvalidSchedule, "frame map key '" + id.value() + "' names frame '" +
                                                 frame.id.value() + "'");
        }
    }
    std::set<ResultId> results;
    for (std::size_t i = 0; i < schedule.instructions.size(); ++i) {
        const auto& instruction = schedule.instructions[i];
        for (const auto& f : frames_of(instruction)) {
            if (!schedule.frames.contains(f)) {
                fail(ErrorCode::UnknownFrame,
                     "instruction " + std::to_string(i) + " uses unknown frame '" + f.value() + "'");
            }
        }
        if (const auto* b = std::get_if<instr::Barrier>(&instruction)) {
            std::set<FrameId> distinct(b->frames.begin(), b->frames.end());
            if (distinct.size() < 2) {
                fail(ErrorCode::InvalidSchedule,
                     "barrier at " + std::to_string(i) + " references fewer than two frames");
            }
        }
        if (const auto* d = std::get_if<instr::Delay>(&instruction); d && d->duration_samples < 0) {
            fail(ErrorCode::InvalidSchedule, "negative delay at " + std::to_string(i));
        }
        std::optional<ResultId> result;
        if (const auto* c = std::get_if<instr::Capture>(&instruction)) result = c->result;
        if (const auto* m = std::get_if<instr::Measure>(&instruction)) result = m->result;
        if (result && !results.insert(*result).second) {
            fail(ErrorCode::InvalidSchedule,
                 "result " + std::to_string(result->value()) + " written twice");
        }
    }
    if (!schedule.timing) return;

    const auto& timing = *schedule.timing;
    if (timing.size() != schedule.instructions.size()) {
        fail(ErrorCode::InvalidSchedule, "timing table size does not match instruction count");
    }
    // Per frame: starts are nondecreasing and each op starts after the
    // previous op on that frame has finished.
    std::map<FrameId, std::int64_t> frame_end;
    for (std::size_t i = 0; i < timing.size(); ++i) {
        const auto start = timing[i];
        if (start < 0) fail(ErrorCode::InvalidSchedule, "negative start time");
        const auto end = start + instruction_duration(schedule.instructions[i]);
        for (const auto& f : frames_of(schedule.instructions[i])) {
            auto [it, fresh] = frame_end.try_emplace(f, 0);
            if (start < it->second) {
                fail(ErrorCode::InvalidSchedule, "instruction " + std::to_string(i) +
                                                     " overlaps earlier work on frame '" +
                                                     f.value() + "'");
            }
            it->second = end;
        }
    }
}

std::vector<double> render_signal(const Waveform& w, const Frame& frame, std::int64_t start_sample,
                                  double dt) {
    const auto envelope = waveform_samples(w);
    std::vector<double> out(envelope.size());
    for (std::size_t n = 0; n < envelope.size(); ++n) {
        const double t = static_cast<double>(start_sample + static_cast<std::int64_t>(n)) * dt;
        const double angle = kTwoPi * frame.frequency_hz * t + frame.phase_rad;
        out[n] = (envelope[n] * std::polar(1.0, angle)).real();
    }
    return out;
}

}  // namespace pulsestack
