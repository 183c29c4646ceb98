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

#include <algorithm>
#include <map>
#include <optional>

#include "pulsestack/error.hpp"
#include "pulsestack/passes.hpp"

namespace pulsestack::passes {

namespace {

Schedule retimed_like(const Schedule& input, Schedule output) {
    output.timing.reset();
    if (input.is_timed()) return resolve_timing(output);
    return output;
}

const FrameId* single_frame(const PulseInstruction& instruction) {
    return std::visit(
        [](const auto& op) -> const FrameId* {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, instr::Barrier> || std::is_same_v<T, instr::Measure>) {
                return nullptr;
            } else {
                return &op.frame;
            }
        },
        instruction);
}

enum class FoldClass { none, phase, frequency };

FoldClass fold_class(const PulseInstruction& i) {
    if (std::holds_alternative<instr::ShiftPhase>(i) || std::holds_alternative<instr::SetPhase>(i)) {
        return FoldClass::phase;
    }
    if (std::holds_alternative<instr::ShiftFrequency>(i) || std::holds_alternative<instr::SetFrequency>(i)) {
        return FoldClass::frequency;
    }
    return FoldClass::none;
}

// Combines `next` into `prev` if the pair is foldable. Both act on one frame.
bool try_fold(PulseInstruction& prev, const PulseInstruction& next) {
    if (const auto* shift = std::get_if<instr::ShiftPhase>(&next)) {
        if (auto* p = std::get_if<instr::ShiftPhase>(&prev)) {
            p->delta_rad = normalize_phase(p->delta_rad + shift->delta_rad);
            return true;
        }
        if (auto* p = std::get_if<instr::SetPhase>(&prev)) {
            p->phase_rad = normalize_phase(p->phase_rad + shift->delta_rad);
            return true;
        }
    }
    if (const auto* shift = std::get_if<instr::ShiftFrequency>(&next)) {
        if (auto* p = std::get_if<instr::ShiftFrequency>(&prev)) {
            p->delta_hz += shift->delta_hz;
            return true;
        }
        if (auto* p = std::get_if<instr::SetFrequency>(&prev)) {
            p->frequency_hz += shift->delta_hz;
            return true;
        }
    }
    return false;
}

}  // namespace

Schedule resolve_timing(const Schedule& schedule) {
    std::map<FrameId, std::int64_t> clock;
    for (const auto& [id, frame] : schedule.frames) clock.emplace(id, frame.elapsed_samples);
    auto clock_of = [&](const FrameId& f, std::size_t index) -> std::int64_t& {
        auto it = clock.find(f);
        if (it == clock.end()) {
            fail(ErrorCode::UnknownFrame,
                 "instruction " + std::to_string(index) + " uses unknown frame '" + f.value() + "'");
        }
        return it->second;
    };

    std::vector<std::int64_t> starts;
    starts.reserve(schedule.instructions.size());
    for (std::size_t i = 0; i < schedule.instructions.size(); ++i) {
        const auto& instruction = schedule.instructions[i];
        if (const auto* barrier = std::get_if<instr::Barrier>(&instruction)) {
            std::int64_t sync = 0;
            for (const auto& f : barrier->frames) sync = std::max(sync, clock_of(f, i));
            for (const auto& f : barrier->frames) clock_of(f, i) = sync;
            starts.push_back(sync);
        } else if (std::holds_alternative<instr::Measure>(instruction)) {
            std::int64_t latest = 0;
            for (const auto& [id, t] : clock) latest = std::max(latest, t);
            starts.push_back(latest);
        } else {
            auto& t = clock_of(*single_frame(instruction), i);
            starts.push_back(t);
            t += instruction_duration(instruction);
        }
    }
    Schedule out = schedule;
    out.timing = std::move(starts);
    return out;
}

Schedule merge_delays(const Schedule& schedule) {
    Schedule out;
    out.frames = schedule.frames;
    // Index in out.instructions of the most recent instruction per frame.
    std::map<FrameId, std::size_t> last;
    for (const auto& instruction : schedule.instructions) {
        if (const auto* delay = std::get_if<instr::Delay>(&instruction)) {
            auto it = last.find(delay->frame);
            if (it != last.end()) {
                if (auto* prev = std::get_if<instr::Delay>(&out.instructions[it->second])) {
                    prev->duration_samples += delay->duration_samples;
                    continue;
                }
            }
        }
        out.instructions.push_back(instruction);
        // A gate-level measure waits on every clock, so nothing folds across it.
        if (std::holds_alternative<instr::Measure>(instruction)) last.clear();
        for (const auto& f : frames_of(instruction)) last[f] = out.instructions.size() - 1;
    }
    return retimed_like(schedule, std::move(out));
}

Schedule fold_phase(const Schedule& schedule) {
    Schedule out;
    out.frames = schedule.frames;
    std::map<FrameId, std::size_t> last;
    for (const auto& instruction : schedule.instructions) {
        if (fold_class(instruction) != FoldClass::none) {
            const FrameId& frame = *single_frame(instruction);
            auto it = last.find(frame);
            if (it != last.end() && fold_class(out.instructions[it->second]) == fold_class(instruction) &&
                try_fold(out.instructions[it->second], instruction)) {
                continue;
            }
        }
        out.instructions.push_back(instruction);
        // A gate-level measure waits on every clock, so nothing folds across it.
        if (std::holds_alternative<instr::Measure>(instruction)) last.clear();
        for (const auto& f : frames_of(instruction)) last[f] = out.instructions.size() - 1;
    }
    return retimed_like(schedule, std::move(out));
}

}  // namespace pulsestack::passes
