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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pulsestack/ids.hpp"
#include "pulsestack/waveform.hpp"

namespace pulsestack {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Reduces a finite angle to [0, 2pi). Throws NonFinite.
double normalize_phase(double phi);

/// Carrier state bound to one port. phase_rad is kept in [0, 2pi).
struct Frame {
    FrameId id;
    PortId port;
    double frequency_hz = 0.0;
    double phase_rad = 0.0;
    std::int64_t elapsed_samples = 0;

    bool operator==(const Frame&) const = default;
};

Frame make_frame(FrameId id, PortId port, double frequency_hz, double phase_rad = 0.0,
                 std::int64_t elapsed_samples = 0);

namespace instr {

struct Play {
    FrameId frame;
    Waveform waveform;
    bool operator==(const Play&) const = default;
};

struct ShiftPhase {
    FrameId frame;
    double delta_rad = 0.0;
    bool operator==(const ShiftPhase&) const = default;
};

struct SetPhase {
    FrameId frame;
    double phase_rad = 0.0;
    bool operator==(const SetPhase&) const = default;
};

struct ShiftFrequency {
    FrameId frame;
    double delta_hz = 0.0;
    bool operator==(const ShiftFrequency&) const = default;
};

struct SetFrequency {
    FrameId frame;
    double frequency_hz = 0.0;
    bool operator==(const SetFrequency&) const = default;
};

struct Delay {
    FrameId frame;
    std::int64_t duration_samples = 0;
    bool operator==(const Delay&) const = default;
};

/// Frames are kept sorted and unique.
struct Barrier {
    std::vector<FrameId> frames;
    bool operator==(const Barrier&) const = default;
};

struct Capture {
    FrameId frame;
    ResultId result;
    bool operator==(const Capture&) const = default;
};

struct Measure {
    SiteId site;
    ResultId result;
    bool operator==(const Measure&) const = default;
};

}  // namespace instr

using PulseInstruction =
    std::variant<instr::Play, instr::ShiftPhase, instr::SetPhase, instr::ShiftFrequency,
                 instr::SetFrequency, instr::Delay, instr::Barrier, instr::Capture, instr::Measure>;

/// Builds a barrier with sorted, de-duplicated frames. Throws InvalidSchedule
/// when fewer than two distinct frames remain.
instr::Barrier make_barrier(std::vector<FrameId> frames);

/// Frames an instruction acts on (empty for Measure).
std::vector<FrameId> frames_of(const PulseInstruction& instruction);

/// Samples the instruction occupies on its frame; zero for frame updates,
/// captures, barriers and measurements.
std::int64_t instruction_duration(const PulseInstruction& instruction);

std::string_view instruction_name(const PulseInstruction& instruction);

struct Schedule {
    std::map<FrameId, Frame> frames;
    std::vector<PulseInstruction> instructions;
    /// Absolute start sample of each instruction, when resolved.
    std::optional<std::vector<std::int64_t>> timing;

    bool is_timed() const noexcept { return timing.has_value(); }
    bool operator==(const Schedule&) const = default;
};

/// Checks frame references, barrier arity, result uniqueness and, when
/// present, timing shape and per-frame ordering. Throws UnknownFrame or
/// InvalidSchedule.
void validate_schedule(const Schedule& schedule);

/// Re[a[n] * exp(i(2 pi f (start + n) dt + phase))] for each envelope sample.
std::vector<double> render_signal(const Waveform& w, const Frame& frame, std::int64_t start_sample,
                                  double dt);

}  // namespace pulsestack
