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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pulsestack/diagnostics.hpp"
#include "pulsestack/schedule.hpp"

// Textual pulse-profile module format (.pqir).
//
// The format is a small, self-contained subset of LLVM textual IR:
//
//   source_filename = "<module name>"
//   %Qubit = type opaque            ; likewise %Result %Port %Frame %Waveform
//   @<name> = constant [<n> x double] [<reals>]
//   define void @<entry>() #0 {
//   entry:
//     %w0 = call %Waveform* @__quantum__pulse__waveform__body(i64 <len>, double* @<global>)
//     call void @<intrinsic>(<args>)
//     ret void
//   }
//   declare <ret> @<intrinsic>(<types>)
//   attributes #0 = { "entry_point" "qir_profiles"="pulse" ... }
//
// Port, frame, qubit and result operands are integer handles written as
// `inttoptr (i64 N to %T*)`. Three reserved global families describe the
// handles so that a module is self-describing:
//
//   @__pulse_port.<port>   = constant [1 x double] [<port handle>]
//   @__pulse_frame.<frame> = constant [5 x double]
//                            [<frame handle>, <port handle>, <hz>, <rad>, <elapsed>]
//   @__pulse_barrier.<k>   = constant [<n> x double] [<frame handles>]
//
// Every other global is waveform data: interleaved re/im pairs.
//
// Port-addressed intrinsics (waveform_play, frame_change) act on the port's
// primary frame: the frame with the smallest name bound to that port.

namespace pulsestack::pqir {

struct ModuleAttributes {
    bool entry_point = true;
    std::string output_labeling_schema;
    std::string qir_profiles = "pulse";
    std::int64_t required_num_ports = 0;
    std::int64_t required_num_qubits = 0;
    std::int64_t required_num_results = 0;

    bool operator==(const ModuleAttributes&) const = default;
};

struct WaveformGlobal {
    std::string name;
    std::vector<Complex> samples;

    bool operator==(const WaveformGlobal&) const = default;
};

struct PulseModule {
    std::string module_name;
    std::string entry_name;
    ModuleAttributes attributes;
    /// Untimed; the format does not carry a timing table.
    Schedule schedule;
    std::vector<WaveformGlobal> waveform_globals;

    bool operator==(const PulseModule&) const = default;
};

struct ModuleOptions {
    std::string module_name = "pulse_module";
    std::string entry_name = "main";
    std::string output_labeling_schema;
    /// Lower bounds; usage in the schedule can only raise them.
    std::int64_t num_qubits = 0;
    std::int64_t num_results = 0;
};

struct Usage {
    std::int64_t ports = 0;
    std::int64_t qubits = 0;
    std::int64_t results = 0;
};

/// Distinct ports behind frames that instructions touch, highest measured
/// site + 1, and distinct result indices.
Usage compute_usage(const Schedule& schedule);

/// Packages a schedule: drops timing, resolves every played waveform to
/// samples, interns identical sample data as globals wf0, wf1, ... and fills
/// the attribute counts from usage.
PulseModule build_module(const Schedule& schedule, const ModuleOptions& options = {});

/// Smallest-named frame per port: the frame port-addressed intrinsics act on.
bool is_primary_frame(const Schedule& schedule, const FrameId& frame);

/// Deterministic text. Throws UnsupportedInstruction for a Play on a frame
/// that is not its port's primary frame, UndeclaredGlobal when a played
/// waveform matches no global, InvalidModule for unencodable values.
std::string emit(const PulseModule& module);

struct ParseResult {
    PulseModule module;
    /// Notes only (e.g. declared intrinsics that are never called).
    Diagnostics diagnostics;
};

/// Throws SyntaxError, ProfileMismatch, UndeclaredGlobal, ArityError,
/// ArgumentType, UnsupportedInstruction or InvalidModule.
ParseResult parse(std::string_view text);

/// Attribute counts against usage, entry_point presence, dense result
/// indices from 0, and schedule validity. Findings only, never throws.
Diagnostics validate_profile(const PulseModule& module);

struct IntrinsicSignature {
    std::string_view name;
    std::string_view return_type;
    std::vector<std::string_view> parameters;
};

/// The fixed intrinsic table.
std::span<const IntrinsicSignature> intrinsic_table();
const IntrinsicSignature* find_intrinsic(std::string_view name);

/// Shortest text that reads back to the same double, always with a '.' or
/// exponent so it lexes as a real.
std::string format_real(double value);

}  // namespace pulsestack::pqir
