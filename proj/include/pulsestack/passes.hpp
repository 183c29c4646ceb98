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

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pulsestack/device.hpp"
#include "pulsestack/diagnostics.hpp"
#include "pulsestack/schedule.hpp"

namespace pulsestack::passes {

/// ASAP timing over per-frame logical clocks.
///
/// Each frame's clock starts at its elapsed_samples. Play and Delay start at
/// the frame clock and advance it by their duration. Phase and frequency
/// updates and Capture start at the frame clock and leave it alone. A barrier
/// lifts every listed clock to their maximum and starts there. Measure has no
/// frame; it starts at the maximum over all clocks and leaves them alone.
///
/// Any existing timing table is discarded. Throws UnknownFrame.
Schedule resolve_timing(const Schedule& schedule);

/// Fuses runs of delays on one frame that no other instruction on that frame
/// interrupts. Output timing is recomputed when the input was timed.
Schedule merge_delays(const Schedule& schedule);

/// Fuses phase updates (and, separately, frequency updates) on one frame:
/// shift+shift sums, set+shift absorbs into the set. Only updates with no
/// intervening instruction on that frame are fused, so Play, Delay, Capture
/// and Barrier all block folding. Fused phase values are normalized.
Schedule fold_phase(const Schedule& schedule);

enum class LegalizeMode { strict, pad };

std::string_view to_string(LegalizeMode mode);
LegalizeMode parse_legalize_mode(std::string_view name);

struct PassResult {
    Schedule schedule;
    Diagnostics diagnostics;
};

/// Checks each instruction against the constraints of its frame's port.
/// In pad mode, waveforms that are too short or off-granularity are extended
/// with zero samples; every other violation is an error diagnostic.
PassResult legalize(const Schedule& schedule, const DeviceDescriptor& device, LegalizeMode mode);

/// Schedule invariants plus device binding (ports exist, captures on
/// readout/acquire ports, measured sites exist). Never modifies the input.
Diagnostics verify(const Schedule& schedule, const DeviceDescriptor& device);

enum class PassKind { analysis, transform };

struct Pass {
    std::string name;
    PassKind kind = PassKind::transform;
    std::function<PassResult(const Schedule&, const DeviceDescriptor&)> apply;
};

class PassRegistry {
public:
    void add(Pass pass);
    const Pass* find(std::string_view name) const;
    std::vector<std::string> names() const;

private:
    std::vector<Pass> passes_;
};

/// resolve_timing, merge_delays, fold_phase, legalize (in `mode`), verify.
PassRegistry default_pass_registry(LegalizeMode mode);

struct PipelineConfig {
    std::vector<std::string> passes;
    LegalizeMode mode = LegalizeMode::pad;
};

/// Splits a comma-separated pass list; blank entries are dropped.
PipelineConfig parse_pipeline(std::string_view pass_list, LegalizeMode mode = LegalizeMode::pad);

/// Runs the passes in order. Stops at the first pass reporting an error and
/// then returns the original input with all diagnostics collected so far.
/// Throws UnknownPass before running anything if a name does not resolve.
PassResult run_pipeline(const Schedule& schedule, const PipelineConfig& config,
                        const DeviceDescriptor& device);

}  // namespace pulsestack::passes
