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
#include <functional>
#include <vector>

#include "pulsestack/device.hpp"
#include "pulsestack/schedule.hpp"

// Pulse-parameter variational loop on one simulated qubit: the parameters of
// a constant drive pulse are tuned to minimize <sz>, whose minimum (-1) is
// reached by a pi pulse.

namespace pulsestack::vqe {

struct PulseParameters {
    double amp = 0.0;
    std::int64_t duration_samples = 0;
    double phase_rad = 0.0;

    bool operator==(const PulseParameters&) const = default;
};

struct Options {
    std::size_t iterations = 200;
    std::uint64_t seed = 1;
    SiteId site{0};
};

struct IterationRecord {
    std::size_t iteration = 0;
    PulseParameters parameters;
    double energy = 0.0;

    bool operator==(const IterationRecord&) const = default;
};

struct Result {
    /// Entry 0 is the initial point; one entry per completed iteration after.
    std::vector<IterationRecord> trace;
    PulseParameters best;
    double energy = 0.0;
};

/// Timed schedule holding one constant play on the site's drive frame.
Schedule pulse_schedule(const DeviceDescriptor& device, SiteId site, const PulseParameters& parameters);

/// <sz> of the site after the pulse. Throws NotSupported without a model.
double energy(const DeviceDescriptor& device, SiteId site, const PulseParameters& parameters);

/// Coordinate descent over amplitude, duration (in granularity steps) and
/// phase. Each iteration sweeps the three coordinates once; a coordinate whose
/// step fails to improve halves its step. The seed picks the starting point.
/// Stops early once every step is below its resolution.
Result run(const DeviceDescriptor& device, const Options& options,
           const std::function<void(const IterationRecord&)>& on_iteration = {});

}  // namespace pulsestack::vqe
