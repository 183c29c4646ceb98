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

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "pulsestack/device.hpp"
#include "pulsestack/schedule.hpp"

// Noiseless single-qubit reference simulator.
//
// Each modeled site evolves independently in the rotating frame of its
// reference drive frame (the smallest-named frame on the site's drive port):
//
//   H/hbar = pi*delta*sz + pi*rabi*(Re d*sx + Im d*sy)
//
// with delta = reference frequency - qubit frequency and d the sum of the
// envelopes playing on drive frames that cover the site, each multiplied by
// exp(i*phase) of its frame. A drive frame other than the reference adds its
// carrier offset exp(i*2pi*(f - f_ref)*t). Each sample applies the exact 2x2
// exponential of H held constant over dt. Readout, acquire and coupler plays
// do not touch the dynamics.
//
// Measurement is ideal: it reads the computational-basis probabilities of the
// site once every drive pulse preceding it has finished. Nothing may act on a
// site after it has been measured.

namespace pulsestack::sim {

/// Amplitudes of |0> and |1>.
using SiteState = std::array<Complex, 2>;

/// Bitstring (result 0 leftmost) to count.
struct Histogram {
    std::map<std::string, std::uint64_t> counts;

    std::uint64_t total() const;
    bool operator==(const Histogram&) const = default;
};

/// Called after every evolution step (one sample, or one idle run).
using StepObserver = std::function<void(SiteId, std::int64_t sample, const SiteState&)>;

/// Final state of every modeled site. Throws UntimedSchedule,
/// PostMeasurementInstruction, UnknownSite, UnknownPort, NotSupported.
std::map<SiteId, SiteState> final_states(const Schedule& schedule, const DeviceDescriptor& device,
                                         const SimulationModel& models,
                                         const StepObserver& observer = {});

/// Samples `shots` runs. The histogram width is the larger of min_results and
/// the highest result index + 1, and at least one bit; unmeasured results
/// read 0. Deterministic for a given seed.
Histogram execute(const Schedule& schedule, const DeviceDescriptor& device, const SimulationModel& models,
                  std::uint64_t shots, std::uint64_t seed, std::size_t min_results = 0);

/// Exact <sz> per modeled site.
std::map<SiteId, double> expectation_z(const Schedule& schedule, const DeviceDescriptor& device,
                                       const SimulationModel& models);

/// |<a|b>|^2.
double fidelity(const SiteState& a, const SiteState& b);

}  // namespace pulsestack::sim
