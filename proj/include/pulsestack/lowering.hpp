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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pulsestack/calibration.hpp"
#include "pulsestack/device.hpp"
#include "pulsestack/schedule.hpp"

namespace pulsestack {

/// One frame per device port, named after the port, starting at the port's
/// carrier frequency with zero phase.
std::map<FrameId, Frame> device_frames(const DeviceDescriptor& device);

/// Frame serving a role for a gate acting on `sites`. Throws UnboundFrameRole.
FrameId resolve_frame_role(const DeviceDescriptor& device, const RoleRef& role,
                           std::span<const SiteId> sites);

/// The two rules every device gets for free:
///   rz(theta) -> shift_phase(drive, -theta)
///   measure   -> play(readout, constant pulse); capture(acquire or readout)
/// The capture uses the acquire role when every readout-capable site has an
/// acquire port, otherwise the readout frame itself.
CalibrationRegistry builtin_calibrations(const DeviceDescriptor& device);

/// Builtins, then the device's default calibrations, then `extra`. Later
/// registrations replace earlier ones with the same key.
CalibrationRegistry effective_calibrations(const DeviceDescriptor& device,
                                           const CalibrationRegistry& extra = {});

/// Substitutes parameters and binds roles for one calibration body.
std::vector<PulseInstruction> instantiate_calibration(
    const CalibrationEntry& entry, std::span<const SiteId> sites,
    const std::map<std::string, double, std::less<>>& parameters, std::optional<ResultId> result,
    const DeviceDescriptor& device);

/// Concatenates the instantiated calibration of each gate, in circuit order.
/// Throws MissingCalibration, UnboundFrameRole, InvalidBody, InvalidCircuit.
Schedule lower(const GateCircuit& circuit, const CalibrationRegistry& registry,
               const DeviceDescriptor& device);

}  // namespace pulsestack
