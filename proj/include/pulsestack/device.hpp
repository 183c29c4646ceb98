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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pulsestack/calibration.hpp"
#include "pulsestack/ids.hpp"

namespace pulsestack {

enum class PortKind { drive, readout, acquire, coupler };
enum class PulseSupport { none, site_level, port_level };

std::string_view to_string(PortKind kind);
std::string_view to_string(PulseSupport support);
PortKind parse_port_kind(std::string_view name);
PulseSupport parse_pulse_support(std::string_view name);

struct PortConstraints {
    double sample_period_s = 1e-9;
    std::int64_t granularity_samples = 1;
    std::int64_t min_duration_samples = 1;
    double max_amplitude = 1.0;
    std::pair<double, double> frequency_range_hz{0.0, 0.0};

    bool operator==(const PortConstraints&) const = default;
};

struct Port {
    PortId id;
    PortKind kind = PortKind::drive;
    std::vector<SiteId> sites;
    PortConstraints constraints;
    /// Initial carrier of the port's default frame.
    double frequency_hz = 0.0;

    bool operator==(const Port&) const = default;
};

/// Reported metadata only; the simulator is noiseless.
struct SiteProperties {
    std::optional<double> t1_s;
    std::optional<double> t2_s;

    bool operator==(const SiteProperties&) const = default;
};

struct QubitModel {
    SiteId site;
    double qubit_frequency_hz = 0.0;
    double rabi_rate_hz_per_unit_amplitude = 1.0;

    bool operator==(const QubitModel&) const = default;
};

struct SimulationModel {
    std::vector<QubitModel> qubits;

    const QubitModel* find(SiteId site) const;
    bool operator==(const SimulationModel&) const = default;
};

struct DeviceDescriptor {
    std::string name;
    std::uint32_t num_sites = 0;
    std::vector<Port> ports;
    PulseSupport pulse_support = PulseSupport::none;
    std::vector<std::string> operations;
    std::vector<std::string> supported_formats;
    std::vector<SiteProperties> sites;
    CalibrationRegistry default_calibrations;
    std::optional<SimulationModel> simulation;

    const Port* find_port(const PortId& id) const;
    /// First single-site port of the given kind serving the site.
    const Port* site_port(SiteId site, PortKind kind) const;
    /// Coupler port joining exactly the two given sites, in either order.
    const Port* coupler_port(SiteId a, SiteId b) const;
};

/// Throws InvalidDevice describing the first violated invariant.
void validate_device(const DeviceDescriptor& device);

DeviceDescriptor parse_device_json(std::string_view text);
DeviceDescriptor load_device_file(const std::string& path);

}  // namespace pulsestack
