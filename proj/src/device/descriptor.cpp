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

#include "pulsestack/device.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pulsestack/error.hpp"

namespace pulsestack {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& device, const std::string& why) {
    fail(ErrorCode::InvalidDevice, "device '" + device + "': " + why);
}

std::optional<double> optional_number(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

std::string_view to_string(PortKind kind) {
    switch (kind) {
        case PortKind::drive: return "drive";
        case PortKind::readout: return "readout";
        case PortKind::acquire: return "acquire";
        case PortKind::coupler: return "coupler";
    }
    return "unknown";
}

std::string_view to_string(PulseSupport support) {
    switch (support) {
        case PulseSupport::none: return "none";
        case PulseSupport::site_level: return "site_level";
        case PulseSupport::port_level: return "port_level";
    }
    return "unknown";
}

PortKind parse_port_kind(std::string_view name) {
    if (name == "drive") return PortKind::drive;
    if (name == "readout") return PortKind::readout;
    if (name == "acquire") return PortKind::acquire;
    if (name == "coupler") return PortKind::coupler;
    fail(ErrorCode::InvalidDevice, "unknown port kind '" + std::string(name) + "'");
}

PulseSupport parse_pulse_support(std::string_view name) {
    if (name == "none") return PulseSupport::none;
    if (name == "site_level") return PulseSupport::site_level;
    if (name == "port_level") return PulseSupport::port_level;
    fail(ErrorCode::InvalidDevice, "unknown pulse support level '" + std::string(name) + "'");
}

const QubitModel* SimulationModel::find(SiteId site) const {
    for (const auto& q : qubits) {
        if (q.site == site) return &q;
    }
    return nullptr;
}

const Port* DeviceDescriptor::find_port(const PortId& id) const {
    for (const auto& p : ports) {
        if (p.id == id) return &p;
    }
    return nullptr;
}

const Port* DeviceDescriptor::site_port(SiteId site, PortKind kind) const {
    for (const auto& p : ports) {
        if (p.kind == kind && p.sites.size() == 1 && p.sites.front() == site) return &p;
    }
    return nullptr;
}

const Port* DeviceDescriptor::coupler_port(SiteId a, SiteId b) const {
    for (const auto& p : ports) {
        if (p.kind != PortKind::coupler || p.sites.size() != 2) continue;
        if ((p.sites[0] == a && p.sites[1] == b) || (p.sites[0] == b && p.sites[1] == a)) return &p;
    }
    return nullptr;
}

void validate_device(const DeviceDescriptor& d) {
    if (d.name.empty()) fail(ErrorCode::InvalidDevice, "device has no name");
    if (d.num_sites == 0) invalid(d.name, "num_sites must be positive");
    if (d.pulse_support == PulseSupport::port_level && d.ports.empty()) {
        invalid(d.name, "port-level pulse support requires ports");
    }
    if (!d.sites.empty() && d.sites.size() != d.num_sites) {
        invalid(d.name, "site property list must have one entry per site");
    }
    std::set<PortId> seen;
    for (const auto& p : d.ports) {
        const std::string where = "port '" + p.id.value() + "'";
        if (!is_port_token(p.id.value())) invalid(d.name, where + " is not a valid port name");
        if (!seen.insert(p.id).second) invalid(d.name, where + " is declared twice");
        if (p.kind == PortKind::coupler ? p.sites.size() != 2 : p.sites.empty()) {
            invalid(d.name, where + " has the wrong number of sites for its kind");
        }
        for (const auto s : p.sites) {
            if (s.value() >= d.num_sites) invalid(d.name, where + " references an unknown site");
        }
        const auto& c = p.constraints;
        if (!(c.sample_period_s > 0.0) || !std::isfinite(c.sample_period_s)) {
            invalid(d.name, where + ": sample_period_s must be positive");
        }
        if (c.granularity_samples <= 0 || c.min_duration_samples <= 0) {
            invalid(d.name, where + ": granularity and minimum duration must be positive");
        }
        if (c.min_duration_samples % c.granularity_samples != 0) {
            invalid(d.name, where + ": min_duration_samples must be a multiple of granularity_samples");
        }
        if (!(c.max_amplitude > 0.0 && c.max_amplitude <= 1.0)) {
            invalid(d.name, where + ": max_amplitude must lie in (0, 1]");
        }
        if (!(c.frequency_range_hz.first <= c.frequency_range_hz.second)) {
            invalid(d.name, where + ": frequency range is inverted");
        }
        if (!std::isfinite(p.frequency_hz)) invalid(d.name, where + ": frequency is not finite");
    }
    if (d.simulation) {
        std::set<SiteId> modelled;
        for (const auto& q : d.simulation->qubits) {
            if (q.site.value() >= d.num_sites) invalid(d.name, "qubit model for unknown site");
            if (!modelled.insert(q.site).second) invalid(d.name, "two qubit models for one site");
            if (!std::isfinite(q.qubit_frequency_hz) || !std::isfinite(q.rabi_rate_hz_per_unit_amplitude) ||
                q.rabi_rate_hz_per_unit_amplitude <= 0.0) {
                invalid(d.name, "qubit model parameters must be finite with a positive Rabi rate");
            }
        }
    }
}

DeviceDescriptor parse_device_json(std::string_view text) {
    DeviceDescriptor d;
    try {
        const auto j = json::parse(text);
        d.name = j.at("name").get<std::string>();
        d.num_sites = j.at("num_sites").get<std::uint32_t>();
        d.pulse_support = parse_pulse_support(j.value("pulse_support", std::string{"none"}));
        d.operations = j.value("operations", std::vector<std::string>{});
        d.supported_formats = j.value("supported_formats", std::vector<std::string>{"pqir_pulse"});
        if (j.contains("sites")) {
            for (const auto& s : j.at("sites")) {
                d.sites.push_back(SiteProperties{optional_number(s, "t1_s"), optional_number(s, "t2_s")});
            }
        }
        for (const auto& pj : j.value("ports", json::array())) {
            Port p;
            p.id = PortId{pj.at("id").get<std::string>()};
            p.kind = parse_port_kind(pj.at("kind").get<std::string>());
            for (const auto& s : pj.at("sites")) p.sites.emplace_back(s.get<std::uint32_t>());
            const auto& cj = pj.at("constraints");
            auto& c = p.constraints;
            c.sample_period_s = cj.at("sample_period_s").get<double>();
            c.granularity_samples = cj.value("granularity_samples", std::int64_t{1});
            c.min_duration_samples = cj.value("min_duration_samples", c.granularity_samples);
            c.max_amplitude = cj.value("max_amplitude", 1.0);
            const auto range = cj.at("frequency_range_hz").get<std::vector<double>>();
            if (range.size() != 2) invalid(d.name, "frequency_range_hz must have two entries");
            c.frequency_range_hz = {range[0], range[1]};
            p.frequency_hz = pj.value("frequency_hz", 0.5 * (range[0] + range[1]));
            d.ports.push_back(std::move(p));
        }
        if (j.contains("default_calibrations")) {
            for (auto& e : parse_calibration_entries(j.at("default_calibrations").dump())) {
                d.default_calibrations.add(std::move(e));
            }
        }
        if (j.contains("simulation")) {
            SimulationModel model;
            for (const auto& q : j.at("simulation").at("qubits")) {
                model.qubits.push_back(QubitModel{SiteId{q.at("site").get<std::uint32_t>()},
                                                  q.at("qubit_frequency_hz").get<double>(),
                                                  q.at("rabi_rate_hz_per_unit_amplitude").get<double>()});
            }
            d.simulation = std::move(model);
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidDevice, e.what());
    }
    validate_device(d);
    return d;
}

DeviceDescriptor load_device_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open device file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_device_json(buffer.str());
}

}  // namespace pulsestack
