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

#include "pulsestack/lowering.hpp"

#include <algorithm>
#include <cmath>

#include "pulsestack/error.hpp"

namespace pulsestack {

namespace {

using Params = std::map<std::string, double, std::less<>>;

double bind(const ParamValue& v, const Params& params, const std::string& gate) {
    if (const auto* literal = std::get_if<double>(&v)) return *literal;
    const auto& ref = std::get<ParamRef>(v);
    auto it = params.find(ref.name);
    if (it == params.end()) {
        fail(ErrorCode::InvalidBody,
             "calibration '" + gate + "' needs parameter '" + ref.name + "' the gate does not provide");
    }
    return ref.negate ? -it->second : it->second;
}

std::int64_t bind_samples(const ParamValue& v, const Params& params, const std::string& gate) {
    const double d = bind(v, params, gate);
    if (!std::isfinite(d) || d < 0 || d != std::floor(d)) {
        fail(ErrorCode::InvalidBody, "calibration '" + gate + "' produced a non-integer duration");
    }
    return static_cast<std::int64_t>(d);
}

Waveform bind_waveform(const TemplateWaveform& w, const Params& params, const std::string& gate) {
    try {
        if (const auto* samples = std::get_if<std::vector<Complex>>(&w)) {
            return make_sampled_waveform(*samples);
        }
        const auto& p = std::get<TemplateParametric>(w);
        std::map<std::string, double, std::less<>> bound;
        for (const auto& [name, value] : p.params) bound.emplace(name, bind(value, params, gate));
        return make_parametric_waveform(p.shape, bind_samples(p.duration_samples, params, gate),
                                        std::move(bound));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidBody) throw;
        fail(ErrorCode::InvalidBody, "calibration '" + gate + "': " + e.what());
    }
}

}  // namespace

std::map<FrameId, Frame> device_frames(const DeviceDescriptor& device) {
    std::map<FrameId, Frame> frames;
    for (const auto& port : device.ports) {
        FrameId id{port.id.value()};
        frames.emplace(id, make_frame(id, port.id, port.frequency_hz));
    }
    return frames;
}

FrameId resolve_frame_role(const DeviceDescriptor& device, const RoleRef& role,
                           std::span<const SiteId> sites) {
    const Port* port = nullptr;
    if (role.role == FrameRole::coupler) {
        if (sites.size() == 2) port = device.coupler_port(sites[0], sites[1]);
    } else if (role.site_index < sites.size()) {
        const auto site = sites[role.site_index];
        const auto kind = role.role == FrameRole::drive     ? PortKind::drive
                          : role.role == FrameRole::readout ? PortKind::readout
                                                            : PortKind::acquire;
        port = device.site_port(site, kind);
    }
    if (port == nullptr) {
        std::string where;
        for (const auto s : sites) where += (where.empty() ? "" : ",") + std::to_string(s.value());
        fail(ErrorCode::UnboundFrameRole, "device '" + device.name + "' has no " +
                                              std::string(to_string(role.role)) + " port for site(s) " +
                                              where);
    }
    return FrameId{port->id.value()};
}

CalibrationRegistry builtin_calibrations(const DeviceDescriptor& device) {
    CalibrationRegistry registry;

    CalibrationOp shift;
    shift.kind = CalibrationOp::Kind::shift_phase;
    shift.targets = {RoleRef{FrameRole::drive, 0}};
    shift.value = ParamRef{"theta", true};
    registry.add(CalibrationEntry{"rz", std::nullopt, {"theta"}, {shift}});

    std::int64_t readout_samples = 0;
    double readout_amp = 1.0;
    bool every_site_has_acquire = true;
    bool any_readout = false;
    for (const auto& port : device.ports) {
        if (port.kind != PortKind::readout) continue;
        any_readout = true;
        readout_samples = std::max(readout_samples, port.constraints.min_duration_samples);
        readout_amp = std::min(readout_amp, port.constraints.max_amplitude);
        for (const auto s : port.sites) {
            if (device.site_port(s, PortKind::acquire) == nullptr) every_site_has_acquire = false;
        }
    }
    if (readout_samples == 0) readout_samples = 16;

    CalibrationOp play;
    play.kind = CalibrationOp::Kind::play;
    play.targets = {RoleRef{FrameRole::readout, 0}};
    play.waveform = TemplateParametric{WaveformTemplate::constant,
                                       static_cast<double>(readout_samples),
                                       {{"amp", 0.5 * readout_amp}, {"phase", 0.0}}};
    CalibrationOp capture;
    capture.kind = CalibrationOp::Kind::capture;
    capture.targets = {
        RoleRef{any_readout && every_site_has_acquire ? FrameRole::acquire : FrameRole::readout, 0}};
    registry.add(CalibrationEntry{"measure", std::nullopt, {}, {play, capture}});
    return registry;
}

CalibrationRegistry effective_calibrations(const DeviceDescriptor& device,
                                           const CalibrationRegistry& extra) {
    auto registry = builtin_calibrations(device);
    registry.merge(device.default_calibrations);
    registry.merge(extra);
    return registry;
}

std::vector<PulseInstruction> instantiate_calibration(const CalibrationEntry& entry,
                                                      std::span<const SiteId> sites,
                                                      const Params& parameters,
                                                      std::optional<ResultId> result,
                                                      const DeviceDescriptor& device) {
    std::vector<PulseInstruction> out;
    out.reserve(entry.body.size());
    for (const auto& op : entry.body) {
        if (op.kind == CalibrationOp::Kind::measure) {
            if (!result) {
                fail(ErrorCode::InvalidBody, "calibration '" + entry.gate + "' measures but the gate has no result");
            }
            const auto index = op.targets.front().site_index;
            if (index >= sites.size()) {
                fail(ErrorCode::InvalidBody, "calibration '" + entry.gate + "' measures site index " +
                                                 std::to_string(index) + " of a " + std::to_string(sites.size()) +
                                                 "-site gate");
            }
            out.emplace_back(instr::Measure{sites[index], *result});
            continue;
        }
        std::vector<FrameId> frames;
        for (const auto& t : op.targets) frames.push_back(resolve_frame_role(device, t, sites));
        const auto& frame = frames.front();
        switch (op.kind) {
            case CalibrationOp::Kind::play:
                out.emplace_back(instr::Play{frame, bind_waveform(*op.waveform, parameters, entry.gate)});
                break;
            case CalibrationOp::Kind::shift_phase:
                out.emplace_back(instr::ShiftPhase{frame, bind(op.value, parameters, entry.gate)});
                break;
            case CalibrationOp::Kind::set_phase:
                out.emplace_back(instr::SetPhase{frame, bind(op.value, parameters, entry.gate)});
                break;
            case CalibrationOp::Kind::shift_frequency:
                out.emplace_back(instr::ShiftFrequency{frame, bind(op.value, parameters, entry.gate)});
                break;
            case CalibrationOp::Kind::set_frequency:
                out.emplace_back(instr::SetFrequency{frame, bind(op.value, parameters, entry.gate)});
                break;
            case CalibrationOp::Kind::delay:
                out.emplace_back(instr::Delay{frame, bind_samples(op.value, parameters, entry.gate)});
                break;
            case CalibrationOp::Kind::barrier:
                out.emplace_back(make_barrier(std::move(frames)));
                break;
            case CalibrationOp::Kind::capture:
                if (!result) {
                    fail(ErrorCode::InvalidBody,
                         "calibration '" + entry.gate + "' captures but the gate has no result");
                }
                out.emplace_back(instr::Capture{frame, *result});
                break;
            case CalibrationOp::Kind::measure:
                break;
        }
    }
    return out;
}

Schedule lower(const GateCircuit& circuit, const CalibrationRegistry& registry,
               const DeviceDescriptor& device) {
    validate_circuit(circuit);
    if (circuit.num_sites > device.num_sites) {
        fail(ErrorCode::InvalidCircuit, "circuit uses " + std::to_string(circuit.num_sites) +
                                            " sites but device '" + device.name + "' has " +
                                            std::to_string(device.num_sites));
    }
    Schedule schedule;
    schedule.frames = device_frames(device);
    for (const auto& g : circuit.gates) {
        const std::string name{gate_name(g)};
        const SiteId sites[] = {gate_site(g)};
        const auto* entry = registry.lookup(name, sites);
        if (entry == nullptr) {
            fail(ErrorCode::MissingCalibration,
                 "no calibration for " + name + " on site " + std::to_string(sites[0].value()));
        }
        std::optional<ResultId> result;
        if (const auto* m = std::get_if<gate::Measure>(&g)) result = m->result;
        auto body = instantiate_calibration(*entry, sites, gate_parameters(g), result, device);
        std::move(body.begin(), body.end(), std::back_inserter(schedule.instructions));
    }
    return schedule;
}

}  // namespace pulsestack
