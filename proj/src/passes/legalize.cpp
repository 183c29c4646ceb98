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

#include <cmath>
#include <set>
#include <sstream>

#include "pulsestack/error.hpp"
#include "pulsestack/passes.hpp"

namespace pulsestack::passes {

namespace {

std::string hz(double f) {
    std::ostringstream os;
    os << f << " Hz";
    return os.str();
}

bool in_range(double f, const PortConstraints& c) {
    return f >= c.frequency_range_hz.first && f <= c.frequency_range_hz.second;
}

std::int64_t padded_length(std::int64_t d, const PortConstraints& c) {
    const auto g = c.granularity_samples;
    const auto rounded = ((d + g - 1) / g) * g;
    return std::max(rounded, c.min_duration_samples);
}

class Checker {
public:
    Checker(const Schedule& schedule, const DeviceDescriptor& device) : schedule_(schedule), device_(device) {}

    const Port* port_of(const FrameId& id) {
        auto fit = schedule_.frames.find(id);
        if (fit == schedule_.frames.end()) return nullptr;
        return device_.find_port(fit->second.port);
    }

    void error(std::optional<std::size_t> index, std::string message) {
        diagnostics.push_back(Diagnostic{Severity::error, index, std::move(message)});
    }

    void check_frames() {
        for (const auto& [id, frame] : schedule_.frames) {
            const Port* port = device_.find_port(frame.port);
            if (port == nullptr) {
                error(std::nullopt, "frame '" + id.value() + "' is bound to unknown port '" +
                                        frame.port.value() + "'");
                continue;
            }
            if (!in_range(frame.frequency_hz, port->constraints)) {
                error(std::nullopt, "frame '" + id.value() + "' starts at " + hz(frame.frequency_hz) +
                                        ", outside the range of port '" + port->id.value() + "'");
            }
        }
    }

    Diagnostics diagnostics;

private:
    const Schedule& schedule_;
    const DeviceDescriptor& device_;
};

}  // namespace

std::string_view to_string(LegalizeMode mode) {
    return mode == LegalizeMode::strict ? "strict" : "pad";
}

LegalizeMode parse_legalize_mode(std::string_view name) {
    if (name == "strict") return LegalizeMode::strict;
    if (name == "pad") return LegalizeMode::pad;
    fail(ErrorCode::UnknownPass, "unknown legalization mode '" + std::string(name) + "'");
}

PassResult legalize(const Schedule& schedule, const DeviceDescriptor& device, LegalizeMode mode) {
    Checker check(schedule, device);
    check.check_frames();

    Schedule out = schedule;
    bool changed = false;
    std::map<FrameId, double> frequency;
    for (const auto& [id, frame] : schedule.frames) frequency.emplace(id, frame.frequency_hz);

    for (std::size_t i = 0; i < out.instructions.size(); ++i) {
        auto& instruction = out.instructions[i];
        if (auto* play = std::get_if<instr::Play>(&instruction)) {
            const Port* port = check.port_of(play->frame);
            if (port == nullptr) continue;
            const auto& c = port->constraints;
            const auto d = waveform_duration(play->waveform);
            if (d < c.min_duration_samples || d % c.granularity_samples != 0) {
                if (mode == LegalizeMode::pad) {
                    auto samples = waveform_samples(play->waveform);
                    samples.resize(static_cast<std::size_t>(padded_length(d, c)), Complex{0.0, 0.0});
                    play->waveform = make_sampled_waveform(std::move(samples));
                    changed = true;
                } else {
                    check.error(i, "waveform of " + std::to_string(d) + " samples on port '" +
                                       port->id.value() + "' violates granularity " +
                                       std::to_string(c.granularity_samples) + " / minimum " +
                                       std::to_string(c.min_duration_samples));
                }
            }
            const double peak = max_abs_amplitude(play->waveform);
            if (peak > c.max_amplitude + kAmplitudeSlack) {
                std::ostringstream os;
                os << "amplitude " << peak << " exceeds the limit " << c.max_amplitude << " of port '"
                   << port->id.value() << "'";
                check.error(i, os.str());
            }
        } else if (std::holds_alternative<instr::SetFrequency>(instruction) ||
                   std::holds_alternative<instr::ShiftFrequency>(instruction)) {
            const FrameId* frame = nullptr;
            double next = 0.0;
            if (const auto* set = std::get_if<instr::SetFrequency>(&instruction)) {
                frame = &set->frame;
                next = set->frequency_hz;
            } else {
                const auto& shift = std::get<instr::ShiftFrequency>(instruction);
                frame = &shift.frame;
                auto it = frequency.find(shift.frame);
                next = (it == frequency.end() ? 0.0 : it->second) + shift.delta_hz;
            }
            frequency[*frame] = next;
            const Port* port = check.port_of(*frame);
            if (port != nullptr && !in_range(next, port->constraints)) {
                check.error(i, "frame '" + frame->value() + "' moves to " + hz(next) +
                                   ", outside [" + hz(port->constraints.frequency_range_hz.first) + ", " +
                                   hz(port->constraints.frequency_range_hz.second) + "] of port '" +
                                   port->id.value() + "'");
            }
        } else if (const auto* capture = std::get_if<instr::Capture>(&instruction)) {
            const Port* port = check.port_of(capture->frame);
            if (port != nullptr && port->kind != PortKind::readout && port->kind != PortKind::acquire) {
                check.error(i, "capture on frame '" + capture->frame.value() + "' whose port '" +
                                   port->id.value() + "' is a " + std::string(to_string(port->kind)) +
                                   " port");
            }
        } else if (const auto* measure = std::get_if<instr::Measure>(&instruction)) {
            if (measure->site.value() >= device.num_sites) {
                check.error(i, "measure of site " + std::to_string(measure->site.value()) +
                                   " on a " + std::to_string(device.num_sites) + "-site device");
            }
        }
    }
    if (changed && out.is_timed()) out = resolve_timing(out);
    return PassResult{std::move(out), std::move(check.diagnostics)};
}

Diagnostics verify(const Schedule& schedule, const DeviceDescriptor& device) {
    Diagnostics diagnostics;
    try {
        validate_schedule(schedule);
    } catch (const Error& e) {
        diagnostics.push_back(Diagnostic{Severity::error, std::nullopt, e.what()});
        return diagnostics;
    }
    for (const auto& [id, frame] : schedule.frames) {
        if (device.find_port(frame.port) == nullptr) {
            diagnostics.push_back(Diagnostic{Severity::error, std::nullopt,
                                             "frame '" + id.value() + "' is bound to unknown port '" +
                                                 frame.port.value() + "'"});
        }
    }
    for (std::size_t i = 0; i < schedule.instructions.size(); ++i) {
        const auto& instruction = schedule.instructions[i];
        if (const auto* capture = std::get_if<instr::Capture>(&instruction)) {
            const Port* port = device.find_port(schedule.frames.at(capture->frame).port);
            if (port != nullptr && port->kind != PortKind::readout && port->kind != PortKind::acquire) {
                diagnostics.push_back(Diagnostic{Severity::error, i,
                                                 "capture on non-readout frame '" +
                                                     capture->frame.value() + "'"});
            }
        }
        if (const auto* measure = std::get_if<instr::Measure>(&instruction);
            measure && measure->site.value() >= device.num_sites) {
            diagnostics.push_back(Diagnostic{Severity::error, i, "measure of unknown site"});
        }
    }
    return diagnostics;
}

}  // namespace pulsestack::passes
