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

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "pulsestack/error.hpp"
#include "pulsestack/pqir.hpp"

namespace pulsestack::pqir {

namespace {

constexpr std::string_view kPortPrefix = "__pulse_port.";
constexpr std::string_view kFramePrefix = "__pulse_frame.";
constexpr std::string_view kBarrierPrefix = "__pulse_barrier.";

std::string handle(std::string_view type, std::int64_t value) {
    return "%" + std::string(type) + "* inttoptr (i64 " + std::to_string(value) + " to %" +
           std::string(type) + "*)";
}

void write_global(std::ostringstream& os, const std::string& name, const std::vector<double>& values) {
    os << '@' << name << " = constant [" << values.size() << " x double] [";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) os << ", ";
        os << format_real(values[i]);
    }
    os << "]\n";
}

bool is_reserved(std::string_view name) {
    return name.starts_with(kPortPrefix) || name.starts_with(kFramePrefix) ||
           name.starts_with(kBarrierPrefix);
}

bool is_global_token(std::string_view name) {
    if (name.empty()) return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
               c == '.';
    });
}

}  // namespace

std::string emit(const PulseModule& m) {
    const auto& schedule = m.schedule;
    if (!is_global_token(m.entry_name)) fail(ErrorCode::InvalidModule, "invalid entry name '" + m.entry_name + "'");
    if (m.module_name.find_first_of("\"\\\n") != std::string::npos) {
        fail(ErrorCode::InvalidModule, "module name contains characters that cannot be quoted");
    }
    if (m.attributes.output_labeling_schema.find_first_of("\"\\\n") != std::string::npos ||
        m.attributes.qir_profiles.find_first_of("\"\\\n") != std::string::npos) {
        fail(ErrorCode::InvalidModule, "attribute value contains characters that cannot be quoted");
    }
    validate_schedule(schedule);

    // Handles: ports in name order, frames in name order.
    std::map<PortId, std::int64_t> port_handle;
    for (const auto& [id, frame] : schedule.frames) port_handle.emplace(frame.port, 0);
    {
        std::int64_t next = 0;
        for (auto& [id, h] : port_handle) h = next++;
    }
    std::map<FrameId, std::int64_t> frame_handle;
    {
        std::int64_t next = 0;
        for (const auto& [id, frame] : schedule.frames) frame_handle.emplace(id, next++);
    }
    for (const auto& g : m.waveform_globals) {
        if (!is_global_token(g.name) || is_reserved(g.name)) {
            fail(ErrorCode::InvalidModule, "invalid waveform global name '" + g.name + "'");
        }
    }

    std::ostringstream os;
    os << "; pulse profile module\n";
    os << "source_filename = \"" << m.module_name << "\"\n\n";
    for (const char* type : {"Qubit", "Result", "Port", "Frame", "Waveform"}) {
        os << '%' << type << " = type opaque\n";
    }
    os << '\n';

    for (const auto& [port, h] : port_handle) {
        write_global(os, std::string(kPortPrefix) + port.value(), {static_cast<double>(h)});
    }
    for (const auto& [id, frame] : schedule.frames) {
        write_global(os, std::string(kFramePrefix) + id.value(),
                     {static_cast<double>(frame_handle.at(id)), static_cast<double>(port_handle.at(frame.port)),
                      frame.frequency_hz, frame.phase_rad, static_cast<double>(frame.elapsed_samples)});
    }
    std::size_t barrier_count = 0;
    for (const auto& instruction : schedule.instructions) {
        if (const auto* b = std::get_if<instr::Barrier>(&instruction)) {
            std::vector<double> handles;
            for (const auto& f : b->frames) handles.push_back(static_cast<double>(frame_handle.at(f)));
            write_global(os, std::string(kBarrierPrefix) + std::to_string(barrier_count++), handles);
        }
    }
    for (const auto& g : m.waveform_globals) {
        std::vector<double> data;
        data.reserve(2 * g.samples.size());
        for (const auto& s : g.samples) {
            data.push_back(s.real());
            data.push_back(s.imag());
        }
        write_global(os, g.name, data);
    }
    os << '\n';

    std::set<std::string_view> used;
    std::map<std::size_t, std::string> waveform_local;
    const auto& ins = schedule.instructions;
    os << "define void @" << m.entry_name << "() #0 {\n";
    os << "entry:\n";
    barrier_count = 0;
    for (std::size_t i = 0; i < ins.size(); ++i) {
        const auto& instruction = ins[i];
        auto call = [&](std::string_view intrinsic, const std::string& args) {
            used.insert(intrinsic);
            os << "  call void @" << intrinsic << '(' << args << ")\n";
        };
        auto frame_arg = [&](const FrameId& f) { return handle("Frame", frame_handle.at(f)); };
        auto port_arg = [&](const FrameId& f) { return handle("Port", port_handle.at(schedule.frames.at(f).port)); };

        if (const auto* play = std::get_if<instr::Play>(&instruction)) {
            if (!is_primary_frame(schedule, play->frame)) {
                fail(ErrorCode::UnsupportedInstruction,
                     "play on frame '" + play->frame.value() +
                         "' cannot be encoded: waveform_play addresses its port's primary frame");
            }
            const auto samples = waveform_samples(play->waveform);
            auto it = std::find_if(m.waveform_globals.begin(), m.waveform_globals.end(),
                                   [&](const WaveformGlobal& g) { return g.samples == samples; });
            if (it == m.waveform_globals.end()) {
                fail(ErrorCode::UndeclaredGlobal,
                     "instruction " + std::to_string(i) + " plays a waveform with no global");
            }
            const auto index = static_cast<std::size_t>(it - m.waveform_globals.begin());
            auto [local, fresh] = waveform_local.try_emplace(index, "%w" + std::to_string(index));
            if (fresh) {
                used.insert("__quantum__pulse__waveform__body");
                os << "  " << local->second << " = call %Waveform* @__quantum__pulse__waveform__body(i64 "
                   << it->samples.size() << ", double* @" << it->name << ")\n";
            }
            call("__quantum__pulse__waveform_play__body", port_arg(play->frame) + ", %Waveform* " + local->second);
        } else if (const auto* setf = std::get_if<instr::SetFrequency>(&instruction)) {
            const auto* next = i + 1 < ins.size() ? std::get_if<instr::SetPhase>(&ins[i + 1]) : nullptr;
            if (next != nullptr && next->frame == setf->frame && is_primary_frame(schedule, setf->frame)) {
                call("__quantum__pulse__frame_change__body", port_arg(setf->frame) + ", double " +
                                                                 format_real(setf->frequency_hz) + ", double " +
                                                                 format_real(next->phase_rad));
                ++i;
            } else {
                call("__quantum__pulse__set_frequency__body",
                     frame_arg(setf->frame) + ", double " + format_real(setf->frequency_hz));
            }
        } else if (const auto* shiftf = std::get_if<instr::ShiftFrequency>(&instruction)) {
            call("__quantum__pulse__shift_frequency__body",
                 frame_arg(shiftf->frame) + ", double " + format_real(shiftf->delta_hz));
        } else if (const auto* setp = std::get_if<instr::SetPhase>(&instruction)) {
            call("__quantum__pulse__set_phase__body",
                 frame_arg(setp->frame) + ", double " + format_real(setp->phase_rad));
        } else if (const auto* shiftp = std::get_if<instr::ShiftPhase>(&instruction)) {
            call("__quantum__pulse__shift_phase__body",
                 frame_arg(shiftp->frame) + ", double " + format_real(shiftp->delta_rad));
        } else if (const auto* delay = std::get_if<instr::Delay>(&instruction)) {
            call("__quantum__pulse__delay__body",
                 frame_arg(delay->frame) + ", i64 " + std::to_string(delay->duration_samples));
        } else if (const auto* barrier = std::get_if<instr::Barrier>(&instruction)) {
            call("__quantum__pulse__barrier__body", "i64 " + std::to_string(barrier->frames.size()) +
                                                        ", %Frame** @" + std::string(kBarrierPrefix) +
                                                        std::to_string(barrier_count++));
        } else if (const auto* capture = std::get_if<instr::Capture>(&instruction)) {
            call("__quantum__pulse__capture__body",
                 frame_arg(capture->frame) + ", " + handle("Result", capture->result.value()));
        } else if (const auto* measure = std::get_if<instr::Measure>(&instruction)) {
            call("__quantum__qis__mz__body",
                 handle("Qubit", measure->site.value()) + ", " + handle("Result", measure->result.value()));
        }
    }
    os << "  ret void\n}\n\n";

    for (const auto& sig : intrinsic_table()) {
        if (!used.contains(sig.name)) continue;
        os << "declare " << sig.return_type << " @" << sig.name << '(';
        for (std::size_t k = 0; k < sig.parameters.size(); ++k) {
            if (k > 0) os << ", ";
            os << sig.parameters[k];
        }
        os << ")\n";
    }
    if (!used.empty()) os << '\n';

    const auto& a = m.attributes;
    os << "attributes #0 = {";
    if (a.entry_point) os << " \"entry_point\"";
    if (a.output_labeling_schema.empty()) {
        os << " \"output_labeling_schema\"";
    } else {
        os << " \"output_labeling_schema\"=\"" << a.output_labeling_schema << '"';
    }
    os << " \"qir_profiles\"=\"" << a.qir_profiles << '"';
    os << " \"required_num_ports\"=\"" << a.required_num_ports << '"';
    os << " \"required_num_qubits\"=\"" << a.required_num_qubits << '"';
    os << " \"required_num_results\"=\"" << a.required_num_results << '"';
    os << " }\n";
    return os.str();
}

}  // namespace pulsestack::pqir
