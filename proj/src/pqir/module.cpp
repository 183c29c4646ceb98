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
#include <charconv>
#include <cmath>
#include <set>

#include "pulsestack/error.hpp"
#include "pulsestack/pqir.hpp"

namespace pulsestack::pqir {

namespace {

const std::vector<IntrinsicSignature>& table() {
    static const std::vector<IntrinsicSignature> kTable{
        {"__quantum__pulse__waveform__body", "%Waveform*", {"i64", "double*"}},
        {"__quantum__pulse__waveform_play__body", "void", {"%Port*", "%Waveform*"}},
        {"__quantum__pulse__frame_change__body", "void", {"%Port*", "double", "double"}},
        {"__quantum__pulse__delay__body", "void", {"%Frame*", "i64"}},
        {"__quantum__pulse__shift_phase__body", "void", {"%Frame*", "double"}},
        {"__quantum__pulse__set_phase__body", "void", {"%Frame*", "double"}},
        {"__quantum__pulse__shift_frequency__body", "void", {"%Frame*", "double"}},
        {"__quantum__pulse__set_frequency__body", "void", {"%Frame*", "double"}},
        {"__quantum__pulse__barrier__body", "void", {"i64", "%Frame**"}},
        {"__quantum__pulse__capture__body", "void", {"%Frame*", "%Result*"}},
        {"__quantum__qis__mz__body", "void", {"%Qubit*", "%Result*"}},
    };
    return kTable;
}

}  // namespace

std::span<const IntrinsicSignature> intrinsic_table() { return table(); }

const IntrinsicSignature* find_intrinsic(std::string_view name) {
    for (const auto& sig : table()) {
        if (sig.name == name) return &sig;
    }
    return nullptr;
}

std::string format_real(double value) {
    if (!std::isfinite(value)) fail(ErrorCode::InvalidModule, "non-finite real cannot be encoded");
    char buf[64];
    auto [end, ec] = std::to_chars(std::begin(buf), std::end(buf), value);
    std::string out(buf, end);
    if (out.find_first_of(".e") == std::string::npos) out += ".0";
    return out;
}

bool is_primary_frame(const Schedule& schedule, const FrameId& frame) {
    auto it = schedule.frames.find(frame);
    if (it == schedule.frames.end()) return false;
    // The map is ordered by name, so the first frame on the port is primary.
    for (const auto& [id, f] : schedule.frames) {
        if (f.port == it->second.port) return id == frame;
    }
    return false;
}

Usage compute_usage(const Schedule& schedule) {
    std::set<PortId> ports;
    std::set<ResultId> results;
    std::int64_t qubits = 0;
    for (const auto& instruction : schedule.instructions) {
        for (const auto& f : frames_of(instruction)) {
            auto it = schedule.frames.find(f);
            if (it != schedule.frames.end()) ports.insert(it->second.port);
        }
        if (const auto* m = std::get_if<instr::Measure>(&instruction)) {
            qubits = std::max<std::int64_t>(qubits, m->site.value() + 1);
            results.insert(m->result);
        }
        if (const auto* c = std::get_if<instr::Capture>(&instruction)) results.insert(c->result);
    }
    return Usage{static_cast<std::int64_t>(ports.size()), qubits,
                 static_cast<std::int64_t>(results.size())};
}

PulseModule build_module(const Schedule& schedule, const ModuleOptions& options) {
    PulseModule m;
    m.module_name = options.module_name;
    m.entry_name = options.entry_name;
    m.schedule.frames = schedule.frames;
    m.schedule.instructions.reserve(schedule.instructions.size());
    for (const auto& instruction : schedule.instructions) {
        if (const auto* play = std::get_if<instr::Play>(&instruction)) {
            auto resolved = resolve_waveform(play->waveform);
            const auto& samples = resolved.sampled().samples;
            auto it = std::find_if(m.waveform_globals.begin(), m.waveform_globals.end(),
                                   [&](const WaveformGlobal& g) { return g.samples == samples; });
            if (it == m.waveform_globals.end()) {
                m.waveform_globals.push_back(
                    WaveformGlobal{"wf" + std::to_string(m.waveform_globals.size()), samples});
            }
            m.schedule.instructions.emplace_back(instr::Play{play->frame, std::move(resolved)});
        } else {
            m.schedule.instructions.push_back(instruction);
        }
    }
    const auto usage = compute_usage(m.schedule);
    m.attributes.entry_point = true;
    m.attributes.qir_profiles = "pulse";
    m.attributes.output_labeling_schema = options.output_labeling_schema;
    m.attributes.required_num_ports = usage.ports;
    m.attributes.required_num_qubits = std::max(options.num_qubits, usage.qubits);
    m.attributes.required_num_results = std::max(options.num_results, usage.results);
    return m;
}

Diagnostics validate_profile(const PulseModule& m) {
    Diagnostics out;
    auto error = [&](std::string message, std::optional<std::size_t> index = std::nullopt) {
        out.push_back(Diagnostic{Severity::error, index, std::move(message)});
    };
    const auto& a = m.attributes;
    if (a.qir_profiles != "pulse") error("qir_profiles is \"" + a.qir_profiles + "\", expected \"pulse\"");
    if (!a.entry_point) error("module has no \"entry_point\" attribute");

    try {
        validate_schedule(m.schedule);
    } catch (const Error& e) {
        error(e.what());
        return out;
    }

    const auto usage = compute_usage(m.schedule);
    if (a.required_num_ports != usage.ports) {
        error("required_num_ports is " + std::to_string(a.required_num_ports) + " but " +
              std::to_string(usage.ports) + " port(s) are used");
    }
    if (a.required_num_qubits < usage.qubits) {
        error("required_num_qubits is " + std::to_string(a.required_num_qubits) + " but qubit " +
              std::to_string(usage.qubits - 1) + " is measured");
    }
    if (a.required_num_results < usage.results) {
        error("required_num_results is " + std::to_string(a.required_num_results) + " but " +
              std::to_string(usage.results) + " result(s) are written");
    }

    std::set<std::uint32_t> results;
    for (std::size_t i = 0; i < m.schedule.instructions.size(); ++i) {
        const auto& instruction = m.schedule.instructions[i];
        if (const auto* c = std::get_if<instr::Capture>(&instruction)) results.insert(c->result.value());
        if (const auto* ms = std::get_if<instr::Measure>(&instruction)) results.insert(ms->result.value());
        if (const auto* play = std::get_if<instr::Play>(&instruction)) {
            if (!is_primary_frame(m.schedule, play->frame)) {
                error("play on frame '" + play->frame.value() + "', which is not its port's primary frame", i);
            }
            const auto samples = waveform_samples(play->waveform);
            const bool declared = std::any_of(m.waveform_globals.begin(), m.waveform_globals.end(),
                                              [&](const WaveformGlobal& g) { return g.samples == samples; });
            if (!declared) error("played waveform matches no waveform global", i);
        }
    }
    if (!results.empty() && *results.rbegin() + 1 != results.size()) {
        error("result indices are not dense from 0");
    }
    return out;
}

}  // namespace pulsestack::pqir
