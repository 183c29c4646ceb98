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

#include "pulsestack/error.hpp"
#include "pulsestack/passes.hpp"

namespace pulsestack {

std::string_view to_string(Severity severity) {
    switch (severity) {
        case Severity::note: return "note";
        case Severity::warning: return "warning";
        case Severity::error: return "error";
    }
    return "unknown";
}

bool has_errors(const Diagnostics& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::error; });
}

std::string format(const Diagnostic& diagnostic) {
    std::string out{to_string(diagnostic.severity)};
    out += ": ";
    if (diagnostic.instruction_index) out += "[" + std::to_string(*diagnostic.instruction_index) + "] ";
    out += diagnostic.message;
    return out;
}

}  // namespace pulsestack

namespace pulsestack::passes {

namespace {

Pass transform(std::string name, Schedule (*fn)(const Schedule&)) {
    return Pass{std::move(name), PassKind::transform,
                [fn](const Schedule& s, const DeviceDescriptor&) { return PassResult{fn(s), {}}; }};
}

}  // namespace

void PassRegistry::add(Pass pass) {
    auto it = std::find_if(passes_.begin(), passes_.end(), [&](const Pass& p) { return p.name == pass.name; });
    if (it != passes_.end()) {
        *it = std::move(pass);
    } else {
        passes_.push_back(std::move(pass));
    }
}

const Pass* PassRegistry::find(std::string_view name) const {
    for (const auto& p : passes_) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

std::vector<std::string> PassRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& p : passes_) out.push_back(p.name);
    return out;
}

PassRegistry default_pass_registry(LegalizeMode mode) {
    PassRegistry registry;
    registry.add(transform("resolve_timing", &resolve_timing));
    registry.add(transform("merge_delays", &merge_delays));
    registry.add(transform("fold_phase", &fold_phase));
    registry.add(Pass{"legalize", PassKind::transform,
                      [mode](const Schedule& s, const DeviceDescriptor& d) { return legalize(s, d, mode); }});
    registry.add(Pass{"verify", PassKind::analysis, [](const Schedule& s, const DeviceDescriptor& d) {
                          return PassResult{s, verify(s, d)};
                      }});
    return registry;
}

PipelineConfig parse_pipeline(std::string_view pass_list, LegalizeMode mode) {
    PipelineConfig config;
    config.mode = mode;
    std::size_t pos = 0;
    while (pos <= pass_list.size()) {
        auto comma = pass_list.find(',', pos);
        if (comma == std::string_view::npos) comma = pass_list.size();
        auto name = pass_list.substr(pos, comma - pos);
        while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
        while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
        if (!name.empty()) config.passes.emplace_back(name);
        pos = comma + 1;
    }
    return config;
}

PassResult run_pipeline(const Schedule& schedule, const PipelineConfig& config,
                        const DeviceDescriptor& device) {
    const auto registry = default_pass_registry(config.mode);
    std::vector<const Pass*> pipeline;
    for (const auto& name : config.passes) {
        const Pass* pass = registry.find(name);
        if (pass == nullptr) fail(ErrorCode::UnknownPass, "no pass named '" + name + "'");
        pipeline.push_back(pass);
    }

    PassResult current{schedule, {}};
    for (const Pass* pass : pipeline) {
        PassResult step;
        try {
            step = pass->apply(current.schedule, device);
        } catch (const Error& e) {
            step.diagnostics.push_back(Diagnostic{Severity::error, std::nullopt, pass->name + ": " + e.what()});
        }
        current.diagnostics.insert(current.diagnostics.end(), step.diagnostics.begin(),
                                   step.diagnostics.end());
        if (has_errors(step.diagnostics)) return PassResult{schedule, std::move(current.diagnostics)};
        if (pass->kind == PassKind::transform) current.schedule = std::move(step.schedule);
    }
    return current;
}

}  // namespace pulsestack::passes
