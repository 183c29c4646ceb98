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

#include "pulsestack/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "pulsestack/error.hpp"

namespace pulsestack {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

[[noreturn]] void invalid_body(const CalibrationEntry& e, const std::string& why) {
    fail(ErrorCode::InvalidBody, "calibration '" + e.gate + "': " + why);
}

void collect_refs(const ParamValue& v, std::vector<std::string>& out) {
    if (const auto* r = std::get_if<ParamRef>(&v)) out.push_back(r->name);
}

std::vector<std::string> referenced_params(const CalibrationOp& op) {
    std::vector<std::string> refs;
    collect_refs(op.value, refs);
    if (op.waveform) {
        if (const auto* p = std::get_if<TemplateParametric>(&*op.waveform)) {
            collect_refs(p->duration_samples, refs);
            for (const auto& [name, value] : p->params) collect_refs(value, refs);
        }
    }
    return refs;
}

bool has_refs(const TemplateParametric& p) {
    if (std::holds_alternative<ParamRef>(p.duration_samples)) return true;
    return std::any_of(p.params.begin(), p.params.end(),
                       [](const auto& kv) { return std::holds_alternative<ParamRef>(kv.second); });
}

void check_literal_waveform(const CalibrationEntry& e, const TemplateWaveform& w) {
    try {
        if (const auto* samples = std::get_if<std::vector<Complex>>(&w)) {
            (void)make_sampled_waveform(*samples);
            return;
        }
        const auto& p = std::get<TemplateParametric>(w);
        if (has_refs(p)) return;
        std::map<std::string, double, std::less<>> literal;
        for (const auto& [name, value] : p.params) literal.emplace(name, std::get<double>(value));
        const double d = std::get<double>(p.duration_samples);
        if (d != std::floor(d)) invalid_body(e, "waveform duration is not an integer");
        (void)make_parametric_waveform(p.shape, static_cast<std::int64_t>(d), std::move(literal));
    } catch (const Error& err) {
        if (err.code() == ErrorCode::InvalidBody) throw;
        invalid_body(e, err.what());
    }
}

// --- JSON helpers ---------------------------------------------------------

ParamValue param_from_json(const json& j, const std::string& context) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        bool negate = false;
        if (!s.empty() && s[0] == '-') {
            negate = true;
            s.erase(0, 1);
        }
        if (s.size() > 3 && s.starts_with("${") && s.ends_with("}")) {
            return ParamRef{s.substr(2, s.size() - 3), negate};
        }
    }
    fail(ErrorCode::InvalidBody, context + ": expected a number or \"${name}\"");
}

TemplateWaveform waveform_from_json(const json& j) {
    if (!j.is_object()) fail(ErrorCode::InvalidBody, "waveform must be an object");
    if (j.contains("samples")) {
        std::vector<Complex> samples;
        for (const auto& s : j.at("samples")) {
            if (s.is_number()) {
                samples.emplace_back(s.get<double>(), 0.0);
            } else if (s.is_array() && s.size() == 2) {
                samples.emplace_back(s[0].get<double>(), s[1].get<double>());
            } else {
                fail(ErrorCode::InvalidBody, "waveform samples must be numbers or [re, im] pairs");
            }
        }
        return samples;
    }
    TemplateParametric p;
    p.shape = parse_waveform_template(j.at("template").get<std::string>());
    p.duration_samples = param_from_json(j.at("duration_samples"), "duration_samples");
    for (const auto& [key, value] : j.items()) {
        if (key == "template" || key == "duration_samples") continue;
        p.params.emplace(key, param_from_json(value, key));
    }
    return p;
}

RoleRef role_from_json(const json& j) {
    if (j.is_string()) return RoleRef{parse_frame_role(j.get<std::string>()), 0};
    return RoleRef{parse_frame_role(j.at("frame_role").get<std::string>()),
                   j.value("site_index", 0u)};
}

CalibrationOp op_from_json(const json& j) {
    CalibrationOp op;
    const auto name = j.at("op").get<std::string>();
    static const std::map<std::string, std::pair<CalibrationOp::Kind, const char*>, std::less<>> kinds{
        {"play", {CalibrationOp::Kind::play, nullptr}},
        {"shift_phase", {CalibrationOp::Kind::shift_phase, "delta_rad"}},
        {"set_phase", {CalibrationOp::Kind::set_phase, "phase_rad"}},
        {"shift_frequency", {CalibrationOp::Kind::shift_frequency, "delta_hz"}},
        {"set_frequency", {CalibrationOp::Kind::set_frequency, "frequency_hz"}},
        {"delay", {CalibrationOp::Kind::delay, "duration_samples"}},
        {"barrier", {CalibrationOp::Kind::barrier, nullptr}},
        {"capture", {CalibrationOp::Kind::capture, nullptr}},
        {"measure", {CalibrationOp::Kind::measure, nullptr}},
    };
    auto it = kinds.find(name);
    if (it == kinds.end()) fail(ErrorCode::InvalidBody, "unknown calibration op '" + name + "'");
    op.kind = it->second.first;
    if (op.kind == CalibrationOp::Kind::barrier) {
        for (const auto& r : j.at("frame_roles")) op.targets.push_back(role_from_json(r));
    } else if (op.kind == CalibrationOp::Kind::measure) {
        op.targets.push_back(RoleRef{FrameRole::readout, j.value("site_index", 0u)});
    } else {
        RoleRef ref{parse_frame_role(j.at("frame_role").get<std::string>()), j.value("site_index", 0u)};
        op.targets.push_back(ref);
    }
    if (const char* field = it->second.second) {
        op.value = param_from_json(j.at(field), name + "." + field);
    }
    if (op.kind == CalibrationOp::Kind::play) op.waveform = waveform_from_json(j.at("waveform"));
    return op;
}

CalibrationEntry entry_from_json(const json& j) {
    CalibrationEntry e;
    e.gate = j.at("gate").get<std::string>();
    const auto& sites = j.at("sites");
    if (sites.is_string()) {
        if (sites.get<std::string>() != "any") {
            fail(ErrorCode::InvalidBody, "sites must be a list or \"any\"");
        }
    } else {
        std::vector<SiteId> list;
        for (const auto& s : sites) list.emplace_back(s.get<std::uint32_t>());
        e.sites = std::move(list);
    }
    if (j.contains("params")) e.params = j.at("params").get<std::vector<std::string>>();
    for (const auto& op : j.at("body")) e.body.push_back(op_from_json(op));
    return e;
}

}  // namespace

// --- gates ------------------------------------------------------------------

std::string_view gate_name(const Gate& g) {
    return std::visit(overloaded{
                          [](const gate::X&) { return std::string_view{"x"}; },
                          [](const gate::SX&) { return std::string_view{"sx"}; },
                          [](const gate::RZ&) { return std::string_view{"rz"}; },
                          [](const gate::Measure&) { return std::string_view{"measure"}; },
                      },
                      g);
}

SiteId gate_site(const Gate& g) {
    return std::visit([](const auto& x) { return x.site; }, g);
}

std::map<std::string, double, std::less<>> gate_parameters(const Gate& g) {
    if (const auto* rz = std::get_if<gate::RZ>(&g)) return {{"theta", rz->theta_rad}};
    return {};
}

void validate_circuit(const GateCircuit& circuit) {
    if (circuit.num_sites == 0) fail(ErrorCode::InvalidCircuit, "circuit has no sites");
    std::set<ResultId> results;
    for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
        const auto& g = circuit.gates[i];
        if (gate_site(g).value() >= circuit.num_sites) {
            fail(ErrorCode::InvalidCircuit, "gate " + std::to_string(i) + " targets site " +
                                                std::to_string(gate_site(g).value()) + " of " +
                                                std::to_string(circuit.num_sites));
        }
        if (const auto* rz = std::get_if<gate::RZ>(&g); rz && !std::isfinite(rz->theta_rad)) {
            fail(ErrorCode::InvalidCircuit, "gate " + std::to_string(i) + " has a non-finite angle");
        }
        if (const auto* m = std::get_if<gate::Measure>(&g); m && !results.insert(m->result).second) {
            fail(ErrorCode::InvalidCircuit,
                 "result " + std::to_string(m->result.value()) + " is measured twice");
        }
    }
}

GateCircuit parse_circuit_json(std::string_view text) {
    GateCircuit circuit;
    try {
        const auto doc = json::parse(text);
        const json* gates = &doc;
        std::optional<std::uint32_t> declared;
        if (doc.is_object()) {
            gates = &doc.at("gates");
            if (doc.contains("num_sites")) declared = doc.at("num_sites").get<std::uint32_t>();
        }
        std::uint32_t max_site = 0;
        for (const auto& g : *gates) {
            const auto name = g.at("gate").get<std::string>();
            const SiteId site{g.at("site").get<std::uint32_t>()};
            max_site = std::max(max_site, site.value());
            if (name == "x") {
                circuit.gates.emplace_back(gate::X{site});
            } else if (name == "sx") {
                circuit.gates.emplace_back(gate::SX{site});
            } else if (name == "rz") {
                circuit.gates.emplace_back(gate::RZ{site, g.at("theta").get<double>()});
            } else if (name == "measure") {
                circuit.gates.emplace_back(gate::Measure{site, ResultId{g.at("result").get<std::uint32_t>()}});
            } else {
                fail(ErrorCode::InvalidCircuit, "unknown gate '" + name + "'");
            }
        }
        circuit.num_sites = declared.value_or(circuit.gates.empty() ? 1 : max_site + 1);
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidCircuit, e.what());
    }
    validate_circuit(circuit);
    return circuit;
}

// --- calibration entries ---------------------------------------------------

std::string_view to_string(FrameRole role) {
    switch (role) {
        case FrameRole::drive: return "drive";
        case FrameRole::readout: return "readout";
        case FrameRole::acquire: return "acquire";
        case FrameRole::coupler: return "coupler";
    }
    return "unknown";
}

FrameRole parse_frame_role(std::string_view name) {
    if (name == "drive") return FrameRole::drive;
    if (name == "readout") return FrameRole::readout;
    if (name == "acquire") return FrameRole::acquire;
    if (name == "coupler") return FrameRole::coupler;
    fail(ErrorCode::InvalidBody, "unknown frame role '" + std::string(name) + "'");
}

std::string_view to_string(CalibrationOp::Kind kind) {
    switch (kind) {
        case CalibrationOp::Kind::play: return "play";
        case CalibrationOp::Kind::shift_phase: return "shift_phase";
        case CalibrationOp::Kind::set_phase: return "set_phase";
        case CalibrationOp::Kind::shift_frequency: return "shift_frequency";
        case CalibrationOp::Kind::set_frequency: return "set_frequency";
        case CalibrationOp::Kind::delay: return "delay";
        case CalibrationOp::Kind::barrier: return "barrier";
        case CalibrationOp::Kind::capture: return "capture";
        case CalibrationOp::Kind::measure: return "measure";
    }
    return "unknown";
}

void validate_calibration(const CalibrationEntry& e) {
    if (e.gate.empty()) fail(ErrorCode::InvalidBody, "calibration has no gate name");
    std::size_t arity = 1;
    if (e.sites) {
        if (e.sites->empty()) invalid_body(e, "site list is empty");
        std::set<SiteId> distinct(e.sites->begin(), e.sites->end());
        if (distinct.size() != e.sites->size()) invalid_body(e, "site list has duplicates");
        arity = e.sites->size();
    }
    const std::set<std::string> declared(e.params.begin(), e.params.end());

    for (std::size_t i = 0; i < e.body.size(); ++i) {
        const auto& op = e.body[i];
        const std::string where = "op " + std::to_string(i) + " (" + std::string(to_string(op.kind)) + ")";
        if (op.kind == CalibrationOp::Kind::barrier) {
            std::set<std::pair<FrameRole, std::uint32_t>> distinct;
            for (const auto& t : op.targets) distinct.emplace(t.role, t.site_index);
            if (distinct.size() < 2) invalid_body(e, where + " needs at least two frame roles");
        } else if (op.targets.size() != 1) {
            invalid_body(e, where + " needs exactly one frame role");
        }
        for (const auto& t : op.targets) {
            if (t.role == FrameRole::coupler) {
                if (arity != 2) {
                    invalid_body(e, where + " uses the coupler role, which needs a two-site entry");
                }
            } else if (t.site_index >= arity) {
                invalid_body(e, where + " addresses site index " + std::to_string(t.site_index) +
                                    " of a " + std::to_string(arity) + "-site entry");
            }
        }
        if ((op.kind == CalibrationOp::Kind::capture || op.kind == CalibrationOp::Kind::measure) &&
            e.gate != "measure") {
            invalid_body(e, where + " is only valid in measurement calibrations");
        }
        if (op.kind == CalibrationOp::Kind::play) {
            if (!op.waveform) invalid_body(e, where + " has no waveform");
            check_literal_waveform(e, *op.waveform);
        } else if (op.waveform) {
            invalid_body(e, where + " carries a waveform");
        }
        if (const auto* v = std::get_if<double>(&op.value); v && !std::isfinite(*v)) {
            invalid_body(e, where + " has a non-finite value");
        }
        if (op.kind == CalibrationOp::Kind::delay) {
            if (const auto* v = std::get_if<double>(&op.value); v && (*v < 0 || *v != std::floor(*v))) {
                invalid_body(e, where + " duration must be a nonnegative integer");
            }
        }
        for (const auto& name : referenced_params(op)) {
            if (!declared.contains(name)) {
                invalid_body(e, where + " uses undeclared parameter '" + name + "'");
            }
        }
    }
}

bool CalibrationRegistry::add(CalibrationEntry entry) {
    validate_calibration(entry);
    for (auto& existing : entries_) {
        if (existing.gate == entry.gate && existing.sites == entry.sites) {
            existing = std::move(entry);
            return true;
        }
    }
    entries_.push_back(std::move(entry));
    return false;
}

const CalibrationEntry* CalibrationRegistry::lookup(std::string_view gate,
                                                    std::span<const SiteId> sites) const {
    for (const auto& e : entries_) {
        if (e.gate == gate && e.sites &&
            std::equal(e.sites->begin(), e.sites->end(), sites.begin(), sites.end())) {
            return &e;
        }
    }
    return lookup_wildcard(gate);
}

const CalibrationEntry* CalibrationRegistry::lookup_wildcard(std::string_view gate) const {
    for (const auto& e : entries_) {
        if (e.gate == gate && e.is_wildcard()) return &e;
    }
    return nullptr;
}

bool CalibrationRegistry::contains_gate(std::string_view gate) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.gate == gate; });
}

void CalibrationRegistry::merge(const CalibrationRegistry& other) {
    for (const auto& e : other.entries_) add(e);
}

Registration register_calibration(CalibrationRegistry registry, CalibrationEntry entry) {
    const bool replaced = registry.add(std::move(entry));
    return Registration{std::move(registry), replaced};
}

std::vector<CalibrationEntry> parse_calibration_entries(std::string_view text) {
    std::vector<CalibrationEntry> entries;
    try {
        const auto doc = json::parse(text);
        if (!doc.is_array()) fail(ErrorCode::InvalidBody, "calibration document must be a list");
        for (const auto& j : doc) entries.push_back(entry_from_json(j));
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidBody, e.what());
    }
    return entries;
}

CalibrationRegistry parse_calibrations_json(std::string_view text) {
    CalibrationRegistry registry;
    for (auto& e : parse_calibration_entries(text)) registry.add(std::move(e));
    return registry;
}

}  // namespace pulsestack
