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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pulsestack/ids.hpp"
#include "pulsestack/waveform.hpp"

namespace pulsestack {

// ---------------------------------------------------------------------------
// Gate-level circuits
// ---------------------------------------------------------------------------

namespace gate {

struct X {
    SiteId site;
    bool operator==(const X&) const = default;
};

struct SX {
    SiteId site;
    bool operator==(const SX&) const = default;
};

struct RZ {
    SiteId site;
    double theta_rad = 0.0;
    bool operator==(const RZ&) const = default;
};

struct Measure {
    SiteId site;
    ResultId result;
    bool operator==(const Measure&) const = default;
};

}  // namespace gate

using Gate = std::variant<gate::X, gate::SX, gate::RZ, gate::Measure>;

/// Lower-case gate name used as the calibration key ("x", "sx", "rz", "measure").
std::string_view gate_name(const Gate& g);
SiteId gate_site(const Gate& g);
/// Named scalar parameters a gate binds into its calibration body.
std::map<std::string, double, std::less<>> gate_parameters(const Gate& g);

struct GateCircuit {
    std::uint32_t num_sites = 0;
    std::vector<Gate> gates;

    bool operator==(const GateCircuit&) const = default;
};

/// Throws InvalidCircuit on out-of-range sites, duplicate results, or a
/// non-finite angle.
void validate_circuit(const GateCircuit& circuit);

/// Parses the JSON circuit format: either a bare list of gate objects or
/// {"num_sites": n, "gates": [...]}. For a bare list num_sites is inferred.
GateCircuit parse_circuit_json(std::string_view text);

// ---------------------------------------------------------------------------
// Calibration templates
// ---------------------------------------------------------------------------

enum class FrameRole { drive, readout, acquire, coupler };

std::string_view to_string(FrameRole role);
FrameRole parse_frame_role(std::string_view name);

/// Reference to a gate parameter, optionally negated ("-${theta}").
struct ParamRef {
    std::string name;
    bool negate = false;
    bool operator==(const ParamRef&) const = default;
};

using ParamValue = std::variant<double, ParamRef>;

struct TemplateParametric {
    WaveformTemplate shape = WaveformTemplate::constant;
    ParamValue duration_samples = 0.0;
    std::map<std::string, ParamValue, std::less<>> params;
    bool operator==(const TemplateParametric&) const = default;
};

using TemplateWaveform = std::variant<std::vector<Complex>, TemplateParametric>;

/// A frame role, resolved against the gate's site at position site_index.
struct RoleRef {
    FrameRole role = FrameRole::drive;
    std::uint32_t site_index = 0;
    bool operator==(const RoleRef&) const = default;
};

struct CalibrationOp {
    enum class Kind {
        play,
        shift_phase,
        set_phase,
        shift_frequency,
        set_frequency,
        delay,
        barrier,
        capture,
        /// Gate-level measurement of the target's site; the role is unused.
        measure,
    };

    Kind kind = Kind::play;
    /// One target, or at least two for barrier.
    std::vector<RoleRef> targets;
    /// delta / phase / frequency / duration, depending on kind.
    ParamValue value = 0.0;
    std::optional<TemplateWaveform> waveform;

    bool operator==(const CalibrationOp&) const = default;
};

std::string_view to_string(CalibrationOp::Kind kind);

struct CalibrationEntry {
    std::string gate;
    /// Specific sites, or nullopt for the wildcard entry.
    std::optional<std::vector<SiteId>> sites;
    std::vector<std::string> params;
    std::vector<CalibrationOp> body;

    bool is_wildcard() const noexcept { return !sites.has_value(); }
    bool operator==(const CalibrationEntry&) const = default;
};

/// Throws InvalidBody when the body uses undeclared parameters, a role that
/// the entry's sites cannot resolve, a capture outside a measurement, or a
/// malformed literal.
void validate_calibration(const CalibrationEntry& entry);

/// Gate pulse implementations keyed by (gate, sites). Lookup prefers the
/// site-specific entry and falls back to the gate's wildcard entry.
class CalibrationRegistry {
public:
    /// Validates and stores the entry. Returns true when it replaced an
    /// existing entry with the same key.
    bool add(CalibrationEntry entry);

    const CalibrationEntry* lookup(std::string_view gate, std::span<const SiteId> sites) const;
    const CalibrationEntry* lookup_wildcard(std::string_view gate) const;

    bool contains_gate(std::string_view gate) const;
    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<CalibrationEntry>& entries() const noexcept { return entries_; }

    /// Adds every entry of other, in order, with the usual replacement rule.
    void merge(const CalibrationRegistry& other);

private:
    std::vector<CalibrationEntry> entries_;
};

struct Registration {
    CalibrationRegistry registry;
    bool replaced = false;
};

Registration register_calibration(CalibrationRegistry registry, CalibrationEntry entry);

/// JSON calibration document: a list of {"gate", "sites", "params", "body"}.
CalibrationRegistry parse_calibrations_json(std::string_view text);
std::vector<CalibrationEntry> parse_calibration_entries(std::string_view text);

}  // namespace pulsestack
