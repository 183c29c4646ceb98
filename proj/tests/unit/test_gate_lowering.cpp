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

#include <gtest/gtest.h>

#include <fstream>
#include <numbers>
#include <sstream>

#include "pulsestack/calibration.hpp"
#include "pulsestack/error.hpp"
#include "pulsestack/lowering.hpp"
#include "support/oracles.hpp"

using namespace pulsestack;
using std::numbers::pi;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::Io;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TemplateParametric pi_pulse_template() {
    TemplateParametric t;
    t.shape = WaveformTemplate::gaussian;
    t.duration_samples = 32.0;
    t.params = {{"amp", 0.5}, {"phase", 0.0}, {"sigma_samples", 8.0}};
    return t;
}

CalibrationEntry x_entry(std::optional<std::vector<SiteId>> sites) {
    CalibrationEntry e;
    e.gate = "x";
    e.sites = std::move(sites);
    CalibrationOp op;
    op.kind = CalibrationOp::Kind::play;
    op.targets = {RoleRef{FrameRole::drive, 0}};
    op.waveform = pi_pulse_template();
    e.body.push_back(op);
    return e;
}

DeviceDescriptor two_site_device() {
    auto d = testsupport::one_qubit_device();
    d.num_sites = 2;
    d.ports.push_back(Port{PortId{"d1"}, PortKind::drive, {SiteId{1}}, testsupport::constraints(), 5.1e9});
    d.ports.push_back(Port{PortId{"m1"}, PortKind::readout, {SiteId{1}}, testsupport::constraints(), 7.1e9});
    d.ports.push_back(Port{PortId{"a1"}, PortKind::acquire, {SiteId{1}}, testsupport::constraints(), 7.1e9});
    return d;
}

}  // namespace

TEST(Registry, StoreAndFetch) {
    auto [reg, replaced] = register_calibration({}, x_entry(std::vector<SiteId>{SiteId{0}}));
    EXPECT_FALSE(replaced);
    const std::vector<SiteId> s0{SiteId{0}};
    ASSERT_NE(reg.lookup("x", s0), nullptr);
    EXPECT_EQ(*reg.lookup("x", s0), x_entry(std::vector<SiteId>{SiteId{0}}));
}

TEST(Registry, SiteSpecificBeatsWildcard) {
    CalibrationRegistry reg;
    auto wildcard = x_entry(std::nullopt);
    auto specific = x_entry(std::vector<SiteId>{SiteId{0}});
    std::get<TemplateParametric>(*specific.body[0].waveform).params["amp"] = 0.25;
    reg.add(wildcard);
    reg.add(specific);
    const std::vector<SiteId> s0{SiteId{0}};
    const std::vector<SiteId> s1{SiteId{1}};
    EXPECT_EQ(*reg.lookup("x", s0), specific);
    EXPECT_EQ(*reg.lookup("x", s1), wildcard);
}

TEST(Registry, DuplicateIsReplacedAndReported) {
    auto first = register_calibration({}, x_entry(std::vector<SiteId>{SiteId{0}}));
    auto second_entry = x_entry(std::vector<SiteId>{SiteId{0}});
    std::get<TemplateParametric>(*second_entry.body[0].waveform).params["amp"] = 0.4;
    auto second = register_calibration(first.registry, second_entry);
    EXPECT_TRUE(second.replaced);
    EXPECT_EQ(second.registry.size(), 1u);
    const std::vector<SiteId> s0{SiteId{0}};
    EXPECT_EQ(*second.registry.lookup("x", s0), second_entry);
}

TEST(Registry, CouplerRoleOnSingleSiteEntryIsInvalid) {
    auto e = x_entry(std::vector<SiteId>{SiteId{0}});
    e.body[0].targets = {RoleRef{FrameRole::coupler, 0}};
    EXPECT_EQ(code_of([&] { register_calibration({}, e); }), ErrorCode::InvalidBody);
}

TEST(Registry, UndeclaredParameterIsInvalid) {
    auto e = x_entry(std::nullopt);
    std::get<TemplateParametric>(*e.body[0].waveform).params["phase"] = ParamRef{"theta", false};
    EXPECT_EQ(code_of([&] { register_calibration({}, e); }), ErrorCode::InvalidBody);
    e.params = {"theta"};
    EXPECT_NO_THROW(register_calibration({}, e));
}

TEST(Registry, CaptureOutsideMeasurementIsInvalid) {
    CalibrationEntry e;
    e.gate = "x";
    CalibrationOp op;
    op.kind = CalibrationOp::Kind::capture;
    op.targets = {RoleRef{FrameRole::acquire, 0}};
    e.body.push_back(op);
    EXPECT_EQ(code_of([&] { register_calibration({}, e); }), ErrorCode::InvalidBody);
}

TEST(Builtins, ExactlyTwoRules) {
    const auto reg = builtin_calibrations(testsupport::one_qubit_device());
    EXPECT_EQ(reg.size(), 2u);
    EXPECT_NE(reg.lookup_wildcard("rz"), nullptr);
    EXPECT_NE(reg.lookup_wildcard("measure"), nullptr);
    EXPECT_EQ(reg.lookup_wildcard("x"), nullptr);
}

TEST(Lowering, XThenMeasure) {
    const auto dev = testsupport::one_qubit_device();
    CalibrationRegistry extra;
    extra.add(x_entry(std::nullopt));
    GateCircuit c{1, {gate::X{SiteId{0}}, gate::Measure{SiteId{0}, ResultId{0}}}};
    const auto s = lower(c, effective_calibrations(dev, extra), dev);

    // Hand expansion: the x body is one play on the drive frame; the built-in
    // measurement is a play on the readout frame and a capture on acquire.
    ASSERT_EQ(s.instructions.size(), 3u);
    const auto& play = std::get<instr::Play>(s.instructions[0]);
    EXPECT_EQ(play.frame, FrameId{"d0"});
    EXPECT_EQ(play.waveform, make_parametric_waveform(WaveformTemplate::gaussian, 32,
                                                      {{"amp", 0.5}, {"phase", 0.0}, {"sigma_samples", 8.0}}));
    EXPECT_EQ(std::get<instr::Play>(s.instructions[1]).frame, FrameId{"m0"});
    const auto& capture = std::get<instr::Capture>(s.instructions[2]);
    EXPECT_EQ(capture.frame, FrameId{"a0"});
    EXPECT_EQ(capture.result, ResultId{0});
    EXPECT_FALSE(s.is_timed());
}

TEST(Lowering, MeasureCapturesOnReadoutWithoutAcquirePort) {
    auto dev = testsupport::one_qubit_device();
    dev.ports.pop_back();
    GateCircuit c{1, {gate::Measure{SiteId{0}, ResultId{0}}}};
    const auto s = lower(c, effective_calibrations(dev), dev);
    ASSERT_EQ(s.instructions.size(), 2u);
    EXPECT_EQ(std::get<instr::Play>(s.instructions[0]).frame, FrameId{"m0"});
    EXPECT_EQ(std::get<instr::Capture>(s.instructions[1]).frame, FrameId{"m0"});
}

TEST(Lowering, RzIsVirtual) {
    const auto dev = testsupport::one_qubit_device();
    GateCircuit c{1, {gate::RZ{SiteId{0}, pi / 2}}};
    const auto s = lower(c, effective_calibrations(dev), dev);
    ASSERT_EQ(s.instructions.size(), 1u);
    const auto& shift = std::get<instr::ShiftPhase>(s.instructions[0]);
    EXPECT_EQ(shift.frame, FrameId{"d0"});
    EXPECT_EQ(shift.delta_rad, -pi / 2);
}

TEST(Lowering, MissingCalibration) {
    const auto dev = two_site_device();
    CalibrationRegistry extra;
    extra.add(x_entry(std::vector<SiteId>{SiteId{0}}));
    GateCircuit c{2, {gate::X{SiteId{1}}}};
    EXPECT_EQ(code_of([&] { lower(c, effective_calibrations(dev, extra), dev); }), ErrorCode::MissingCalibration);
}

TEST(Lowering, UnboundRole) {
    auto dev = testsupport::one_qubit_device();
    dev.ports.erase(dev.ports.begin());  // no drive port
    CalibrationRegistry extra;
    extra.add(x_entry(std::nullopt));
    GateCircuit c{1, {gate::X{SiteId{0}}}};
    EXPECT_EQ(code_of([&] { lower(c, effective_calibrations(dev, extra), dev); }), ErrorCode::UnboundFrameRole);
}

TEST(Lowering, FramesComeFromDevicePorts) {
    const auto dev = two_site_device();
    const auto frames = device_frames(dev);
    EXPECT_EQ(frames.size(), dev.ports.size());
    EXPECT_EQ(frames.at(FrameId{"d1"}).frequency_hz, 5.1e9);
    EXPECT_EQ(frames.at(FrameId{"d1"}).port, PortId{"d1"});
}

TEST(Lowering, ParameterSubstitutionAndNegation) {
    const auto dev = testsupport::one_qubit_device();
    const auto entries = parse_calibration_entries(R"([
      {"gate": "rz", "sites": [0], "params": ["theta"],
       "body": [{"op": "shift_phase", "frame_role": "drive", "delta_rad": "-${theta}"},
                {"op": "delay", "frame_role": "drive", "duration_samples": 8}]}
    ])");
    CalibrationRegistry extra;
    for (const auto& e : entries) extra.add(e);
    GateCircuit c{1, {gate::RZ{SiteId{0}, 0.75}}};
    const auto s = lower(c, effective_calibrations(dev, extra), dev);
    ASSERT_EQ(s.instructions.size(), 2u);
    EXPECT_EQ(std::get<instr::ShiftPhase>(s.instructions[0]).delta_rad, -0.75);
    EXPECT_EQ(std::get<instr::Delay>(s.instructions[1]).duration_samples, 8);
}

TEST(Lowering, ShippedCalibrationFileParses) {
    const auto reg = parse_calibrations_json(read_file(std::string(PULSESTACK_DATA_DIR) + "/calibrations/x_gaussian.json"));
    EXPECT_NE(reg.lookup_wildcard("x"), nullptr);
    EXPECT_NE(reg.lookup_wildcard("sx"), nullptr);
    EXPECT_NE(reg.lookup_wildcard("measure"), nullptr);
}

TEST(Circuit, JsonForms) {
    const auto bare = parse_circuit_json(R"([{"gate":"x","site":0},{"gate":"rz","site":1,"theta":1.5708},
                                             {"gate":"measure","site":0,"result":0}])");
    EXPECT_EQ(bare.num_sites, 2u);
    ASSERT_EQ(bare.gates.size(), 3u);
    EXPECT_EQ(std::get<gate::RZ>(bare.gates[1]).theta_rad, 1.5708);
    const auto wrapped = parse_circuit_json(R"({"num_sites": 3, "gates": [{"gate":"sx","site":2}]})");
    EXPECT_EQ(wrapped.num_sites, 3u);
}

TEST(Circuit, Validation) {
    EXPECT_EQ(code_of([] { validate_circuit(GateCircuit{1, {gate::X{SiteId{1}}}}); }), ErrorCode::InvalidCircuit);
    EXPECT_EQ(code_of([] {
                  validate_circuit(GateCircuit{1, {gate::Measure{SiteId{0}, ResultId{0}},
                                                   gate::Measure{SiteId{0}, ResultId{0}}}});
              }),
              ErrorCode::InvalidCircuit);
    EXPECT_EQ(code_of([] { validate_circuit(GateCircuit{1, {gate::RZ{SiteId{0}, INFINITY}}}); }),
              ErrorCode::InvalidCircuit);
}

namespace {

GateCircuit random_circuit(testsupport::Rng& rng, std::uint32_t sites, std::uint32_t& next_result) {
    GateCircuit c{sites, {}};
    const auto n = testsupport::uniform_int(rng, 0, 12);
    for (std::int64_t i = 0; i < n; ++i) {
        const SiteId site{static_cast<std::uint32_t>(testsupport::uniform_int(rng, 0, sites - 1))};
        switch (testsupport::uniform_int(rng, 0, 3)) {
            case 0: c.gates.emplace_back(gate::X{site}); break;
            case 1: c.gates.emplace_back(gate::SX{site}); break;
            case 2: c.gates.emplace_back(gate::RZ{site, testsupport::uniform(rng, -10.0, 10.0)}); break;
            default: c.gates.emplace_back(gate::Measure{site, ResultId{next_result++}}); break;
        }
    }
    return c;
}

CalibrationRegistry shipped_registry(const DeviceDescriptor& dev) {
    auto extra = parse_calibrations_json(read_file(std::string(PULSESTACK_DATA_DIR) + "/calibrations/x_gaussian.json"));
    // Use the built-in play+capture measurement rather than the file's override.
    CalibrationRegistry without_measure;
    for (const auto& e : extra.entries()) {
        if (e.gate != "measure") without_measure.add(e);
    }
    return effective_calibrations(dev, without_measure);
}

}  // namespace

TEST(LoweringProperty, Compositional) {
    const auto dev = two_site_device();
    const auto reg = shipped_registry(dev);
    testsupport::Rng rng(21);
    for (int k = 0; k < 200; ++k) {
        std::uint32_t next_result = 0;
        const auto c1 = random_circuit(rng, 2, next_result);
        const auto c2 = random_circuit(rng, 2, next_result);
        GateCircuit both = c1;
        both.gates.insert(both.gates.end(), c2.gates.begin(), c2.gates.end());
        const auto s1 = lower(c1, reg, dev);
        const auto s2 = lower(c2, reg, dev);
        const auto s = lower(both, reg, dev);
        auto joined = s1.instructions;
        joined.insert(joined.end(), s2.instructions.begin(), s2.instructions.end());
        EXPECT_EQ(s.instructions, joined);
        EXPECT_EQ(s.frames, s1.frames);
    }
}

TEST(LoweringProperty, EveryFrameUsedIsDeclared) {
    const auto dev = two_site_device();
    const auto reg = shipped_registry(dev);
    testsupport::Rng rng(22);
    for (int k = 0; k < 200; ++k) {
        std::uint32_t next_result = 0;
        const auto s = lower(random_circuit(rng, 2, next_result), reg, dev);
        for (const auto& ins : s.instructions) {
            for (const auto& f : frames_of(ins)) EXPECT_TRUE(s.frames.contains(f)) << f.value();
        }
        EXPECT_NO_THROW(validate_schedule(s));
    }
}

TEST(LoweringProperty, RzDeltaIsExactNegation) {
    const auto dev = testsupport::one_qubit_device();
    const auto reg = effective_calibrations(dev);
    testsupport::Rng rng(23);
    for (int k = 0; k < 500; ++k) {
        const double theta = testsupport::uniform(rng, -1e3, 1e3);
        const auto s = lower(GateCircuit{1, {gate::RZ{SiteId{0}, theta}}}, reg, dev);
        EXPECT_EQ(std::get<instr::ShiftPhase>(s.instructions.at(0)).delta_rad, -theta);
    }
}
