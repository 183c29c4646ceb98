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

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "pulsestack/driver.hpp"
#include "pulsestack/error.hpp"
#include "pulsestack/lowering.hpp"
#include "pulsestack/passes.hpp"
#include "pulsestack/pqir.hpp"
#include "support/oracles.hpp"

using namespace pulsestack;
using namespace pulsestack::qdmi;

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

DeviceDescriptor sim_device() { return load_device_file(std::string(PULSESTACK_DATA_DIR) + "/devices/sim_1q.json"); }

DeviceDescriptor sim2_device() { return load_device_file(std::string(PULSESTACK_DATA_DIR) + "/devices/sim_2q.json"); }

/// X on site 0 followed by measurement, compiled for the device.
std::string x_measure_payload(const DeviceDescriptor& dev) {
    GateCircuit c{1, {gate::X{SiteId{0}}, gate::Measure{SiteId{0}, ResultId{0}}}};
    std::ifstream in(std::string(PULSESTACK_DATA_DIR) + "/calibrations/x_gaussian.json");
    std::stringstream text;
    text << in.rdbuf();
    const auto s = lower(c, effective_calibrations(dev, parse_calibrations_json(text.str())), dev);
    const auto r = passes::run_pipeline(s, passes::parse_pipeline("legalize,verify"), dev);
    EXPECT_FALSE(has_errors(r.diagnostics));
    return pqir::emit(pqir::build_module(r.schedule));
}

/// A long constant drive so the worker stays busy for a while.
std::string slow_payload() {
    Schedule s;
    s.frames.emplace(FrameId{"d0"}, make_frame(FrameId{"d0"}, PortId{"d0"}, 5.0e9));
    for (int k = 0; k < 200; ++k) {
        s.instructions.emplace_back(instr::Play{
            FrameId{"d0"}, make_parametric_waveform(WaveformTemplate::constant, 4096, {{"amp", 0.01}, {"phase", 0.0}})});
    }
    return pqir::emit(pqir::build_module(s));
}

}  // namespace

TEST(Session, ListsRegisteredDevices) {
    Driver driver({sim_device(), sim2_device()});
    const auto a = driver.open();
    const auto b = driver.open();
    const auto list = driver.list_devices(a);
    ASSERT_EQ(list.size(), 2u);
    EXPECT_EQ(list[0].second, "sim");
    EXPECT_EQ(list[1].second, "sim2");
    EXPECT_EQ(driver.list_devices(b), list);
}

TEST(Session, EmptyDriver) {
    Driver driver;
    EXPECT_TRUE(driver.list_devices(driver.open()).empty());
}

TEST(Session, CloseInvalidates) {
    Driver driver({sim_device()});
    const auto s = driver.open();
    driver.close(s);
    EXPECT_EQ(code_of([&] { driver.list_devices(s); }), ErrorCode::StaleHandle);
    EXPECT_EQ(code_of([&] { driver.close(s); }), ErrorCode::StaleHandle);
}

TEST(Session, HandlesFromAnotherDriverAreStale) {
    Driver one({sim_device()});
    Driver two({sim_device()});
    const auto dev = one.list_devices(one.open()).at(0).first;
    EXPECT_EQ(code_of([&] { two.query(dev, QueryScope::device(), PropertyKey::name); }), ErrorCode::StaleHandle);
    EXPECT_EQ(code_of([&] { two.list_devices(one.open()); }), ErrorCode::StaleHandle);
}

TEST(Session, RegistrationValidates) {
    auto d = sim_device();
    d.ports[0].constraints.min_duration_samples = 12;  // not a multiple of 8
    Driver driver;
    EXPECT_EQ(code_of([&] { driver.register_device(d); }), ErrorCode::InvalidDevice);
}

TEST(Session, DevicesFromEnvironment) {
    const auto path = std::string(PULSESTACK_DATA_DIR) + "/devices/sim_1q.json:" + PULSESTACK_DATA_DIR + "/devices/sim_2q.json";
    ::setenv("PULSESTACK_DEVICES", path.c_str(), 1);
    auto driver = Driver::from_env();
    ::unsetenv("PULSESTACK_DEVICES");
    EXPECT_EQ(driver->list_devices(driver->open()).size(), 2u);
}

TEST(Query, DeviceScope) {
    Driver driver({sim_device()});
    const auto dev = driver.list_devices(driver.open()).at(0).first;
    EXPECT_EQ(std::get<std::string>(driver.query(dev, QueryScope::device(), PropertyKey::pulse_support)), "port_level");
    EXPECT_EQ(std::get<std::int64_t>(driver.query(dev, QueryScope::device(), PropertyKey::num_sites)), 1);
    EXPECT_EQ(std::get<std::vector<std::string>>(driver.query(dev, QueryScope::device(), PropertyKey::supported_formats)),
              std::vector<std::string>{"pqir_pulse"});
}

TEST(Query, PortScope) {
    Driver driver({sim_device()});
    const auto dev = driver.list_devices(driver.open()).at(0).first;
    const auto port = QueryScope::of_port(PortId{"d0"});
    EXPECT_EQ(std::get<std::int64_t>(driver.query(dev, port, PropertyKey::granularity_samples)), 8);
    EXPECT_EQ(std::get<std::string>(driver.query(dev, port, PropertyKey::kind)), "drive");
    EXPECT_EQ((std::get<std::pair<double, double>>(driver.query(dev, port, PropertyKey::frequency_range_hz))),
              (std::pair<double, double>{4.5e9, 5.5e9}));
    EXPECT_EQ(code_of([&] { driver.query(dev, QueryScope::of_port(PortId{"zz"}), PropertyKey::kind); }),
              ErrorCode::InvalidScope);
}

TEST(Query, SiteScope) {
    Driver driver({sim2_device()});
    const auto dev = driver.list_devices(driver.open()).at(0).first;
    EXPECT_EQ(std::get<std::string>(driver.query(dev, QueryScope::of_site(SiteId{1}), PropertyKey::drive_port)), "d1");
    EXPECT_EQ(code_of([&] { driver.query(dev, QueryScope::of_site(SiteId{99}), PropertyKey::t1_s); }),
              ErrorCode::InvalidScope);
}

TEST(Query, WrongScopeForKey) {
    Driver driver({sim_device()});
    const auto dev = driver.list_devices(driver.open()).at(0).first;
    EXPECT_EQ(code_of([&] { driver.query(dev, QueryScope::device(), PropertyKey::t1_s); }), ErrorCode::InvalidScope);
}

TEST(Query, PortQueryOnSiteLevelDevice) {
    auto d = sim_device();
    d.pulse_support = PulseSupport::site_level;
    Driver driver({d});
    const auto dev = driver.list_devices(driver.open()).at(0).first;
    EXPECT_EQ(code_of([&] { driver.query(dev, QueryScope::of_port(PortId{"d0"}), PropertyKey::kind); }),
              ErrorCode::InvalidScope);
}

TEST(Query, MissingValueIsNotSupported) {
    auto d = sim_device();
    d.sites.clear();
    Driver driver({d});
    const auto dev = driver.list_devices(driver.open()).at(0).first;
    EXPECT_EQ(code_of([&] { driver.query(dev, QueryScope::of_site(SiteId{0}), PropertyKey::t1_s); }),
              ErrorCode::NotSupported);
    EXPECT_EQ(code_of([] { parse_property_key("colour"); }), ErrorCode::NotSupported);
}

TEST(Query, OperationScope) {
    Driver driver({sim_device()});
    const auto dev = driver.list_devices(driver.open()).at(0).first;
    EXPECT_TRUE(std::get<bool>(driver.query(dev, QueryScope::of_operation("x"), PropertyKey::has_default_calibration)));
    EXPECT_FALSE(std::get<bool>(driver.query(dev, QueryScope::of_operation("sx"), PropertyKey::has_default_calibration)));
    EXPECT_EQ(std::get<std::int64_t>(driver.query(dev, QueryScope::of_operation("x"), PropertyKey::duration_samples)), 96);
}

TEST(Query, KeysRoundTripByName) {
    for (auto key : all_property_keys()) EXPECT_EQ(parse_property_key(to_string(key)), key);
    EXPECT_EQ(all_property_keys().size(), 16u);
}

TEST(QueryProperty, ReadOnlyUnderAnyInterleaving) {
    Driver driver({sim2_device()});
    const auto dev = driver.list_devices(driver.open()).at(0).first;
    std::vector<std::pair<QueryScope, PropertyKey>> calls;
    for (auto key : all_property_keys()) {
        switch (scope_of(key)) {
            case ScopeKind::device: calls.emplace_back(QueryScope::device(), key); break;
            case ScopeKind::site: calls.emplace_back(QueryScope::of_site(SiteId{1}), key); break;
            case ScopeKind::port: calls.emplace_back(QueryScope::of_port(PortId{"d1"}), key); break;
            case ScopeKind::operation: calls.emplace_back(QueryScope::of_operation("x"), key); break;
        }
    }
    auto snapshot = [&] {
        std::vector<std::string> out;
        for (const auto& [scope, key] : calls) {
            try {
                out.push_back(format_value(driver.query(dev, scope, key)));
            } catch (const Error& e) {
                out.push_back(std::string(to_string(e.code())));
            }
        }
        return out;
    };
    const auto first = snapshot();
    testsupport::Rng rng(51);
    for (int k = 0; k < 500; ++k) {
        const auto& [scope, key] = calls[static_cast<std::size_t>(testsupport::uniform_int(rng, 0, calls.size() - 1))];
        try {
            driver.query(dev, scope, key);
        } catch (const Error&) {
        }
    }
    EXPECT_EQ(snapshot(), first);
}

TEST(Calibration, SetThenGet) {
    Driver driver({sim_device()});
    const auto dev = driver.list_devices(driver.open()).at(0).first;
    CalibrationEntry e;
    e.gate = "sx";
    e.sites = std::vector<SiteId>{SiteId{0}};
    CalibrationOp op;
    op.kind = CalibrationOp::Kind::delay;
    op.targets = {RoleRef{FrameRole::drive, 0}};
    op.value = 16.0;
    e.body.push_back(op);
    driver.set_default_calibration(dev, e);
    const std::vector<SiteId> s0{SiteId{0}};
    EXPECT_EQ(driver.get_default_calibration(dev, "sx", s0), e);
    EXPECT_EQ(std::get<std::int64_t>(driver.query(dev, QueryScope::of_operation("sx"), PropertyKey::duration_samples)), 16);
}

TEST(Calibration, MissingAndUnsupported) {
    auto plain = sim_device();
    plain.name = "gates_only";
    plain.pulse_support = PulseSupport::none;
    plain.default_calibrations = {};
    Driver driver({sim_device(), plain});
    const auto list = driver.list_devices(driver.open());
    const std::vector<SiteId> s0{SiteId{0}};
    EXPECT_EQ(code_of([&] { driver.get_default_calibration(list[0].first, "cz", s0); }), ErrorCode::MissingCalibration);
    EXPECT_EQ(code_of([&] { driver.get_default_calibration(list[1].first, "x", s0); }), ErrorCode::NotSupported);
    EXPECT_EQ(code_of([&] { driver.set_default_calibration(list[1].first, CalibrationEntry{"x", std::nullopt, {}, {}}); }),
              ErrorCode::NotSupported);
}

TEST(Jobs, PiPulseRunsToCompletion) {
    const auto dev_desc = sim_device();
    Driver driver({dev_desc});
    const auto session = driver.open();
    const auto dev = driver.list_devices(session).at(0).first;
    const auto job = driver.submit_job(session, dev, "pqir_pulse", x_measure_payload(dev_desc), 1000, 7);
    const auto h = driver.job_result(job);
    EXPECT_EQ(h.total(), 1000u);
    EXPECT_GE(h.counts.count("1") ? h.counts.at("1") : 0, 999u);
    EXPECT_EQ(driver.job_status(job), JobStatus::done);
    const auto info = driver.job_info(job);
    EXPECT_EQ(info.history, (std::vector<JobStatus>{JobStatus::queued, JobStatus::running, JobStatus::done}));
}

TEST(Jobs, RejectsBadPayloadsAndFormats) {
    const auto dev_desc = sim_device();
    Driver driver({dev_desc});
    const auto session = driver.open();
    const auto dev = driver.list_devices(session).at(0).first;
    auto payload = x_measure_payload(dev_desc);
    EXPECT_EQ(code_of([&] { driver.submit_job(session, dev, "openqasm3", payload, 10); }), ErrorCode::FormatUnsupported);

    const auto at = payload.find("\"qir_profiles\"=\"pulse\"");
    auto base_profile = payload;
    base_profile.replace(at, std::string("\"qir_profiles\"=\"pulse\"").size(), "\"qir_profiles\"=\"base\"");
    try {
        driver.submit_job(session, dev, "pqir_pulse", base_profile, 10);
        FAIL();
    } catch (const DiagnosticsError& e) {
        EXPECT_EQ(e.code(), ErrorCode::PayloadInvalid);
        EXPECT_TRUE(has_errors(e.diagnostics()));
    }
    EXPECT_EQ(code_of([&] { driver.submit_job(session, dev, "pqir_pulse", payload, 0); }), ErrorCode::PayloadInvalid);
}

TEST(Jobs, CancelQueuedAndRunning) {
    const auto dev_desc = sim_device();
    Driver driver({dev_desc});
    const auto session = driver.open();
    const auto dev = driver.list_devices(session).at(0).first;
    const auto slow = driver.submit_job(session, dev, "pqir_pulse", slow_payload(), 20'000'000, 1);
    const auto queued = driver.submit_job(session, dev, "pqir_pulse", x_measure_payload(dev_desc), 10, 1);
    driver.job_cancel(queued);
    EXPECT_EQ(driver.job_status(queued), JobStatus::cancelled);
    EXPECT_EQ(code_of([&] { driver.job_result(queued); }), ErrorCode::JobFailed);

    while (driver.job_status(slow) == JobStatus::queued) std::this_thread::yield();
    driver.job_cancel(slow);  // running: no effect
    EXPECT_EQ(driver.job_result(slow).total(), 20'000'000u);
    EXPECT_EQ(driver.job_status(slow), JobStatus::done);
}

TEST(Jobs, CloseCancelsQueuedJobs) {
    const auto dev_desc = sim_device();
    Driver driver({dev_desc});
    const auto keep = driver.open();
    const auto dev = driver.list_devices(keep).at(0).first;
    const auto slow = driver.submit_job(keep, dev, "pqir_pulse", slow_payload(), 20'000'000, 1);
    const auto doomed = driver.open();
    const auto job = driver.submit_job(doomed, dev, "pqir_pulse", x_measure_payload(dev_desc), 10, 1);
    driver.close(doomed);
    EXPECT_EQ(driver.job_status(job), JobStatus::cancelled);
    EXPECT_EQ(driver.job_result(slow).total(), 20'000'000u);
}

TEST(Jobs, ExecutionFailureIsReported) {
    // Legal to parse but breaks the device's amplitude limit.
    auto d = sim_device();
    d.ports[0].constraints.max_amplitude = 0.5;
    d.default_calibrations = {};
    Driver driver({d});
    const auto session = driver.open();
    const auto dev = driver.list_devices(session).at(0).first;
    Schedule s;
    s.frames.emplace(FrameId{"d0"}, make_frame(FrameId{"d0"}, PortId{"d0"}, 5.0e9));
    s.instructions.emplace_back(instr::Play{
        FrameId{"d0"}, make_parametric_waveform(WaveformTemplate::constant, 16, {{"amp", 0.9}, {"phase", 0.0}})});
    const auto job = driver.submit_job(session, dev, "pqir_pulse", pqir::emit(pqir::build_module(s)), 10);
    EXPECT_EQ(code_of([&] { driver.job_result(job); }), ErrorCode::JobFailed);
    const auto info = driver.job_info(job);
    EXPECT_EQ(info.status, JobStatus::failed);
    ASSERT_TRUE(info.error.has_value());
    EXPECT_NE(info.error->find("amplitude"), std::string::npos);
}

TEST(Jobs, StaleJobHandle) {
    Driver driver({sim_device()});
    EXPECT_EQ(code_of([&] { driver.job_status(JobHandle{0, 42}); }), ErrorCode::StaleHandle);
}

TEST(Jobs, TransitionRelation) {
    using S = JobStatus;
    EXPECT_TRUE(is_valid_transition(S::queued, S::running));
    EXPECT_TRUE(is_valid_transition(S::queued, S::cancelled));
    EXPECT_TRUE(is_valid_transition(S::running, S::done));
    EXPECT_TRUE(is_valid_transition(S::running, S::failed));
    EXPECT_FALSE(is_valid_transition(S::running, S::cancelled));
    EXPECT_FALSE(is_valid_transition(S::done, S::running));
    EXPECT_FALSE(is_valid_transition(S::queued, S::done));
}

TEST(JobsProperty, FifoPerDeviceUnderConcurrentSubmitters) {
    const auto one = sim_device();
    const auto two = sim2_device();
    Driver driver({one, two});
    const auto session = driver.open();
    const auto devices = driver.list_devices(session);
    const auto payload1 = x_measure_payload(one);
    const auto payload2 = x_measure_payload(two);

    std::mutex m;
    std::vector<JobHandle> jobs;
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            testsupport::Rng rng(100 + t);
            for (int k = 0; k < 25; ++k) {
                const bool first = testsupport::uniform_int(rng, 0, 1) == 0;
                const auto shots = static_cast<std::uint64_t>(testsupport::uniform_int(rng, 1, 500));
                const auto h = driver.submit_job(session, devices[first ? 0 : 1].first, "pqir_pulse",
                                                 first ? payload1 : payload2, shots, k);
                std::lock_guard lock(m);
                jobs.push_back(h);
            }
        });
    }
    for (auto& t : threads) t.join();
    std::map<std::uint64_t, std::vector<std::pair<std::uint64_t, std::uint64_t>>> per_device;
    for (const auto& j : jobs) {
        driver.job_result(j);
        const auto info = driver.job_info(j);
        ASSERT_TRUE(info.completion_index.has_value());
        per_device[info.device.id].emplace_back(info.submit_index, *info.completion_index);
    }
    for (auto& [dev, order] : per_device) {
        std::sort(order.begin(), order.end());
        for (std::size_t i = 1; i < order.size(); ++i) EXPECT_LT(order[i - 1].second, order[i].second);
    }
}
