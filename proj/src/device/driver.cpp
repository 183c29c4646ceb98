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
#include <atomic>
#include <charconv>
#include <cstdlib>

#include "pulsestack/driver.hpp"
#include "pulsestack/lowering.hpp"
#include "pulsestack/passes.hpp"
#include "pulsestack/pqir.hpp"

namespace pulsestack::qdmi {

namespace {

std::atomic<std::uint64_t> next_driver_id{1};

constexpr PropertyKey kAllKeys[] = {
    PropertyKey::name,
    PropertyKey::num_sites,
    PropertyKey::pulse_support,
    PropertyKey::supported_formats,
    PropertyKey::t1_s,
    PropertyKey::t2_s,
    PropertyKey::drive_port,
    PropertyKey::readout_port,
    PropertyKey::kind,
    PropertyKey::sample_period_s,
    PropertyKey::granularity_samples,
    PropertyKey::min_duration_samples,
    PropertyKey::max_amplitude,
    PropertyKey::frequency_range_hz,
    PropertyKey::has_default_calibration,
    PropertyKey::duration_samples,
};

std::string real_text(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(std::begin(buf), std::end(buf), v);
    return std::string(buf, end);
}

[[noreturn]] void stale(std::string_view what) { fail(ErrorCode::StaleHandle, std::string(what) + " handle is not valid"); }

// Makespan of one calibration body instantiated on the first sites it fits.
std::optional<std::int64_t> calibration_duration(const CalibrationEntry& entry, const DeviceDescriptor& device) {
    std::vector<SiteId> sites;
    if (entry.sites) {
        sites = *entry.sites;
    } else {
        std::uint32_t arity = 1;
        for (const auto& op : entry.body) {
            for (const auto& t : op.targets) arity = std::max(arity, t.site_index + 1);
        }
        if (arity > device.num_sites) return std::nullopt;
        for (std::uint32_t k = 0; k < arity; ++k) sites.emplace_back(k);
    }
    std::map<std::string, double, std::less<>> parameters;
    for (const auto& p : entry.params) parameters.emplace(p, 0.0);
    try {
        Schedule s;
        s.frames = device_frames(device);
        s.instructions = instantiate_calibration(entry, sites, parameters, ResultId{0}, device);
        s = passes::resolve_timing(s);
        std::int64_t end = 0;
        for (std::size_t i = 0; i < s.instructions.size(); ++i) {
            end = std::max(end, (*s.timing)[i] + instruction_duration(s.instructions[i]));
        }
        return end;
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

std::string_view to_string(JobStatus status) {
    switch (status) {
        case JobStatus::queued: return "queued";
        case JobStatus::running: return "running";
        case JobStatus::done: return "done";
        case JobStatus::failed: return "failed";
        case JobStatus::cancelled: return "cancelled";
    }
    return "unknown";
}

bool is_terminal(JobStatus status) {
    return status == JobStatus::done || status == JobStatus::failed || status == JobStatus::cancelled;
}

bool is_valid_transition(JobStatus from, JobStatus to) {
    switch (from) {
        case JobStatus::queued: return to == JobStatus::running || to == JobStatus::cancelled;
        case JobStatus::running: return to == JobStatus::done || to == JobStatus::failed;
        default: return false;
    }
}

std::string_view to_string(PropertyKey key) {
    switch (key) {
        case PropertyKey::name: return "name";
        case PropertyKey::num_sites: return "num_sites";
        case PropertyKey::pulse_support: return "pulse_support";
        case PropertyKey::supported_formats: return "supported_formats";
        case PropertyKey::t1_s: return "t1_s";
        case PropertyKey::t2_s: return "t2_s";
        case PropertyKey::drive_port: return "drive_port";
        case PropertyKey::readout_port: return "readout_port";
        case PropertyKey::kind: return "kind";
        case PropertyKey::sample_period_s: return "sample_period_s";
        case PropertyKey::granularity_samples: return "granularity_samples";
        case PropertyKey::min_duration_samples: return "min_duration_samples";
        case PropertyKey::max_amplitude: return "max_amplitude";
        case PropertyKey::frequency_range_hz: return "frequency_range_hz";
        case PropertyKey::has_default_calibration: return "has_default_calibration";
        case PropertyKey::duration_samples: return "duration_samples";
    }
    return "unknown";
}

std::string_view to_string(ScopeKind scope) {
    switch (scope) {
        case ScopeKind::device: return "device";
        case ScopeKind::site: return "site";
        case ScopeKind::port: return "port";
        case ScopeKind::operation: return "operation";
    }
    return "unknown";
}

PropertyKey parse_property_key(std::string_view name) {
    for (auto key : kAllKeys) {
        if (to_string(key) == name) return key;
    }
    fail(ErrorCode::NotSupported, "unknown property key '" + std::string(name) + "'");
}

ScopeKind scope_of(PropertyKey key) {
    switch (key) {
        case PropertyKey::name:
        case PropertyKey::num_sites:
        case PropertyKey::pulse_support:
        case PropertyKey::supported_formats: return ScopeKind::device;
        case PropertyKey::t1_s:
        case PropertyKey::t2_s:
        case PropertyKey::drive_port:
        case PropertyKey::readout_port: return ScopeKind::site;
        case PropertyKey::has_default_calibration:
        case PropertyKey::duration_samples: return ScopeKind::operation;
        default: return ScopeKind::port;
    }
}

std::span<const PropertyKey> all_property_keys() { return kAllKeys; }

std::string format_value(const PropertyValue& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, double>) {
                return real_text(v);
            } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
                std::string out;
                for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
                return out;
            } else {
                return "[" + real_text(v.first) + ", " + real_text(v.second) + "]";
            }
        },
        value);
}

DiagnosticsError::DiagnosticsError(ErrorCode code, const std::string& message, Diagnostics diagnostics)
    : Error(code, message), diagnostics_(std::move(diagnostics)) {}

struct Driver::Job {
    std::uint64_t session = 0;
    std::uint64_t device = 0;
    Schedule schedule;
    std::size_t num_results = 0;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    JobInfo info;
    std::optional<sim::Histogram> result;
};

struct Driver::DeviceSlot {
    DeviceDescriptor descriptor;
    std::deque<std::uint64_t> queue;
    std::condition_variable wake;
    std::thread thread;
};

Driver::Driver() : id_(next_driver_id++) {}

Driver::Driver(std::vector<DeviceDescriptor> devices) : Driver() {
    for (auto& d : devices) register_device(std::move(d));
}

Driver::~Driver() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
        for (auto& d : devices_) d->wake.notify_all();
        job_changed_.notify_all();
    }
    for (auto& d : devices_) {
        if (d->thread.joinable()) d->thread.join();
    }
}

std::unique_ptr<Driver> Driver::from_env() {
    auto driver = std::make_unique<Driver>();
    const char* env = std::getenv("PULSESTACK_DEVICES");
    if (env == nullptr) return driver;
    std::string_view paths(env);
    while (!paths.empty()) {
        const auto sep = paths.find(':');
        const auto path = paths.substr(0, sep);
        if (!path.empty()) driver->register_device(load_device_file(std::string(path)));
        if (sep == std::string_view::npos) break;
        paths.remove_prefix(sep + 1);
    }
    return driver;
}

DeviceHandle Driver::register_device(DeviceDescriptor device) {
    validate_device(device);
    std::lock_guard lock(mutex_);
    auto slot = std::make_unique<DeviceSlot>();
    slot->descriptor = std::move(device);
    devices_.push_back(std::move(slot));
    const std::uint64_t id = devices_.size();
    devices_.back()->thread = std::thread([this, id] { worker(id); });
    return DeviceHandle{id_, id};
}

Driver::DeviceSlot& Driver::slot(DeviceHandle device) {
    if (device.driver != id_ || device.id == 0 || device.id > devices_.size()) stale("device");
    return *devices_[device.id - 1];
}

const Driver::DeviceSlot& Driver::slot(DeviceHandle device) const {
    if (device.driver != id_ || device.id == 0 || device.id > devices_.size()) stale("device");
    return *devices_[device.id - 1];
}

void Driver::check_session(SessionHandle session) const {
    if (session.driver != id_ ||
        std::find(open_sessions_.begin(), open_sessions_.end(), session.id) == open_sessions_.end()) {
        stale("session");
    }
}

Driver::Job& Driver::job(JobHandle handle) {
    auto it = handle.driver == id_ ? jobs_.find(handle.id) : jobs_.end();
    if (it == jobs_.end()) stale("job");
    return *it->second;
}

const Driver::Job& Driver::job(JobHandle handle) const {
    auto it = handle.driver == id_ ? jobs_.find(handle.id) : jobs_.end();
    if (it == jobs_.end()) stale("job");
    return *it->second;
}

SessionHandle Driver::open() {
    std::lock_guard lock(mutex_);
    const auto id = next_session_++;
    open_sessions_.push_back(id);
    return SessionHandle{id_, id};
}

void Driver::close(SessionHandle session) {
    std::lock_guard lock(mutex_);
    check_session(session);
    open_sessions_.erase(std::find(open_sessions_.begin(), open_sessions_.end(), session.id));
    for (auto& [id, j] : jobs_) {
        if (j->session == session.id && j->info.status == JobStatus::queued) set_status(*j, JobStatus::cancelled);
    }
    job_changed_.notify_all();
}

std::vector<std::pair<DeviceHandle, std::string>> Driver::list_devices(SessionHandle session) const {
    std::lock_guard lock(mutex_);
    check_session(session);
    std::vector<std::pair<DeviceHandle, std::string>> out;
    for (std::size_t i = 0; i < devices_.size(); ++i) {
        out.emplace_back(DeviceHandle{id_, i + 1}, devices_[i]->descriptor.name);
    }
    return out;
}

PropertyValue Driver::query(DeviceHandle device, const QueryScope& scope, PropertyKey key) const {
    std::unique_lock lock(mutex_);
    const auto& d = slot(device).descriptor;
    if (scope_of(key) != scope.kind) {
        fail(ErrorCode::InvalidScope, "key '" + std::string(to_string(key)) + "' is not a " +
                                          std::string(to_string(scope.kind)) + " property");
    }
    auto missing = [&]() -> PropertyValue {
        fail(ErrorCode::NotSupported, "device '" + d.name + "' reports no " + std::string(to_string(key)));
    };

    switch (scope.kind) {
        case ScopeKind::device:
            switch (key) {
                case PropertyKey::name: return d.name;
                case PropertyKey::num_sites: return static_cast<std::int64_t>(d.num_sites);
                case PropertyKey::pulse_support: return std::string(to_string(d.pulse_support));
                default: return d.supported_formats;
            }
        case ScopeKind::site: {
            if (scope.site.value() >= d.num_sites) {
                fail(ErrorCode::InvalidScope, "device '" + d.name + "' has no site " +
                                                  std::to_string(scope.site.value()));
            }
            const auto& props = scope.site.value() < d.sites.size() ? d.sites[scope.site.value()] : SiteProperties{};
            switch (key) {
                case PropertyKey::t1_s: return props.t1_s ? PropertyValue(*props.t1_s) : missing();
                case PropertyKey::t2_s: return props.t2_s ? PropertyValue(*props.t2_s) : missing();
                default: {
                    const auto kind = key == PropertyKey::drive_port ? PortKind::drive : PortKind::readout;
                    const Port* p = d.site_port(scope.site, kind);
                    return p != nullptr ? PropertyValue(p->id.value()) : missing();
                }
            }
        }
        case ScopeKind::port: {
            if (d.pulse_support != PulseSupport::port_level) {
                fail(ErrorCode::InvalidScope, "device '" + d.name + "' does not expose ports");
            }
            const Port* p = d.find_port(scope.port);
            if (p == nullptr) {
                fail(ErrorCode::InvalidScope, "device '" + d.name + "' has no port '" + scope.port.value() + "'");
            }
            const auto& c = p->constraints;
            switch (key) {
                case PropertyKey::kind: return std::string(to_string(p->kind));
                case PropertyKey::sample_period_s: return c.sample_period_s;
                case PropertyKey::granularity_samples: return c.granularity_samples;
                case PropertyKey::min_duration_samples: return c.min_duration_samples;
                case PropertyKey::max_amplitude: return c.max_amplitude;
                default: return c.frequency_range_hz;
            }
        }
        case ScopeKind::operation: {
            if (d.pulse_support == PulseSupport::none) {
                if (key == PropertyKey::has_default_calibration) return false;
                return missing();
            }
            const auto registry = effective_calibrations(d);
            const CalibrationEntry* entry = registry.lookup_wildcard(scope.operation);
            if (entry == nullptr) {
                for (const auto& e : registry.entries()) {
                    if (e.gate == scope.operation) {
                        entry = &e;
                        break;
                    }
                }
            }
            if (key == PropertyKey::has_default_calibration) return entry != nullptr;
            if (entry == nullptr) return missing();
            const auto duration = calibration_duration(*entry, d);
            return duration ? PropertyValue(*duration) : missing();
        }
    }
    return missing();
}

CalibrationEntry Driver::get_default_calibration(DeviceHandle device, std::string_view gate,
                                                 std::span<const SiteId> sites) const {
    std::lock_guard lock(mutex_);
    const auto& d = slot(device).descriptor;
    if (d.pulse_support == PulseSupport::none) {
        fail(ErrorCode::NotSupported, "device '" + d.name + "' has no pulse support");
    }
    const auto registry = effective_calibrations(d);
    const CalibrationEntry* entry = registry.lookup(gate, sites);
    if (entry == nullptr) {
        std::string where;
        for (auto s : sites) where += (where.empty() ? "" : ",") + std::to_string(s.value());
        fail(ErrorCode::MissingCalibration, "no calibration for " + std::string(gate) + " on sites [" + where + "]");
    }
    return *entry;
}

void Driver::set_default_calibration(DeviceHandle device, CalibrationEntry entry) {
    std::lock_guard lock(mutex_);
    auto& d = slot(device).descriptor;
    if (d.pulse_support == PulseSupport::none) {
        fail(ErrorCode::NotSupported, "device '" + d.name + "' has no pulse support");
    }
    d.default_calibrations.add(std::move(entry));
}

JobHandle Driver::submit_job(SessionHandle session, DeviceHandle device, std::string_view format,
                             std::string_view payload, std::uint64_t shots, std::uint64_t seed) {
    DeviceDescriptor d;
    {
        std::lock_guard lock(mutex_);
        check_session(session);
        d = slot(device).descriptor;
    }
    if (format != kPqirPulseFormat ||
        std::find(d.supported_formats.begin(), d.supported_formats.end(), format) == d.supported_formats.end()) {
        fail(ErrorCode::FormatUnsupported, "device '" + d.name + "' does not accept format '" + std::string(format) + "'");
    }

    auto reject = [](Diagnostics diagnostics) {
        std::string message = "payload rejected";
        for (const auto& diag : diagnostics) message += "\n  " + pulsestack::format(diag);
        throw DiagnosticsError(ErrorCode::PayloadInvalid, message, std::move(diagnostics));
    };
    pqir::ParseResult parsed;
    try {
        parsed = pqir::parse(payload);
    } catch (const Error& e) {
        reject({Diagnostic{Severity::error, std::nullopt, std::string(to_string(e.code())) + ": " + e.what()}});
    }
    auto diagnostics = pqir::validate_profile(parsed.module);
    for (const auto& [id, frame] : parsed.module.schedule.frames) {
        if (d.find_port(frame.port) == nullptr) {
            diagnostics.push_back(Diagnostic{Severity::error, std::nullopt,
                                             "frame '" + id.value() + "' uses port '" + frame.port.value() +
                                                 "', which device '" + d.name + "' does not have"});
        }
    }
    if (shots == 0) diagnostics.push_back(Diagnostic{Severity::error, std::nullopt, "shots must be positive"});
    if (has_errors(diagnostics)) reject(std::move(diagnostics));

    std::lock_guard lock(mutex_);
    check_session(session);
    auto j = std::make_unique<Job>();
    j->session = session.id;
    j->device = device.id;
    j->schedule = std::move(parsed.module.schedule);
    j->num_results = static_cast<std::size_t>(parsed.module.attributes.required_num_results);
    j->shots = shots;
    j->seed = seed;
    j->info.device = device;
    j->info.history.push_back(JobStatus::queued);
    const auto id = next_job_++;
    j->info.submit_index = id;
    jobs_.emplace(id, std::move(j));
    auto& s = slot(device);
    s.queue.push_back(id);
    s.wake.notify_one();
    return JobHandle{id_, id};
}

void Driver::set_status(Job& j, JobStatus status) {
    j.info.status = status;
    j.info.history.push_back(status);
    if (is_terminal(status) && status != JobStatus::cancelled) j.info.completion_index = completions_++;
}

void Driver::worker(std::uint64_t device_id) {
    std::unique_lock lock(mutex_);
    auto& s = *devices_[device_id - 1];
    while (true) {
        s.wake.wait(lock, [&] { return stopping_ || !s.queue.empty(); });
        if (stopping_) return;
        const auto id = s.queue.front();
        s.queue.pop_front();
        auto& j = *jobs_.at(id);
        if (j.info.status != JobStatus::queued) continue;
        set_status(j, JobStatus::running);
        job_changed_.notify_all();
        const auto device = s.descriptor;
        lock.unlock();

        std::optional<sim::Histogram> histogram;
        std::string error;
        try {
            if (!device.simulation) fail(ErrorCode::NotSupported, "device '" + device.name + "' cannot execute jobs");
            auto legal = passes::legalize(j.schedule, device, passes::LegalizeMode::strict);
            if (has_errors(legal.diagnostics)) {
                std::string message = "legalization failed";
                for (const auto& diag : legal.diagnostics) message += "\n  " + pulsestack::format(diag);
                fail(ErrorCode::JobFailed, message);
            }
            const auto timed = passes::resolve_timing(legal.schedule);
            histogram = sim::execute(timed, device, *device.simulation, j.shots, j.seed, j.num_results);
        } catch (const std::exception& e) {
            error = e.what();
        }

        lock.lock();
        if (histogram) {
            j.result = std::move(histogram);
            set_status(j, JobStatus::done);
        } else {
            j.info.error = error;
            set_status(j, JobStatus::failed);
        }
        job_changed_.notify_all();
    }
}

JobStatus Driver::job_status(JobHandle handle) const {
    std::lock_guard lock(mutex_);
    return job(handle).info.status;
}

JobInfo Driver::job_info(JobHandle handle) const {
    std::lock_guard lock(mutex_);
    return job(handle).info;
}

sim::Histogram Driver::job_result(JobHandle handle) const {
    std::unique_lock lock(mutex_);
    const auto& j = job(handle);
    job_changed_.wait(lock, [&] { return is_terminal(j.info.status) || stopping_; });
    switch (j.info.status) {
        case JobStatus::done: return *j.result;
        case JobStatus::cancelled: fail(ErrorCode::JobFailed, "job was cancelled");
        case JobStatus::failed: fail(ErrorCode::JobFailed, j.info.error.value_or("job failed"));
        default: fail(ErrorCode::JobFailed, "driver shut down before the job finished");
    }
}

void Driver::job_cancel(JobHandle handle) {
    std::lock_guard lock(mutex_);
    auto& j = job(handle);
    if (j.info.status != JobStatus::queued) return;
    set_status(j, JobStatus::cancelled);
    job_changed_.notify_all();
}

DeviceDescriptor Driver::descriptor(DeviceHandle device) const {
    std::lock_guard lock(mutex_);
    return slot(device).descriptor;
}

}  // namespace pulsestack::qdmi
