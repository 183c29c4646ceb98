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

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "pulsestack/calibration.hpp"
#include "pulsestack/device.hpp"
#include "pulsestack/diagnostics.hpp"
#include "pulsestack/error.hpp"
#include "pulsestack/simulator.hpp"

// In-process device driver. Clients never touch devices directly: they open a
// session, list the registered devices, query their properties and submit
// jobs, all through opaque handles issued by one Driver instance.

namespace pulsestack::qdmi {

/// Handles carry the id of the issuing driver, so a handle from another
/// driver instance is rejected as stale instead of aliasing a local object.
template <typename Tag>
struct Handle {
    std::uint64_t driver = 0;
    std::uint64_t id = 0;

    auto operator<=>(const Handle&) const = default;
};

struct SessionTag;
struct DeviceTag;
struct JobTag;
using SessionHandle = Handle<SessionTag>;
using DeviceHandle = Handle<DeviceTag>;
using JobHandle = Handle<JobTag>;

enum class JobStatus { queued, running, done, failed, cancelled };
std::string_view to_string(JobStatus status);
bool is_terminal(JobStatus status);
/// queued->running, queued->cancelled, running->done, running->failed.
bool is_valid_transition(JobStatus from, JobStatus to);

enum class PropertyKey {
    // device
    name,
    num_sites,
    pulse_support,
    supported_formats,
    // site
    t1_s,
    t2_s,
    drive_port,
    readout_port,
    // port
    kind,
    sample_period_s,
    granularity_samples,
    min_duration_samples,
    max_amplitude,
    frequency_range_hz,
    // operation
    has_default_calibration,
    duration_samples,
};

enum class ScopeKind { device, site, port, operation };

std::string_view to_string(PropertyKey key);
std::string_view to_string(ScopeKind scope);
/// Throws NotSupported for names outside the closed key set.
PropertyKey parse_property_key(std::string_view name);
ScopeKind scope_of(PropertyKey key);
/// Every key, in declaration order.
std::span<const PropertyKey> all_property_keys();

struct QueryScope {
    ScopeKind kind = ScopeKind::device;
    SiteId site;
    PortId port;
    std::string operation;

    static QueryScope device() { return {}; }
    static QueryScope of_site(SiteId s) { return {ScopeKind::site, s, {}, {}}; }
    static QueryScope of_port(PortId p) { return {ScopeKind::port, {}, std::move(p), {}}; }
    static QueryScope of_operation(std::string op) { return {ScopeKind::operation, {}, {}, std::move(op)}; }
};

using PropertyValue =
    std::variant<std::string, std::int64_t, double, bool, std::vector<std::string>, std::pair<double, double>>;

std::string format_value(const PropertyValue& value);

/// Error carrying the diagnostics that caused it (PayloadInvalid).
class DiagnosticsError : public Error {
public:
    DiagnosticsError(ErrorCode code, const std::string& message, Diagnostics diagnostics);
    const Diagnostics& diagnostics() const noexcept { return diagnostics_; }

private:
    Diagnostics diagnostics_;
};

/// Observable job bookkeeping. submit_index and completion_index count per
/// driver, so per-device FIFO order can be checked from outside.
struct JobInfo {
    DeviceHandle device;
    JobStatus status = JobStatus::queued;
    std::vector<JobStatus> history;
    std::uint64_t submit_index = 0;
    std::optional<std::uint64_t> completion_index;
    std::optional<std::string> error;
};

inline constexpr std::string_view kPqirPulseFormat = "pqir_pulse";

class Driver {
public:
    Driver();
    explicit Driver(std::vector<DeviceDescriptor> devices);
    ~Driver();

    Driver(const Driver&) = delete;
    Driver& operator=(const Driver&) = delete;

    /// Devices from the PULSESTACK_DEVICES path list (':'-separated).
    static std::unique_ptr<Driver> from_env();

    /// Validates and registers a device. Throws InvalidDevice.
    DeviceHandle register_device(DeviceDescriptor device);

    SessionHandle open();
    /// Cancels the session's queued jobs. Throws StaleHandle.
    void close(SessionHandle session);

    /// Registration order. Throws StaleHandle.
    std::vector<std::pair<DeviceHandle, std::string>> list_devices(SessionHandle session) const;

    /// Throws StaleHandle, InvalidScope, NotSupported.
    PropertyValue query(DeviceHandle device, const QueryScope& scope, PropertyKey key) const;

    /// Resolves like lowering does: site-specific first, then wildcard, over
    /// the built-in rules and the device defaults. Throws NotSupported when the
    /// device has no pulse support, MissingCalibration when nothing matches.
    CalibrationEntry get_default_calibration(DeviceHandle device, std::string_view gate,
                                             std::span<const SiteId> sites) const;
    void set_default_calibration(DeviceHandle device, CalibrationEntry entry);

    /// Parses and validates the payload, then queues it. Throws StaleHandle,
    /// FormatUnsupported, PayloadInvalid (a DiagnosticsError).
    JobHandle submit_job(SessionHandle session, DeviceHandle device, std::string_view format,
                         std::string_view payload, std::uint64_t shots, std::uint64_t seed = 0);

    JobStatus job_status(JobHandle job) const;
    JobInfo job_info(JobHandle job) const;
    /// Blocks until the job is terminal. Throws JobFailed for failed or
    /// cancelled jobs.
    sim::Histogram job_result(JobHandle job) const;
    /// Only a queued job is cancelled; for any other status this is a no-op.
    void job_cancel(JobHandle job);

    /// Snapshot of the registered descriptor, defaults included.
    DeviceDescriptor descriptor(DeviceHandle device) const;

private:
    struct Job;
    struct DeviceSlot;

    DeviceSlot& slot(DeviceHandle device);
    const DeviceSlot& slot(DeviceHandle device) const;
    void check_session(SessionHandle session) const;
    Job& job(JobHandle handle);
    const Job& job(JobHandle handle) const;
    void worker(std::uint64_t device_id);
    void set_status(Job& job, JobStatus status);

    const std::uint64_t id_;
    mutable std::mutex mutex_;
    mutable std::condition_variable job_changed_;
    bool stopping_ = false;
    std::uint64_t next_session_ = 1;
    std::uint64_t next_job_ = 1;
    std::uint64_t completions_ = 0;
    std::vector<std::uint64_t> open_sessions_;
    std::vector<std::unique_ptr<DeviceSlot>> devices_;
    std::map<std::uint64_t, std::unique_ptr<Job>> jobs_;
};

}  // namespace pulsestack::qdmi
