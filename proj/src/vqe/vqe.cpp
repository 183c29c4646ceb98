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
#include <cmath>
#include <random>

#include "pulsestack/error.hpp"
#include "pulsestack/lowering.hpp"
#include "pulsestack/passes.hpp"
#include "pulsestack/simulator.hpp"
#include "pulsestack/vqe.hpp"

namespace pulsestack::vqe {

namespace {

const Port& drive_port(const DeviceDescriptor& device, SiteId site) {
    const Port* port = device.site_port(site, PortKind::drive);
    if (port == nullptr) {
        fail(ErrorCode::NotSupported, "site " + std::to_string(site.value()) + " has no drive port");
    }
    return *port;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

}  // namespace

Schedule pulse_schedule(const DeviceDescriptor& device, SiteId site, const PulseParameters& p) {
    const auto& port = drive_port(device, site);
    Schedule s;
    s.frames = device_frames(device);
    const FrameId frame{port.id.value()};
    s.instructions.emplace_back(instr::Play{
        frame, make_parametric_waveform(WaveformTemplate::constant, p.duration_samples,
                                        {{"amp", p.amp}, {"phase", p.phase_rad}})});
    return passes::resolve_timing(s);
}

double energy(const DeviceDescriptor& device, SiteId site, const PulseParameters& p) {
    if (!device.simulation || device.simulation->find(site) == nullptr) {
        fail(ErrorCode::NotSupported, "device '" + device.name + "' cannot simulate site " +
                                          std::to_string(site.value()));
    }
    return sim::expectation_z(pulse_schedule(device, site, p), device, *device.simulation).at(site);
}

Result run(const DeviceDescriptor& device, const Options& options,
           const std::function<void(const IterationRecord&)>& on_iteration) {
    const auto& c = drive_port(device, options.site).constraints;
    const std::int64_t granule = c.granularity_samples;
    const std::int64_t min_duration = c.min_duration_samples;
    const std::int64_t max_duration = std::max<std::int64_t>(min_duration, 64 * granule * 16);

    std::mt19937_64 rng(options.seed);
    PulseParameters x;
    x.amp = uniform(rng, 0.05, 0.3) * c.max_amplitude;
    x.duration_samples = min_duration + granule * static_cast<std::int64_t>(uniform(rng, 0.0, 8.0));
    x.phase_rad = uniform(rng, 0.0, kTwoPi);

    auto f = [&](const PulseParameters& p) { return energy(device, options.site, p); };
    double fx = f(x);

    Result result;
    auto record = [&](std::size_t iteration) {
        IterationRecord r{iteration, x, fx};
        result.trace.push_back(r);
        if (on_iteration) on_iteration(r);
    };
    record(0);

    double amp_step = 0.25 * c.max_amplitude;
    std::int64_t duration_step = 4;  // in granules
    double phase_step = 1.0;
    constexpr double kAmpResolution = 1e-9;
    constexpr double kPhaseResolution = 1e-9;

    for (std::size_t it = 1; it <= options.iterations; ++it) {
        auto try_move = [&](auto mutate) {
            for (int sign : {+1, -1}) {
                PulseParameters y = x;
                if (!mutate(y, sign)) continue;
                const double fy = f(y);
                if (fy < fx) {
                    x = y;
                    fx = fy;
                    return true;
                }
            }
            return false;
        };
        if (!try_move([&](PulseParameters& y, int sign) {
                y.amp = std::clamp(y.amp + sign * amp_step, 0.0, c.max_amplitude);
                return y.amp != x.amp;
            })) {
            amp_step /= 2;
        }
        if (!try_move([&](PulseParameters& y, int sign) {
                y.duration_samples =
                    std::clamp(y.duration_samples + sign * duration_step * granule, min_duration, max_duration);
                return y.duration_samples != x.duration_samples;
            })) {
            duration_step = std::max<std::int64_t>(duration_step / 2, 1);
        }
        if (!try_move([&](PulseParameters& y, int sign) {
                y.phase_rad = normalize_phase(y.phase_rad + sign * phase_step);
                return true;
            })) {
            phase_step /= 2;
        }
        record(it);
        if (amp_step < kAmpResolution && phase_step < kPhaseResolution) break;
    }
    result.best = x;
    result.energy = fx;
    return result;
}

}  // namespace pulsestack::vqe
