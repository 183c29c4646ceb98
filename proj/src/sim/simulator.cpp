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
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <set>

#include "pulsestack/error.hpp"
#include "pulsestack/simulator.hpp"

namespace pulsestack::sim {

namespace {

struct PlayEvent {
    std::int64_t start = 0;
    std::vector<Complex> envelope;
    double frequency_hz = 0.0;
    double phase_rad = 0.0;
    bool on_reference = false;

    std::int64_t end() const { return start + static_cast<std::int64_t>(envelope.size()); }
};

struct SitePlan {
    const QubitModel* model = nullptr;
    std::optional<FrameId> reference;
    double dt = 1e-9;
    std::vector<PlayEvent> plays;
    /// Reference carrier over time: (start sample, hz), in time order.
    std::vector<std::pair<std::int64_t, double>> reference_hz;
};

struct Measurement {
    SiteId site;
    ResultId result;
};

struct Plan {
    std::map<SiteId, SitePlan> sites;
    std::vector<Measurement> measurements;
    std::int64_t end = 0;
};

const Port& port_of(const Schedule& s, const DeviceDescriptor& device, const FrameId& frame) {
    const auto& f = s.frames.at(frame);
    const Port* p = device.find_port(f.port);
    if (p == nullptr) fail(ErrorCode::UnknownPort, "frame '" + frame.value() + "' is bound to unknown port '" +
                                                       f.port.value() + "'");
    return *p;
}

bool covers(const Port& p, SiteId site) { return std::find(p.sites.begin(), p.sites.end(), site) != p.sites.end(); }

Plan make_plan(const Schedule& s, const DeviceDescriptor& device, const SimulationModel& models) {
    if (!s.is_timed()) fail(ErrorCode::UntimedSchedule, "the simulator needs a timed schedule");
    validate_schedule(s);
    const auto& timing = *s.timing;

    Plan plan;
    for (const auto& q : models.qubits) {
        SitePlan sp;
        sp.model = &q;
        // Reference frame: smallest-named frame on a drive port covering the
        // site, single-site ports first.
        for (int pass = 0; pass < 2 && !sp.reference; ++pass) {
            for (const auto& [id, frame] : s.frames) {
                const Port* p = device.find_port(frame.port);
                if (p == nullptr || p->kind != PortKind::drive || !covers(*p, q.site)) continue;
                if (pass == 0 && p->sites.size() != 1) continue;
                sp.reference = id;
                sp.dt = p->constraints.sample_period_s;
                sp.reference_hz.emplace_back(0, frame.frequency_hz);
                break;
            }
        }
        plan.sites.emplace(q.site, std::move(sp));
    }

    struct Carrier {
        double hz;
        double rad;
    };
    std::map<FrameId, Carrier> carriers;
    for (const auto& [id, frame] : s.frames) carriers.emplace(id, Carrier{frame.frequency_hz, frame.phase_rad});

    std::set<SiteId> measured;
    for (std::size_t i = 0; i < s.instructions.size(); ++i) {
        const auto& instruction = s.instructions[i];
        const auto start = timing[i];
        plan.end = std::max(plan.end, start + instruction_duration(instruction));

        std::set<SiteId> touched;
        if (const auto* m = std::get_if<instr::Measure>(&instruction)) touched.insert(m->site);
        for (const auto& f : frames_of(instruction)) {
            for (auto site : port_of(s, device, f).sites) touched.insert(site);
        }
        for (auto site : touched) {
            if (measured.contains(site)) {
                fail(ErrorCode::PostMeasurementInstruction,
                     "instruction " + std::to_string(i) + " (" + std::string(instruction_name(instruction)) +
                         ") acts on site " + std::to_string(site.value()) + " after it was measured");
            }
        }

        auto measure = [&](SiteId site, ResultId result) {
            if (!plan.sites.contains(site)) {
                fail(ErrorCode::UnknownSite, "site " + std::to_string(site.value()) + " has no simulation model");
            }
            measured.insert(site);
            plan.measurements.push_back(Measurement{site, result});
        };

        std::visit(
            [&](const auto& op) {
                using T = std::decay_t<decltype(op)>;
                if constexpr (std::is_same_v<T, instr::Measure>) {
                    measure(op.site, op.result);
                } else if constexpr (std::is_same_v<T, instr::Capture>) {
                    const auto& port = port_of(s, device, op.frame);
                    if (port.sites.size() != 1) {
                        fail(ErrorCode::UnknownSite, "capture on port '" + port.id.value() +
                                                         "' does not identify a single site");
                    }
                    measure(port.sites.front(), op.result);
                } else if constexpr (std::is_same_v<T, instr::ShiftPhase>) {
                    carriers.at(op.frame).rad += op.delta_rad;
                } else if constexpr (std::is_same_v<T, instr::SetPhase>) {
                    carriers.at(op.frame).rad = op.phase_rad;
                } else if constexpr (std::is_same_v<T, instr::ShiftFrequency> ||
                                     std::is_same_v<T, instr::SetFrequency>) {
                    auto& c = carriers.at(op.frame);
                    if constexpr (std::is_same_v<T, instr::ShiftFrequency>) {
                        c.hz += op.delta_hz;
                    } else {
                        c.hz = op.frequency_hz;
                    }
                    for (auto& [site, sp] : plan.sites) {
                        if (sp.reference == op.frame) sp.reference_hz.emplace_back(start, c.hz);
                    }
                } else if constexpr (std::is_same_v<T, instr::Play>) {
                    const auto& port = port_of(s, device, op.frame);
                    if (port.kind != PortKind::drive) return;
                    const auto& c = carriers.at(op.frame);
                    for (auto site : port.sites) {
                        auto it = plan.sites.find(site);
                        if (it == plan.sites.end()) continue;
                        auto& sp = it->second;
                        if (std::abs(port.constraints.sample_period_s - sp.dt) > 1e-15 * sp.dt) {
                            fail(ErrorCode::NotSupported, "drive ports of site " + std::to_string(site.value()) +
                                                              " use different sample periods");
                        }
                        sp.plays.push_back(PlayEvent{start, waveform_samples(op.waveform), c.hz, c.rad,
                                                     sp.reference == op.frame});
                    }
                }
            },
            instruction);
    }
    for (auto& [site, sp] : plan.sites) {
        std::stable_sort(sp.plays.begin(), sp.plays.end(),
                         [](const PlayEvent& a, const PlayEvent& b) { return a.start < b.start; });
    }
    return plan;
}

// exp(-i*pi*dt*(v . sigma)) applied to psi.
void step(SiteState& psi, double vx, double vy, double vz, double dt) {
    const double r = std::sqrt(vx * vx + vy * vy + vz * vz);
    if (r == 0.0) return;
    const double angle = std::numbers::pi * r * dt;
    const double c = std::cos(angle);
    const double sn = std::sin(angle) / r;
    const Complex mi(0.0, -1.0);
    // v . sigma = [[vz, vx - i vy], [vx + i vy, -vz]]
    const Complex u00 = c + mi * sn * vz;
    const Complex u11 = c - mi * sn * vz;
    const Complex u01 = mi * sn * Complex(vx, -vy);
    const Complex u10 = mi * sn * Complex(vx, vy);
    const Complex a = psi[0];
    const Complex b = psi[1];
    psi[0] = u00 * a + u01 * b;
    psi[1] = u10 * a + u11 * b;
}

SiteState evolve(SiteId site, const SitePlan& sp, std::int64_t end, const StepObserver& observer) {
    SiteState psi{Complex(1.0, 0.0), Complex(0.0, 0.0)};
    const double f_q = sp.model->qubit_frequency_hz;
    const double rabi = sp.model->rabi_rate_hz_per_unit_amplitude;
    const double dt = sp.dt;

    std::size_t hz_index = 0;
    auto reference_hz_at = [&](std::int64_t t) {
        while (hz_index + 1 < sp.reference_hz.size() && sp.reference_hz[hz_index + 1].first <= t) ++hz_index;
        return sp.reference_hz.empty() ? f_q : sp.reference_hz[hz_index].second;
    };

    std::int64_t t = 0;
    while (t < end) {
        const double f_ref = reference_hz_at(t);
        const double delta = f_ref - f_q;
        Complex d(0.0, 0.0);
        bool active = false;
        std::int64_t next_event = end;
        for (const auto& p : sp.plays) {
            if (p.start > t) {
                next_event = std::min(next_event, p.start);
                break;
            }
            if (t >= p.end()) continue;
            active = true;
            const auto n = t - p.start;
            double carrier = p.phase_rad;
            if (!p.on_reference) carrier += kTwoPi * (p.frequency_hz - f_ref) * static_cast<double>(t) * dt;
            d += p.envelope[static_cast<std::size_t>(n)] * std::polar(1.0, carrier);
        }
        if (active) {
            step(psi, rabi * d.real(), rabi * d.imag(), delta, dt);
            ++t;
        } else {
            if (hz_index + 1 < sp.reference_hz.size()) {
                next_event = std::min(next_event, std::max(sp.reference_hz[hz_index + 1].first, t + 1));
            }
            const auto run = next_event - t;
            // Idle: exp(-i*pi*delta*sz*run*dt) is diagonal.
            const double angle = std::numbers::pi * delta * static_cast<double>(run) * dt;
            psi[0] *= std::polar(1.0, -angle);
            psi[1] *= std::polar(1.0, angle);
            t = next_event;
        }
        if (observer) observer(site, t, psi);
    }
    return psi;
}

std::map<SiteId, SiteState> run(const Plan& plan, const StepObserver& observer) {
    std::map<SiteId, SiteState> out;
    for (const auto& [site, sp] : plan.sites) out.emplace(site, evolve(site, sp, plan.end, observer));
    return out;
}

}  // namespace

std::uint64_t Histogram::total() const {
    std::uint64_t sum = 0;
    for (const auto& [bits, n] : counts) sum += n;
    return sum;
}

std::map<SiteId, SiteState> final_states(const Schedule& schedule, const DeviceDescriptor& device,
                                         const SimulationModel& models, const StepObserver& observer) {
    return run(make_plan(schedule, device, models), observer);
}

Histogram execute(const Schedule& schedule, const DeviceDescriptor& device, const SimulationModel& models,
                  std::uint64_t shots, std::uint64_t seed, std::size_t min_results) {
    const auto plan = make_plan(schedule, device, models);
    const auto states = run(plan, {});

    std::size_t width = std::max<std::size_t>(min_results, 1);
    std::vector<std::pair<std::size_t, double>> bits;  // result index, P(1)
    for (const auto& m : plan.measurements) {
        width = std::max<std::size_t>(width, m.result.value() + 1);
        const auto& psi = states.at(m.site);
        bits.emplace_back(m.result.value(), std::clamp(std::norm(psi[1]), 0.0, 1.0));
    }

    std::mt19937_64 rng(seed);
    Histogram h;
    std::string word(width, '0');
    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        std::fill(word.begin(), word.end(), '0');
        for (const auto& [index, p1] : bits) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            if (u < p1) word[index] = '1';
        }
        ++h.counts[word];
    }
    return h;
}

std::map<SiteId, double> expectation_z(const Schedule& schedule, const DeviceDescriptor& device,
                                       const SimulationModel& models) {
    std::map<SiteId, double> out;
    for (const auto& [site, psi] : final_states(schedule, device, models)) {
        out.emplace(site, std::clamp(std::norm(psi[0]) - std::norm(psi[1]), -1.0, 1.0));
    }
    return out;
}

double fidelity(const SiteState& a, const SiteState& b) {
    return std::norm(std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]);
}

}  // namespace pulsestack::sim
