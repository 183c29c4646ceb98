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

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pulsestack {

using Complex = std::complex<double>;

/// Slack allowed on the unit amplitude bound for accumulated rounding.
inline constexpr double kAmplitudeSlack = 1e-12;

enum class WaveformTemplate { constant, gaussian, gaussian_square };

std::string_view to_string(WaveformTemplate t);
WaveformTemplate parse_waveform_template(std::string_view name);

/// Parameter names a template requires, in canonical order.
std::span<const std::string_view> required_params(WaveformTemplate t);

struct SampledWaveform {
    std::vector<Complex> samples;

    bool operator==(const SampledWaveform&) const = default;
};

struct ParametricWaveform {
    WaveformTemplate shape = WaveformTemplate::constant;
    std::int64_t duration_samples = 0;
    std::map<std::string, double, std::less<>> params;

    bool operator==(const ParametricWaveform&) const = default;
};

/// Complex baseband envelope, either explicit or a template that resolves to
/// samples. Only constructible through the validating factories below, so a
/// Waveform in hand always satisfies its invariants.
class Waveform {
public:
    using Variant = std::variant<SampledWaveform, ParametricWaveform>;

    bool is_sampled() const noexcept { return std::holds_alternative<SampledWaveform>(data_); }
    const Variant& variant() const noexcept { return data_; }
    const SampledWaveform& sampled() const { return std::get<SampledWaveform>(data_); }
    const ParametricWaveform& parametric() const { return std::get<ParametricWaveform>(data_); }

    bool operator==(const Waveform&) const = default;

private:
    explicit Waveform(Variant data) : data_(std::move(data)) {}

    friend Waveform make_sampled_waveform(std::vector<Complex> samples);
    friend Waveform make_parametric_waveform(WaveformTemplate, std::int64_t,
                                             std::map<std::string, double, std::less<>>);

    Variant data_;
};

/// Throws EmptyWaveform or AmplitudeOutOfRange (|s| > 1 + 1e-12), NonFinite.
Waveform make_sampled_waveform(std::vector<Complex> samples);
Waveform make_sampled_waveform(std::span<const Complex> samples);

/// Throws InvalidParams unless params hold exactly the template's keys,
/// 0 <= amp <= 1, duration > 0, sigma_samples > 0 and
/// 0 <= width_samples <= duration.
Waveform make_parametric_waveform(WaveformTemplate shape, std::int64_t duration_samples,
                                  std::map<std::string, double, std::less<>> params);

std::int64_t waveform_duration(const Waveform& w);

/// Parametric templates are evaluated at integer sample indices. Sampled
/// waveforms come back unchanged.
Waveform resolve_waveform(const Waveform& w);

/// Convenience: the resolved sample vector.
std::vector<Complex> waveform_samples(const Waveform& w);

double max_abs_amplitude(const Waveform& w);

}  // namespace pulsestack
