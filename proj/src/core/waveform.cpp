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

#include "pulsestack/waveform.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pulsestack/error.hpp"

namespace pulsestack {

namespace {

constexpr std::array<std::string_view, 2> kConstantKeys{"amp", "phase"};
constexpr std::array<std::string_view, 3> kGaussianKeys{"amp", "phase", "sigma_samples"};
constexpr std::array<std::string_view, 4> kGaussianSquareKeys{"amp", "phase", "sigma_samples",
                                                              "width_samples"};

double param(const ParametricWaveform& p, std::string_view key) {
    auto it = p.params.find(key);
    if (it == p.params.end()) {
        fail(ErrorCode::InvalidParams, "missing parameter '" + std::string(key) + "'");
    }
    return it->second;
}

void check_parametric(const ParametricWaveform& p) {
    const std::string shape{to_string(p.shape)};
    if (p.duration_samples <= 0) {
        fail(ErrorCode::InvalidParams, shape + ": duration must be positive");
    }
    const auto keys = required_params(p.shape);
    for (auto key : keys) {
        const double v = param(p, key);
        if (!std::isfinite(v)) {
            fail(ErrorCode::InvalidParams, shape + ": parameter '" + std::string(key) + "' is not finite");
        }
    }
    if (p.params.size() != keys.size()) {
        for (const auto& [name, value] : p.params) {
            if (std::find(keys.begin(), keys.end(), name) == keys.end()) {
                fail(ErrorCode::InvalidParams, shape + ": unexpected parameter '" + name + "'");
            }
        }
    }
    const double amp = param(p, "amp");
    if (amp < 0.0 || amp > 1.0) {
        fail(ErrorCode::InvalidParams, shape + ": amp must lie in [0, 1]");
    }
    if (p.shape != WaveformTemplate::constant && param(p, "sigma_samples") <= 0.0) {
        fail(ErrorCode::InvalidParams, shape + ": sigma_samples must be positive");
    }
    if (p.shape == WaveformTemplate::gaussian_square) {
        const double width = param(p, "width_samples");
        if (width < 0.0 || width > static_cast<double>(p.duration_samples)) {
            fail(ErrorCode::InvalidParams, shape + ": width_samples must lie in [0, duration]");
        }
    }
}

std::vector<Complex> evaluate(const ParametricWaveform& p) {
    const double amp = param(p, "amp");
    const Complex carrier = std::polar(amp, param(p, "phase"));
    const auto d = p.duration_samples;
    std::vector<Complex> out(static_cast<std::size_t>(d), carrier);
    if (p.shape == WaveformTemplate::constant) return out;

    const double sigma = param(p, "sigma_samples");
    const double center = static_cast<double>(d - 1) / 2.0;
    const double half_width =
        p.shape == WaveformTemplate::gaussian_square ? param(p, "width_samples") / 2.0 : 0.0;
    for (std::int64_t n = 0; n < d; ++n) {
        double x = std::abs(static_cast<double>(n) - center);
        if (p.shape == WaveformTemplate::gaussian_square) {
            x = std::max(0.0, x - half_width);
        }
        out[static_cast<std::size_t>(n)] = carrier * std::exp(-(x * x) / (2.0 * sigma * sigma));
    }
    return out;
}

}  // namespace

std::string_view to_string(WaveformTemplate t) {
    switch (t) {
        case WaveformTemplate::constant: return "constant";
        case WaveformTemplate::gaussian: return "gaussian";
        case WaveformTemplate::gaussian_square: return "gaussian_square";
    }
    return "unknown";
}

WaveformTemplate parse_waveform_template(std::string_view name) {
    if (name == "constant") return WaveformTemplate::constant;
    if (name == "gaussian") return WaveformTemplate::gaussian;
    if (name == "gaussian_square") return WaveformTemplate::gaussian_square;
    fail(ErrorCode::InvalidParams, "unknown waveform template '" + std::string(name) + "'");
}

std::span<const std::string_view> required_params(WaveformTemplate t) {
    switch (t) {
        case WaveformTemplate::constant: return kConstantKeys;
        case WaveformTemplate::gaussian: return kGaussianKeys;
        case WaveformTemplate::gaussian_square: return kGaussianSquareKeys;
    }
    return {};
}

Waveform make_sampled_waveform(std::vector<Complex> samples) {
    if (samples.empty()) fail(ErrorCode::EmptyWaveform, "sampled waveform has no samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            fail(ErrorCode::NonFinite, "sample " + std::to_string(i) + " is not finite");
        }
        if (std::abs(s) > 1.0 + kAmplitudeSlack) {
            fail(ErrorCode::AmplitudeOutOfRange,
                 "sample " + std::to_string(i) + " has magnitude " + std::to_string(std::abs(s)));
        }
    }
    return Waveform(SampledWaveform{std::move(samples)});
}

Waveform make_sampled_waveform(std::span<const Complex> samples) {
    return make_sampled_waveform(std::vector<Complex>(samples.begin(), samples.end()));
}

Waveform make_parametric_waveform(WaveformTemplate shape, std::int64_t duration_samples,
                                  std::map<std::string, double, std::less<>> params) {
    ParametricWaveform p{shape, duration_samples, std::move(params)};
    check_parametric(p);
    return Waveform(std::move(p));
}

std::int64_t waveform_duration(const Waveform& w) {
    if (w.is_sampled()) return static_cast<std::int64_t>(w.sampled().samples.size());
    return w.parametric().duration_samples;
}

Waveform resolve_waveform(const Waveform& w) {
    if (w.is_sampled()) return w;
    return make_sampled_waveform(evaluate(w.parametric()));
}

std::vector<Complex> waveform_samples(const Waveform& w) {
    if (w.is_sampled()) return w.sampled().samples;
    return evaluate(w.parametric());
}

double max_abs_amplitude(const Waveform& w) {
    double peak = 0.0;
    for (const auto& s : waveform_samples(w)) peak = std::max(peak, std::abs(s));
    return peak;
}

}  // namespace pulsestack
