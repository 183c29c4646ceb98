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

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

namespace pulsestack {

// Thin wrapper that keeps port names, frame names, site indices and result
// indices from being mixed up at call sites.
template <typename Tag, typename T>
class StrongId {
public:
    using value_type = T;

    StrongId() = default;
    explicit StrongId(T value) : value_(std::move(value)) {}

    const T& value() const noexcept { return value_; }

    auto operator<=>(const StrongId&) const = default;

private:
    T value_{};
};

template <typename Tag, typename T>
std::ostream& operator<<(std::ostream& os, const StrongId<Tag, T>& id) {
    return os << id.value();
}

struct PortTag;
struct FrameTag;
struct SiteTag;
struct ResultTag;

using PortId = StrongId<PortTag, std::string>;
using FrameId = StrongId<FrameTag, std::string>;
using SiteId = StrongId<SiteTag, std::uint32_t>;
using ResultId = StrongId<ResultTag, std::uint32_t>;

/// True for `[a-z][a-z0-9_]*`, the port naming rule.
bool is_port_token(std::string_view text);

/// True for `[A-Za-z_][A-Za-z0-9_.]*`. Frame names are embedded in exchange
/// format global names, so they are restricted to identifier characters.
bool is_frame_token(std::string_view text);

}  // namespace pulsestack

template <typename Tag, typename T>
struct std::hash<pulsestack::StrongId<Tag, T>> {
    std::size_t operator()(const pulsestack::StrongId<Tag, T>& id) const noexcept {
        return std::hash<T>{}(id.value());
    }
};
