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

#include "pulsestack/error.hpp"

#include "pulsestack/ids.hpp"

#include <cctype>

namespace pulsestack {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::AmplitudeOutOfRange: return "AmplitudeOutOfRange";
        case ErrorCode::EmptyWaveform: return "EmptyWaveform";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::UnknownFrame: return "UnknownFrame";
        case ErrorCode::UnknownPort: return "UnknownPort";
        case ErrorCode::InvalidSchedule: return "InvalidSchedule";
        case ErrorCode::InvalidBody: return "InvalidBody";
        case ErrorCode::MissingCalibration: return "MissingCalibration";
        case ErrorCode::UnboundFrameRole: return "UnboundFrameRole";
        case ErrorCode::InvalidCircuit: return "InvalidCircuit";
        case ErrorCode::UnknownPass: return "UnknownPass";
        case ErrorCode::UnsupportedInstruction: return "UnsupportedInstruction";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::ProfileMismatch: return "ProfileMismatch";
        case ErrorCode::UndeclaredGlobal: return "UndeclaredGlobal";
        case ErrorCode::ArityError: return "ArityError";
        case ErrorCode::ArgumentType: return "ArgumentType";
        case ErrorCode::InvalidModule: return "InvalidModule";
        case ErrorCode::InvalidDevice: return "InvalidDevice";
        case ErrorCode::StaleHandle: return "StaleHandle";
        case ErrorCode::NotSupported: return "NotSupported";
        case ErrorCode::InvalidScope: return "InvalidScope";
        case ErrorCode::FormatUnsupported: return "FormatUnsupported";
        case ErrorCode::PayloadInvalid: return "PayloadInvalid";
        case ErrorCode::JobFailed: return "JobFailed";
        case ErrorCode::UntimedSchedule: return "UntimedSchedule";
        case ErrorCode::PostMeasurementInstruction: return "PostMeasurementInstruction";
        case ErrorCode::UnknownSite: return "UnknownSite";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

SyntaxError::SyntaxError(std::size_t line, std::size_t column, std::string expected,
                         const std::string& found)
    : Error(ErrorCode::SyntaxError, std::to_string(line) + ":" + std::to_string(column) +
                                        ": expected " + expected + ", found " + found),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

bool is_port_token(std::string_view text) {
    if (text.empty() || !(text[0] >= 'a' && text[0] <= 'z')) return false;
    for (char c : text) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

bool is_frame_token(std::string_view text) {
    if (text.empty()) return false;
    const auto head = static_cast<unsigned char>(text[0]);
    if (!(std::isalpha(head) || text[0] == '_')) return false;
    for (char c : text) {
        const auto u = static_cast<unsigned char>(c);
        if (!(std::isalnum(u) || c == '_' || c == '.')) return false;
    }
    return true;
}

}  // namespace pulsestack
