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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pulsestack {

enum class ErrorCode {
    // pulse core
    AmplitudeOutOfRange,
    EmptyWaveform,
    InvalidParams,
    NonFinite,
    UnknownFrame,
    UnknownPort,
    InvalidSchedule,
    // gate lowering
    InvalidBody,
    MissingCalibration,
    UnboundFrameRole,
    InvalidCircuit,
    // pass pipeline
    UnknownPass,
    // exchange format
    UnsupportedInstruction,
    SyntaxError,
    ProfileMismatch,
    UndeclaredGlobal,
    ArityError,
    ArgumentType,
    InvalidModule,
    // device interface
    InvalidDevice,
    StaleHandle,
    NotSupported,
    InvalidScope,
    FormatUnsupported,
    PayloadInvalid,
    JobFailed,
    // simulator
    UntimedSchedule,
    PostMeasurementInstruction,
    UnknownSite,
    // plumbing
    Io,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code is the
/// stable, testable part; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t line, std::size_t column, std::string expected, const std::string& found);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string expected_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace pulsestack
