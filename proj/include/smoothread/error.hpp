// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smoothread {

enum class ErrorCode {
    EmptyInput,
    InvalidConfig,
    InvalidSummary,
    NoDecision,
    MissingAnswer,
    MalformedSummary,
    ProtocolError,
    BackendError,
    SessionClosed,
    UnsupportedTask,
    RemoteUnavailable,
    RemoteProtocolError,
    InvalidOffset,
    InsufficientPool,
    IoError,
    EmptySuite,
    InvalidParams,
    IncompatibleTrace,
    ConfigError,
    EmptyReport,
};

std::string_view to_string(ErrorCode code);

// Process exit code used by the CLI for each error class. 0 is reserved for success.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace smoothread
