// SPDX-License-Identifier: Apache-2.0
#include "smoothread/error.hpp"

namespace smoothread {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidSummary: return "InvalidSummary";
        case ErrorCode::NoDecision: return "NoDecision";
        case ErrorCode::MissingAnswer: return "MissingAnswer";
        case ErrorCode::MalformedSummary: return "MalformedSummary";
        case ErrorCode::ProtocolError: return "ProtocolError";
        case ErrorCode::BackendError: return "BackendError";
        case ErrorCode::SessionClosed: return "SessionClosed";
        case ErrorCode::UnsupportedTask: return "UnsupportedTask";
        case ErrorCode::RemoteUnavailable: return "RemoteUnavailable";
        case ErrorCode::RemoteProtocolError: return "RemoteProtocolError";
        case ErrorCode::InvalidOffset: return "InvalidOffset";
        case ErrorCode::InsufficientPool: return "InsufficientPool";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::EmptySuite: return "EmptySuite";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::IncompatibleTrace: return "IncompatibleTrace";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::EmptyReport: return "EmptyReport";
    }
    return "Unknown";
}

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyInput:
        case ErrorCode::InvalidConfig:
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidParams:
        case ErrorCode::InvalidOffset:
            return 2;
        case ErrorCode::IoError:
            return 3;
        case ErrorCode::InvalidSummary:
        case ErrorCode::NoDecision:
        case ErrorCode::MissingAnswer:
        case ErrorCode::MalformedSummary:
        case ErrorCode::ProtocolError:
            return 4;
        case ErrorCode::BackendError:
        case ErrorCode::SessionClosed:
        case ErrorCode::UnsupportedTask:
            return 5;
        case ErrorCode::RemoteUnavailable:
        case ErrorCode::RemoteProtocolError:
            return 6;
        case ErrorCode::InsufficientPool:
        case ErrorCode::EmptySuite:
        case ErrorCode::EmptyReport:
        case ErrorCode::IncompatibleTrace:
            return 7;
    }
    return 1;
}

}  // namespace smoothread
