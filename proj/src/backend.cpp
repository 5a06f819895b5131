// SPDX-License-Identifier: Apache-2.0
#include "smoothread/backend.hpp"

#include "smoothread/error.hpp"

namespace smoothread::backends {

std::string_view to_string(CallKind kind) {
    switch (kind) {
        case CallKind::Feed: return "feed";
        case CallKind::Generate: return "generate";
        case CallKind::Reset: return "reset";
    }
    return "unknown";
}

void Session::ensure_open() const {
    if (closed_) throw Error(ErrorCode::SessionClosed, "session " + id_ + " is closed");
}

}  // namespace smoothread::backends
