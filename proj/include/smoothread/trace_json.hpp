// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "smoothread/engine.hpp"

#include <json.hpp>

namespace smoothread::engine {

// Field names follow InferenceTrace / StepRecord; summaries are rendered.
nlohmann::json to_json(const StepRecord& step);
nlohmann::json to_json(const InferenceTrace& trace);

// Throws ConfigError on a malformed document.
InferenceTrace trace_from_json(const nlohmann::json& j);

}  // namespace smoothread::engine
