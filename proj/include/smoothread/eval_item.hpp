// SPDX-License-Identifier: Apache-2.0
//
// One evaluation item (context, query, gold answers) and its JSONL form.
#pragma once

#include "smoothread/task.hpp"

#include <string>
#include <vector>

#include <json.hpp>

namespace smoothread {

struct EvalItem {
    std::string id;
    std::string context;
    std::string query;
    std::vector<std::string> gold;
    Task task = Task::NeedleRetrieval;
    nlohmann::json meta = nlohmann::json::object();
};

// {"id", "context", "query", "gold", "task", "meta"}; task as its string name.
nlohmann::json to_json(const EvalItem& item);
// Throws ConfigError on a missing field or unknown task.
EvalItem eval_item_from_json(const nlohmann::json& j);

}  // namespace smoothread
