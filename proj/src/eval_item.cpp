// SPDX-License-Identifier: Apache-2.0
#include "smoothread/eval_item.hpp"

#include "smoothread/error.hpp"

namespace smoothread {

nlohmann::json to_json(const EvalItem& item) {
    nlohmann::json j;
    j["id"] = item.id;
    j["context"] = item.context;
    j["query"] = item.query;
    j["gold"] = item.gold;
    j["task"] = std::string(to_string(item.task));
    j["meta"] = item.meta;
    return j;
}

EvalItem eval_item_from_json(const nlohmann::json& j) {
    try {
        EvalItem item;
        if (j.contains("id")) item.id = j.at("id").get<std::string>();
        item.context = j.at("context").get<std::string>();
        item.query = j.at("query").get<std::string>();
        item.gold = j.at("gold").get<std::vector<std::string>>();
        const auto name = j.at("task").get<std::string>();
        const auto task = task_from_string(name);
        if (!task) throw Error(ErrorCode::ConfigError, "unknown task '" + name + "'");
        item.task = *task;
        if (j.contains("meta")) item.meta = j.at("meta");
        return item;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("bad eval item: ") + e.what());
    }
}

}  // namespace smoothread
