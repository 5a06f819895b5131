// SPDX-License-Identifier: Apache-2.0
#include "smoothread/task.hpp"

#include <array>
#include <utility>

namespace smoothread {

namespace {

constexpr std::array<std::pair<Task, std::string_view>, 9> kNames = {{
    {Task::NeedleRetrieval, "niah"},
    {Task::PassageCount, "passage_count"},
    {Task::PassageRetrieval, "passage_retrieval"},
    {Task::QuestionAnswering, "qa"},
    {Task::Summarization, "summarization"},
    {Task::FewShotClassification, "fewshot_classification"},
    {Task::FewShotQA, "fewshot_qa"},
    {Task::FewShotSummarization, "fewshot_summarization"},
    {Task::CodeCompletion, "code"},
}};

}  // namespace

std::string_view to_string(Task task) {
    for (const auto& [t, name] : kNames) {
        if (t == task) return name;
    }
    return "unknown";
}

std::optional<Task> task_from_string(std::string_view name) {
    for (const auto& [t, n] : kNames) {
        if (n == name) return t;
    }
    return std::nullopt;
}

}  // namespace smoothread
