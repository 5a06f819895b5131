// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace smoothread {

// Task families of the evaluation and dataset-construction suites.
enum class Task {
    NeedleRetrieval,
    PassageCount,
    PassageRetrieval,
    QuestionAnswering,
    Summarization,
    FewShotClassification,
    FewShotQA,
    FewShotSummarization,
    CodeCompletion,
};

std::string_view to_string(Task task);
std::optional<Task> task_from_string(std::string_view name);

}  // namespace smoothread
