// SPDX-License-Identifier: Apache-2.0
//
// Contextual summary wire format.
//
//   TARGET: <text>
//   CLUES: <text, may span lines>
//   REASON: <text, may span lines>
//   [ANSWER: <text>]
//   <CONTINUE> | <STOP>
//
// UTF-8, LF line endings, no newline after the control token.
#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace smoothread::protocol {

inline constexpr std::string_view kContinueToken = "<CONTINUE>";
inline constexpr std::string_view kStopToken = "<STOP>";
inline constexpr std::string_view kTargetHeader = "TARGET:";
inline constexpr std::string_view kCluesHeader = "CLUES:";
inline constexpr std::string_view kReasonHeader = "REASON:";
inline constexpr std::string_view kAnswerHeader = "ANSWER:";

enum class Decision { Continue, Stop };

struct ContextualSummary {
    std::string target;
    std::string clues;
    std::string reason;
    Decision decision = Decision::Continue;
    std::optional<std::string> final_answer;  // present iff decision == Stop

    friend bool operator==(const ContextualSummary&, const ContextualSummary&) = default;
};

// Throws InvalidSummary when the summary breaks its invariants.
void validate(const ContextualSummary& summary);

// Throws InvalidSummary on invariant violation.
std::string render(const ContextualSummary& summary);

// Lenient inverse of render. Text before the TARGET line and after the last
// control token is ignored; CRLF is accepted. Errors: NoDecision when no control
// token is present, MissingAnswer for a STOP block without ANSWER, and
// MalformedSummary when a field header is missing or out of order.
ContextualSummary parse(std::string_view text);

}  // namespace smoothread::protocol
