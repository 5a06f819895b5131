// SPDX-License-Identifier: Apache-2.0
#include "smoothread/protocol.hpp"

#include "smoothread/error.hpp"

#include <array>

namespace smoothread::protocol {

namespace {

constexpr std::array<std::string_view, 4> kHeaders = {kTargetHeader, kCluesHeader, kReasonHeader, kAnswerHeader};

bool is_hspace(char c) { return c == ' ' || c == '\t'; }

// True when `pos` is preceded on its line only by spaces or tabs.
bool at_line_start(std::string_view s, std::size_t pos) {
    while (pos > 0 && is_hspace(s[pos - 1])) --pos;
    return pos == 0 || s[pos - 1] == '\n';
}

std::size_t line_begin(std::string_view s, std::size_t pos) {
    while (pos > 0 && s[pos - 1] != '\n') --pos;
    return pos;
}

std::size_t find_header(std::string_view s, std::string_view header, std::size_t from) {
    for (std::size_t pos = s.find(header, from); pos != std::string_view::npos; pos = s.find(header, pos + 1)) {
        if (at_line_start(s, pos)) return pos;
    }
    return std::string_view::npos;
}

std::size_t rfind_header(std::string_view s, std::string_view header) {
    for (std::size_t pos = s.rfind(header); pos != std::string_view::npos; pos = pos == 0 ? std::string_view::npos : s.rfind(header, pos - 1)) {
        if (at_line_start(s, pos)) return pos;
    }
    return std::string_view::npos;
}

bool contains_control_token(std::string_view s) {
    return s.find(kContinueToken) != std::string_view::npos || s.find(kStopToken) != std::string_view::npos;
}

// A header at the start of any line after the first would be read back as a
// new field.
bool contains_line_header(std::string_view s) {
    for (std::size_t nl = s.find('\n'); nl != std::string_view::npos; nl = s.find('\n', nl + 1)) {
        std::size_t p = nl + 1;
        while (p < s.size() && is_hspace(s[p])) ++p;
        for (auto h : kHeaders) {
            if (s.substr(p, h.size()) == h) return true;
        }
    }
    return false;
}

void check_field(std::string_view name, std::string_view value) {
    if (contains_control_token(value))
        throw Error(ErrorCode::InvalidSummary, std::string(name) + " contains a control token");
    if (contains_line_header(value))
        throw Error(ErrorCode::InvalidSummary, std::string(name) + " contains a field header at a line start");
    if (value.find('\r') != std::string_view::npos)
        throw Error(ErrorCode::InvalidSummary, std::string(name) + " contains a carriage return");
}

// Field body between the end of `header` at `header_pos` and the line that
// starts the next field (or `end`).
std::string field_value(std::string_view s, std::size_t header_pos, std::string_view header, std::size_t next) {
    std::size_t b = header_pos + header.size();
    if (b < next && s[b] == ' ') ++b;
    std::size_t e = next;
    if (e > b && s[e - 1] == '\n') --e;
    return std::string(s.substr(b, e > b ? e - b : 0));
}

}  // namespace

void validate(const ContextualSummary& summary) {
    check_field("target", summary.target);
    check_field("clues", summary.clues);
    check_field("reason", summary.reason);
    const bool stop = summary.decision == Decision::Stop;
    if (stop != summary.final_answer.has_value())
        throw Error(ErrorCode::InvalidSummary, "final_answer must be present iff the decision is STOP");
    if (summary.final_answer) check_field("final_answer", *summary.final_answer);
}

std::string render(const ContextualSummary& summary) {
    validate(summary);
    std::string out;
    out.reserve(summary.target.size() + summary.clues.size() + summary.reason.size() + 64);
    out.append(kTargetHeader).append(" ").append(summary.target).append("\n");
    out.append(kCluesHeader).append(" ").append(summary.clues).append("\n");
    out.append(kReasonHeader).append(" ").append(summary.reason).append("\n");
    if (summary.decision == Decision::Stop) {
        out.append(kAnswerHeader).append(" ").append(*summary.final_answer).append("\n");
        out.append(kStopToken);
    } else {
        out.append(kContinueToken);
    }
    return out;
}

ContextualSummary parse(std::string_view raw) {
    std::string normalized;
    normalized.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '\r' && i + 1 < raw.size() && raw[i + 1] == '\n') continue;
        normalized.push_back(raw[i]);
    }
    const std::string_view text = normalized;

    const std::size_t cont = text.rfind(kContinueToken);
    const std::size_t stop = text.rfind(kStopToken);
    if (cont == std::string_view::npos && stop == std::string_view::npos)
        throw Error(ErrorCode::NoDecision, "no <CONTINUE> or <STOP> token in model output");

    ContextualSummary s;
    std::size_t token_pos;
    if (cont == std::string_view::npos || (stop != std::string_view::npos && stop > cont)) {
        s.decision = Decision::Stop;
        token_pos = stop;
    } else {
        s.decision = Decision::Continue;
        token_pos = cont;
    }
    const std::string_view body = text.substr(0, token_pos);

    const std::size_t t = rfind_header(body, kTargetHeader);
    if (t == std::string_view::npos) throw Error(ErrorCode::MalformedSummary, "missing TARGET: header");
    const std::size_t c = find_header(body, kCluesHeader, t + kTargetHeader.size());
    if (c == std::string_view::npos) throw Error(ErrorCode::MalformedSummary, "missing CLUES: header");
    const std::size_t r = find_header(body, kReasonHeader, c + kCluesHeader.size());
    if (r == std::string_view::npos) throw Error(ErrorCode::MalformedSummary, "missing REASON: header");
    const std::size_t a = find_header(body, kAnswerHeader, r + kReasonHeader.size());

    s.target = field_value(body, t, kTargetHeader, line_begin(body, c));
    s.clues = field_value(body, c, kCluesHeader, line_begin(body, r));
    if (a == std::string_view::npos) {
        s.reason = field_value(body, r, kReasonHeader, body.size());
    } else {
        s.reason = field_value(body, r, kReasonHeader, line_begin(body, a));
        if (s.decision == Decision::Stop) s.final_answer = field_value(body, a, kAnswerHeader, body.size());
    }
    if (s.decision == Decision::Stop && !s.final_answer)
        throw Error(ErrorCode::MissingAnswer, "<STOP> without an ANSWER: line");

    for (std::string_view f : {std::string_view(s.target), std::string_view(s.clues), std::string_view(s.reason)}) {
        if (contains_control_token(f)) throw Error(ErrorCode::MalformedSummary, "control token inside a field");
    }
    return s;
}

}  // namespace smoothread::protocol
