// SPDX-License-Identifier: Apache-2.0
#include "smoothread/trace_json.hpp"

#include "smoothread/error.hpp"

namespace smoothread::engine {

using nlohmann::json;

namespace {

StepDecision decision_from_string(const std::string& s) {
    if (s == "continue") return StepDecision::Continue;
    if (s == "stop") return StepDecision::Stop;
    if (s == "n/a") return StepDecision::NotApplicable;
    throw Error(ErrorCode::ConfigError, "unknown step decision '" + s + "'");
}

}  // namespace

json to_json(const StepRecord& step) {
    json j;
    j["step_index"] = step.step_index;
    j["chunk_index"] = step.chunk_index ? json(*step.chunk_index) : json(nullptr);
    j["input_tokens"] = step.input_tokens;
    j["output_tokens"] = step.output_tokens;
    j["mr_tokens"] = step.mr_tokens;
    j["decision"] = std::string(to_string(step.decision));
    j["time_seconds"] = step.time_seconds;
    j["summary_overflow"] = step.summary_overflow;
    j["output"] = step.output;
    return j;
}

json to_json(const InferenceTrace& trace) {
    json j;
    j["strategy"] = std::string(to_string(trace.strategy));
    j["backend"] = trace.backend;
    j["steps"] = json::array();
    for (const auto& s : trace.steps) j["steps"].push_back(to_json(s));
    j["answer"] = trace.answer;
    j["total_prefill_tokens"] = trace.total_prefill_tokens;
    j["total_decode_tokens"] = trace.total_decode_tokens;
    j["peak_mr_tokens"] = trace.peak_mr_tokens;
    j["virtual_time_seconds"] = trace.virtual_time_seconds;
    j["chunks_read"] = trace.chunks_read;
    j["chunks_total"] = trace.chunks_total;
    j["scaffold_tokens"] = trace.scaffold_tokens;
    j["chunk_tokens"] = trace.chunk_tokens;
    j["early_stop"] = trace.early_stop;
    j["summaries"] = json::array();
    for (const auto& s : trace.summaries) j["summaries"].push_back(protocol::render(s));
    return j;
}

InferenceTrace trace_from_json(const json& j) {
    try {
        InferenceTrace t;
        t.strategy = strategy_from_string(j.at("strategy").get<std::string>());
        t.backend = j.at("backend").get<std::string>();
        for (const auto& s : j.at("steps")) {
            StepRecord r;
            r.step_index = s.at("step_index").get<std::size_t>();
            if (!s.at("chunk_index").is_null()) r.chunk_index = s.at("chunk_index").get<std::size_t>();
            r.input_tokens = s.at("input_tokens").get<std::size_t>();
            r.output_tokens = s.at("output_tokens").get<std::size_t>();
            r.mr_tokens = s.at("mr_tokens").get<std::size_t>();
            r.decision = decision_from_string(s.at("decision").get<std::string>());
            r.time_seconds = s.value("time_seconds", 0.0);
            r.summary_overflow = s.value("summary_overflow", false);
            r.output = s.value("output", std::string());
            t.steps.push_back(std::move(r));
        }
        t.answer = j.at("answer").get<std::string>();
        t.total_prefill_tokens = j.at("total_prefill_tokens").get<std::size_t>();
        t.total_decode_tokens = j.at("total_decode_tokens").get<std::size_t>();
        t.peak_mr_tokens = j.at("peak_mr_tokens").get<std::size_t>();
        t.virtual_time_seconds = j.at("virtual_time_seconds").get<double>();
        t.chunks_read = j.at("chunks_read").get<std::size_t>();
        t.chunks_total = j.at("chunks_total").get<std::size_t>();
        t.scaffold_tokens = j.value("scaffold_tokens", std::size_t{0});
        t.chunk_tokens = j.value("chunk_tokens", std::size_t{0});
        t.early_stop = j.value("early_stop", true);
        if (j.contains("summaries")) {
            for (const auto& s : j.at("summaries")) t.summaries.push_back(protocol::parse(s.get<std::string>()));
        }
        return t;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("bad trace document: ") + e.what());
    }
}

}  // namespace smoothread::engine
