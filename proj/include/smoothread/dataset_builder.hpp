// SPDX-License-Identifier: Apache-2.0
//
// SFT data in three shapes built from one teacher run per raw item:
//
//   SR  user(preamble + chunk 0), assistant(I_0), user(chunk 1), assistant(I_1), ...
//   UR  user(I_{i-1} + chunk i + question), assistant(I_i), ...
//   OS  user(context + question), assistant(answer)
//
// The teacher always reads in Unsmooth mode (memory reset every step, previous
// summary re-fed); SR and UR are two renderings of the same summaries. When
// reading ends without a stop decision, both chunked shapes get an extra
// answer-prompt user turn followed by a stop summary carrying the answer.
#pragma once

#include "smoothread/chunker.hpp"
#include "smoothread/eval_item.hpp"
#include "smoothread/metrics.hpp"
#include "smoothread/protocol.hpp"
#include "smoothread/remote_backend.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace smoothread::dataset {

struct RawItem {
    std::string id;
    std::string query;
    std::vector<std::string> answers;  // reference answers
    std::string context;
    Task task = Task::QuestionAnswering;
};

RawItem raw_from_eval(const EvalItem& item);

enum class Format { OS, UR, SR };
enum class TeacherKind { Rule, Remote };

std::string_view to_string(Format f);
std::string_view to_string(TeacherKind t);
// "os" | "ur" | "sr"; throws ConfigError.
Format format_from_string(std::string_view name);

struct Turn {
    std::string role;  // "user" | "assistant"
    std::string text;
};

struct SftItem {
    Format format = Format::SR;
    std::vector<Turn> turns;
    std::string source_id;
    TeacherKind teacher = TeacherKind::Rule;
    bool kept = true;
    double clean_score = 0.0;
    Task task = Task::QuestionAnswering;
    std::string context;
    std::string final_answer;
    std::vector<std::string> references;
    std::size_t chunk_tokens = 0;
    std::string drop_reason;
};

nlohmann::json to_json(const SftItem& item);

struct TeacherRun {
    std::vector<protocol::ContextualSummary> summaries;  // one per chunk read
    std::string answer;                                   // final answer
    bool stopped = false;                                 // last summary is a stop decision
};

class Teacher {
public:
    virtual ~Teacher() = default;
    virtual TeacherRun run(const RawItem& raw, const std::vector<chunker::Chunk>& chunks, bool early_stop) = 0;
    virtual TeacherKind kind() const noexcept = 0;
    // Chunk size for an item; Rule teachers vary it, Remote teachers use 512.
    virtual std::size_t chunk_tokens(std::uint64_t seed, std::size_t item_index) const;
};

// Reads with the unbounded simulator for needle retrieval and passage counting.
// Tasks the simulator cannot solve get the lead sentence of each chunk as
// clues and the first reference answer as the final answer.
class RuleTeacher final : public Teacher {
public:
    TeacherRun run(const RawItem& raw, const std::vector<chunker::Chunk>& chunks, bool early_stop) override;
    TeacherKind kind() const noexcept override { return TeacherKind::Rule; }
    std::size_t chunk_tokens(std::uint64_t seed, std::size_t item_index) const override;
};

inline constexpr std::size_t kRuleChunkMin = 128;
inline constexpr std::size_t kRuleChunkMax = 4096;
inline constexpr std::size_t kRemoteChunkTokens = 512;

class RemoteTeacher final : public Teacher {
public:
    explicit RemoteTeacher(backends::RemoteBackendConfig config);
    TeacherRun run(const RawItem& raw, const std::vector<chunker::Chunk>& chunks, bool early_stop) override;
    TeacherKind kind() const noexcept override { return TeacherKind::Remote; }

private:
    backends::RemoteBackend backend_;
};

// Renderings of one teacher run. `chunks` are the chunks the teacher read from.
SftItem build_sr(const RawItem& raw, const std::vector<chunker::Chunk>& chunks, const TeacherRun& run,
                 TeacherKind teacher);
SftItem build_ur(const RawItem& raw, const std::vector<chunker::Chunk>& chunks, const TeacherRun& run,
                 TeacherKind teacher);
SftItem build_os(const RawItem& raw, const TeacherRun& run, TeacherKind teacher);

struct CleanThresholds {
    double exact_match = 1.0;
    double f1 = 0.5;
    double rouge_l = 0.5;
    double edit_sim = 0.75;

    double for_metric(metrics::Metric m) const;
};

struct Partition {
    std::vector<SftItem> kept;
    std::vector<SftItem> dropped;
};

// Scores every item's final answer against its references with `metric` and
// keeps it iff the score reaches `threshold`. Items already marked not kept
// stay dropped.
Partition clean(std::vector<SftItem> items, metrics::Metric metric, double threshold);
// Same with the per-task metric and threshold.
Partition clean(std::vector<SftItem> items, const CleanThresholds& thresholds = {});

struct BuildOptions {
    std::vector<Format> formats = {Format::SR, Format::UR, Format::OS};
    bool early_stop = true;
    CleanThresholds thresholds{};
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::size_t chunk_tokens = 0;  // 0: the teacher's choice
};

struct BuildResult {
    std::vector<SftItem> sr, ur, os;  // source order, kept and dropped alike
    nlohmann::json report;
};

BuildResult build_dataset(const std::vector<RawItem>& raw, Teacher& teacher, const BuildOptions& options);

// Writes sr.jsonl / ur.jsonl / os.jsonl for the requested formats and
// report.json into `dir` (created if missing). Only kept items go to the JSONL
// files. Throws IoError.
void write_dataset(const std::string& dir, const BuildResult& result, const BuildOptions& options);

}  // namespace smoothread::dataset
