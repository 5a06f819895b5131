// SPDX-License-Identifier: Apache-2.0
#include "smoothread/dataset_builder.hpp"

#include "smoothread/engine.hpp"
#include "smoothread/error.hpp"
#include "smoothread/prompts.hpp"
#include "smoothread/sim_backend.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

namespace smoothread::dataset {

using nlohmann::json;

RawItem raw_from_eval(const EvalItem& item) {
    RawItem raw;
    raw.id = item.id;
    raw.query = item.query;
    raw.answers = item.gold;
    raw.context = item.context;
    raw.task = item.task;
    return raw;
}

std::string_view to_string(Format f) {
    switch (f) {
        case Format::OS: return "os";
        case Format::UR: return "ur";
        case Format::SR: return "sr";
    }
    return "unknown";
}

std::string_view to_string(TeacherKind t) { return t == TeacherKind::Rule ? "rule" : "remote"; }

Format format_from_string(std::string_view name) {
    if (name == "os") return Format::OS;
    if (name == "ur") return Format::UR;
    if (name == "sr") return Format::SR;
    throw Error(ErrorCode::ConfigError, "unknown dataset format '" + std::string(name) + "'");
}

json to_json(const SftItem& item) {
    json j;
    j["format"] = std::string(to_string(item.format));
    j["source_id"] = item.source_id;
    j["teacher"] = std::string(to_string(item.teacher));
    j["task"] = std::string(to_string(item.task));
    j["kept"] = item.kept;
    j["clean_score"] = item.clean_score;
    j["context"] = item.context;
    j["final_answer"] = item.final_answer;
    j["references"] = item.references;
    j["chunk_tokens"] = item.chunk_tokens;
    if (!item.drop_reason.empty()) j["drop_reason"] = item.drop_reason;
    j["turns"] = json::array();
    for (const auto& t : item.turns) j["turns"].push_back({{"role", t.role}, {"text", t.text}});
    return j;
}

std::size_t Teacher::chunk_tokens(std::uint64_t, std::size_t) const { return kRemoteChunkTokens; }

std::size_t RuleTeacher::chunk_tokens(std::uint64_t seed, std::size_t item_index) const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(item_index)};
    std::mt19937_64 rng(seq);
    return std::uniform_int_distribution<std::size_t>(kRuleChunkMin, kRuleChunkMax)(rng);
}

namespace {

TeacherRun from_trace(const engine::InferenceTrace& trace) {
    TeacherRun run;
    run.summaries = trace.summaries;
    run.answer = trace.answer;
    run.stopped = !run.summaries.empty() && run.summaries.back().decision == protocol::Decision::Stop &&
                  trace.chunks_read <= trace.chunks_total && trace.early_stop;
    return run;
}

std::string lead_sentence(std::string_view chunk) {
    auto b = chunk.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    chunk.remove_prefix(b);
    auto end = chunk.find_first_of(".!?\n");
    std::string s(chunk.substr(0, end == std::string_view::npos ? chunk.size() : end + 1));
    while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
    return s;
}

std::size_t max_chunk(const std::vector<chunker::Chunk>& chunks) {
    std::size_t c = 1;
    for (const auto& ch : chunks) c = std::max(c, ch.est_tokens);
    return c;
}

// Stop summary closing a read that ended without a stop decision.
protocol::ContextualSummary closing_summary(const TeacherRun& run) {
    protocol::ContextualSummary s;
    if (!run.summaries.empty()) {
        s.target = run.summaries.back().target;
        s.clues = run.summaries.back().clues;
    }
    s.reason = "all chunks have been read";
    s.decision = protocol::Decision::Stop;
    s.final_answer = run.answer;
    return s;
}

SftItem base_item(Format format, const RawItem& raw, const TeacherRun& run, TeacherKind teacher) {
    SftItem item;
    item.format = format;
    item.source_id = raw.id;
    item.teacher = teacher;
    item.task = raw.task;
    item.context = raw.context;
    item.final_answer = run.answer;
    item.references = raw.answers;
    return item;
}

}  // namespace

TeacherRun RuleTeacher::run(const RawItem& raw, const std::vector<chunker::Chunk>& chunks, bool early_stop) {
    engine::RunOptions opts;
    opts.early_stop = early_stop;
    opts.chunk_tokens = max_chunk(chunks);
    if (raw.task == Task::NeedleRetrieval || raw.task == Task::PassageCount) {
        backends::SimBackend sim(std::nullopt);
        auto session = sim.open_session(raw.task);
        return from_trace(engine::run_unsmooth(*session, chunks, raw.query, opts));
    }
    TeacherRun run;
    std::string clues;
    for (const auto& chunk : chunks) {
        const auto lead = lead_sentence(chunk.text);
        if (!lead.empty()) clues += (clues.empty() ? "" : " ") + lead;
        protocol::ContextualSummary s;
        s.target = raw.query;
        s.clues = clues;
        s.reason = "noted the opening of chunk " + std::to_string(chunk.index);
        engine::truncate_summary(s, opts.chunk_tokens);
        clues = s.clues;
        run.summaries.push_back(std::move(s));
    }
    run.answer = raw.answers.empty() ? std::string() : raw.answers.front();
    return run;
}

RemoteTeacher::RemoteTeacher(backends::RemoteBackendConfig config) : backend_(std::move(config)) {}

TeacherRun RemoteTeacher::run(const RawItem& raw, const std::vector<chunker::Chunk>& chunks, bool early_stop) {
    engine::RunOptions opts;
    opts.early_stop = early_stop;
    opts.chunk_tokens = max_chunk(chunks);
    auto session = backend_.open_session(raw.task);
    return from_trace(engine::run_unsmooth(*session, chunks, raw.query, opts));
}

SftItem build_sr(const RawItem& raw, const std::vector<chunker::Chunk>& chunks, const TeacherRun& run,
                 TeacherKind teacher) {
    SftItem item = base_item(Format::SR, raw, run, teacher);
    item.chunk_tokens = max_chunk(chunks);
    const std::size_t read = std::min(run.summaries.size(), chunks.size());
    for (std::size_t i = 0; i < read; ++i) {
        std::string user = i == 0 ? prompts::smooth_preamble(raw.query) + "\n" + chunks[i].text : chunks[i].text;
        item.turns.push_back({"user", std::move(user)});
        item.turns.push_back({"assistant", protocol::render(run.summaries[i])});
    }
    if (!run.stopped) {
        item.turns.push_back({"user", prompts::answer_prompt()});
        item.turns.push_back({"assistant", protocol::render(closing_summary(run))});
    }
    return item;
}

SftItem build_ur(const RawItem& raw, const std::vector<chunker::Chunk>& chunks, const TeacherRun& run,
                 TeacherKind teacher) {
    SftItem item = base_item(Format::UR, raw, run, teacher);
    item.chunk_tokens = max_chunk(chunks);
    const std::size_t read = std::min(run.summaries.size(), chunks.size());
    const std::string suffix = prompts::unsmooth_suffix(raw.query);
    for (std::size_t i = 0; i < read; ++i) {
        std::string user;
        if (i > 0) user = protocol::render(run.summaries[i - 1]) + "\n";
        user += chunks[i].text + "\n" + suffix;
        item.turns.push_back({"user", std::move(user)});
        item.turns.push_back({"assistant", protocol::render(run.summaries[i])});
    }
    if (!run.stopped) {
        std::string user = read > 0 ? protocol::render(run.summaries[read - 1]) + "\n" : std::string();
        user += prompts::answer_prompt();
        item.turns.push_back({"user", std::move(user)});
        item.turns.push_back({"assistant", protocol::render(closing_summary(run))});
    }
    return item;
}

SftItem build_os(const RawItem& raw, const TeacherRun& run, TeacherKind teacher) {
    SftItem item = base_item(Format::OS, raw, run, teacher);
    item.chunk_tokens = chunker::estimate_tokens(raw.context);
    item.turns.push_back({"user", raw.context + "\n" + prompts::one_step_preamble(raw.query)});
    item.turns.push_back({"assistant", run.answer});
    return item;
}

double CleanThresholds::for_metric(metrics::Metric m) const {
    switch (m) {
        case metrics::Metric::ExactMatch: return exact_match;
        case metrics::Metric::TokenF1: return f1;
        case metrics::Metric::RougeL: return rouge_l;
        case metrics::Metric::EditSim: return edit_sim;
    }
    return 1.0;
}

namespace {

double clean_score(const SftItem& item, metrics::Metric metric) {
    if (metric == metrics::metric_for(item.task)) {
        EvalItem e;
        e.task = item.task;
        e.gold = item.references;
        return metrics::score_item(e, item.final_answer).value;
    }
    double best = 0.0;
    for (const auto& r : item.references) best = std::max(best, metrics::compute(metric, item.final_answer, r));
    return best;
}

void place(Partition& p, SftItem item, double threshold) {
    if (item.kept && item.clean_score < threshold) {
        item.kept = false;
        item.drop_reason = "clean score below threshold";
    }
    (item.kept ? p.kept : p.dropped).push_back(std::move(item));
}

}  // namespace

Partition clean(std::vector<SftItem> items, metrics::Metric metric, double threshold) {
    Partition p;
    for (auto& item : items) {
        if (item.kept) item.clean_score = clean_score(item, metric);
        place(p, std::move(item), threshold);
    }
    return p;
}

Partition clean(std::vector<SftItem> items, const CleanThresholds& thresholds) {
    Partition p;
    for (auto& item : items) {
        const auto metric = metrics::metric_for(item.task);
        if (item.kept) item.clean_score = clean_score(item, metric);
        place(p, std::move(item), thresholds.for_metric(metric));
    }
    return p;
}

namespace {

struct ItemOutput {
    std::optional<SftItem> sr, ur, os;
};

ItemOutput build_one(const RawItem& raw, std::size_t index, Teacher& teacher, const BuildOptions& options) {
    auto want = [&](Format f) {
        return std::find(options.formats.begin(), options.formats.end(), f) != options.formats.end();
    };
    ItemOutput out;
    chunker::ChunkingConfig cfg;
    cfg.max_chunk_tokens = options.chunk_tokens > 0 ? options.chunk_tokens : teacher.chunk_tokens(options.seed, index);

    TeacherRun run;
    std::vector<chunker::Chunk> chunks;
    std::string failure;
    try {
        chunks = chunker::split_hierarchical(raw.context, cfg);
        run = teacher.run(raw, chunks, options.early_stop);
        if (run.summaries.empty()) throw Error(ErrorCode::ProtocolError, "teacher produced no summaries");
        if (want(Format::SR)) out.sr = build_sr(raw, chunks, run, teacher.kind());
        if (want(Format::UR)) out.ur = build_ur(raw, chunks, run, teacher.kind());
        if (want(Format::OS)) out.os = build_os(raw, run, teacher.kind());
    } catch (const Error& e) {
        failure = e.what();
    }
    if (!failure.empty()) {
        auto failed = [&](Format f) {
            SftItem item = base_item(f, raw, run, teacher.kind());
            item.chunk_tokens = cfg.max_chunk_tokens;
            item.kept = false;
            item.drop_reason = failure;
            return item;
        };
        if (want(Format::SR)) out.sr = failed(Format::SR);
        if (want(Format::UR)) out.ur = failed(Format::UR);
        if (want(Format::OS)) out.os = failed(Format::OS);
    }
    return out;
}

json format_report(const Partition& p, std::size_t total) {
    json r;
    r["total"] = total;
    r["kept"] = p.kept.size();
    r["dropped"] = p.dropped.size();
    json dropped = json::array();
    for (const auto& d : p.dropped) dropped.push_back({{"source_id", d.source_id}, {"reason", d.drop_reason}});
    r["dropped_items"] = dropped;
    std::vector<std::size_t> hist(10, 0);
    for (const auto* part : {&p.kept, &p.dropped}) {
        for (const auto& item : *part) {
            const auto bin = std::min<std::size_t>(9, static_cast<std::size_t>(item.clean_score * 10.0));
            ++hist[bin];
        }
    }
    r["score_histogram"] = hist;
    return r;
}

}  // namespace

BuildResult build_dataset(const std::vector<RawItem>& raw, Teacher& teacher, const BuildOptions& options) {
    std::vector<ItemOutput> outputs(raw.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, raw.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < raw.size(); i = next++) {
            try {
                outputs[i] = build_one(raw[i], i, teacher, options);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    BuildResult result;
    result.report["teacher"] = std::string(to_string(teacher.kind()));
    result.report["early_stop"] = options.early_stop;
    result.report["seed"] = options.seed;
    result.report["items"] = raw.size();
    auto collect = [&](Format f, std::vector<SftItem>& dest) {
        std::vector<SftItem> items;
        for (auto& o : outputs) {
            auto& slot = f == Format::SR ? o.sr : f == Format::UR ? o.ur : o.os;
            if (slot) items.push_back(std::move(*slot));
        }
        if (items.empty()) return;
        const std::size_t total = items.size();
        auto part = clean(std::move(items), options.thresholds);
        result.report["formats"][std::string(to_string(f))] = format_report(part, total);
        // Back to source order.
        std::vector<SftItem> merged;
        std::size_t k = 0, d = 0;
        for (const auto& r : raw) {
            if (k < part.kept.size() && part.kept[k].source_id == r.id) {
                merged.push_back(std::move(part.kept[k++]));
            } else if (d < part.dropped.size() && part.dropped[d].source_id == r.id) {
                merged.push_back(std::move(part.dropped[d++]));
            }
        }
        dest = std::move(merged);
    };
    collect(Format::SR, result.sr);
    collect(Format::UR, result.ur);
    collect(Format::OS, result.os);
    return result;
}

void write_dataset(const std::string& dir, const BuildResult& result, const BuildOptions& options) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
    auto write = [&](const std::string& name, const std::string& content) {
        const auto path = (std::filesystem::path(dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
        out << content;
        if (!out) throw Error(ErrorCode::IoError, "write error in " + path);
    };
    for (Format f : options.formats) {
        const auto& items = f == Format::SR ? result.sr : f == Format::UR ? result.ur : result.os;
        std::string body;
        for (const auto& item : items) {
            if (item.kept) body += to_json(item).dump() + "\n";
        }
        write(std::string(to_string(f)) + ".jsonl", body);
    }
    write("report.json", result.report.dump(2) + "\n");
}

}  // namespace smoothread::dataset
