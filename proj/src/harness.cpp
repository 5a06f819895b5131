// SPDX-License-Identifier: Apache-2.0
#include "smoothread/harness.hpp"

#include "smoothread/chunker.hpp"
#include "smoothread/error.hpp"
#include "smoothread/metrics.hpp"
#include "smoothread/trace_json.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

namespace smoothread::harness {

using nlohmann::json;

std::unique_ptr<backends::Backend> make_backend(const BackendSpec& spec) {
    if (spec.kind == "sim-swa") {
        if (!spec.window) throw Error(ErrorCode::ConfigError, "sim-swa needs a window size");
        return std::make_unique<backends::SimBackend>(spec.window, spec.cost);
    }
    if (spec.kind == "sim-attn") return std::make_unique<backends::SimBackend>(std::nullopt, spec.cost);
    if (spec.kind == "remote") return std::make_unique<backends::RemoteBackend>(spec.remote);
    throw Error(ErrorCode::ConfigError, "unknown backend '" + spec.kind + "'");
}

ItemRun run_item(const EvalItem& item, backends::Backend& backend, const RunSpec& spec,
                 std::optional<std::size_t> window) {
    auto session = backend.open_session(item.task);
    std::vector<chunker::Chunk> chunks;
    if (spec.strategy != engine::Strategy::OneStep) {
        chunker::ChunkingConfig cfg;
        cfg.max_chunk_tokens = spec.chunk_tokens;
        chunks = chunker::split_hierarchical(item.context, cfg);
    }
    engine::RunOptions opts;
    opts.early_stop = spec.early_stop;
    opts.chunk_tokens = spec.chunk_tokens;
    ItemRun run;
    run.item_id = item.id;
    run.task = item.task;
    run.window = window;
    run.trace = engine::run(spec.strategy, *session, item.context, chunks, item.query, opts);
    run.score = metrics::score_item(item, run.trace.answer).value;
    return run;
}

json to_json(const ItemRun& run) {
    json j;
    j["item_id"] = run.item_id;
    j["task"] = std::string(to_string(run.task));
    j["score"] = run.score;
    j["window"] = run.window ? json(*run.window) : json(nullptr);
    j["trace"] = engine::to_json(run.trace);
    return j;
}

ItemRun item_run_from_json(const json& j) {
    try {
        ItemRun r;
        r.item_id = j.at("item_id").get<std::string>();
        const auto task = task_from_string(j.at("task").get<std::string>());
        if (!task) throw Error(ErrorCode::ConfigError, "unknown task in run record");
        r.task = *task;
        r.score = j.at("score").get<double>();
        if (!j.at("window").is_null()) r.window = j.at("window").get<std::size_t>();
        r.trace = engine::trace_from_json(j.at("trace"));
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("bad run record: ") + e.what());
    }
}

void SweepConfig::validate() const {
    if (chunks.empty()) throw Error(ErrorCode::ConfigError, "sweep needs at least one chunk size");
    if (ratio) {
        if (!windows.empty())
            throw Error(ErrorCode::ConfigError, "ratio mode and an explicit window list are mutually exclusive");
        if (ratio->chunk == 0 || ratio->window == 0) throw Error(ErrorCode::ConfigError, "ratio terms must be positive");
    } else if (windows.empty()) {
        throw Error(ErrorCode::ConfigError, "sweep needs at least one window size");
    }
    for (auto v : windows) {
        if (v == 0) throw Error(ErrorCode::ConfigError, "window sizes must be positive");
    }
    for (auto v : chunks) {
        if (v == 0) throw Error(ErrorCode::ConfigError, "chunk sizes must be positive");
    }
    if (workers == 0) throw Error(ErrorCode::ConfigError, "workers must be positive");
}

const SweepCell& SweepResult::at(std::size_t row, std::size_t col) const {
    if (ratio_mode) return cells.at(col);
    return cells.at(row * chunks.size() + col);
}

SweepResult run_sweep(const SweepConfig& config, const std::vector<EvalItem>& items) {
    config.validate();
    if (items.empty()) throw Error(ErrorCode::EmptySuite, "sweep suite has no items");

    SweepResult result;
    result.seed = config.seed;
    result.chunks = config.chunks;
    result.ratio_mode = config.ratio.has_value();
    if (config.ratio) {
        for (auto c : config.chunks) {
            const std::size_t w = c * config.ratio->window / config.ratio->chunk;
            if (w == 0) throw Error(ErrorCode::ConfigError, "ratio gives a zero window for chunk " + std::to_string(c));
            result.windows.push_back(w);
            result.cells.push_back({w, c});
        }
    } else {
        result.windows = config.windows;
        for (auto w : config.windows) {
            for (auto c : config.chunks) result.cells.push_back({w, c});
        }
    }

    // Chunk lists depend on C only; share them across windows.
    std::map<std::size_t, std::vector<std::vector<chunker::Chunk>>> chunk_cache;
    for (auto c : config.chunks) {
        auto& lists = chunk_cache[c];
        if (!lists.empty()) continue;
        chunker::ChunkingConfig cfg;
        cfg.max_chunk_tokens = c;
        for (const auto& item : items) lists.push_back(chunker::split_hierarchical(item.context, cfg));
    }

    auto run_cell = [&](SweepCell& cell) {
        backends::SimBackend backend(cell.window, config.cost);
        const auto& lists = chunk_cache.at(cell.chunk);
        engine::RunOptions opts;
        opts.early_stop = config.early_stop;
        opts.chunk_tokens = cell.chunk;
        double score = 0.0, tokens = 0.0;
        for (std::size_t i = 0; i < items.size(); ++i) {
            auto session = backend.open_session(items[i].task);
            const auto trace =
                engine::run(config.strategy, *session, items[i].context, lists[i], items[i].query, opts);
            score += metrics::score_item(items[i], trace.answer).value;
            tokens += static_cast<double>(trace.processed_tokens());
            cell.virtual_time += trace.virtual_time_seconds;
        }
        cell.items = items.size();
        cell.accuracy = score / static_cast<double>(items.size());
        cell.mean_processed_tokens = tokens / static_cast<double>(items.size());
    };

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < result.cells.size(); i = next++) {
            try {
                run_cell(result.cells[i]);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min(config.workers, result.cells.size());
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    return result;
}

json to_json(const SweepResult& r) {
    json j;
    j["seed"] = r.seed;
    j["mode"] = r.ratio_mode ? "ratio" : "grid";
    j["windows"] = r.windows;
    j["chunks"] = r.chunks;
    if (r.ratio_mode) {
        json acc = json::array(), time = json::array(), tokens = json::array();
        for (const auto& c : r.cells) {
            acc.push_back(c.accuracy);
            time.push_back(c.virtual_time);
            tokens.push_back(c.mean_processed_tokens);
        }
        j["accuracy"] = acc;
        j["virtual_time"] = time;
        j["mean_processed_tokens"] = tokens;
    } else {
        json acc = json::array(), time = json::array(), tokens = json::array();
        for (std::size_t row = 0; row < r.windows.size(); ++row) {
            json a = json::array(), t = json::array(), k = json::array();
            for (std::size_t col = 0; col < r.chunks.size(); ++col) {
                a.push_back(r.at(row, col).accuracy);
                t.push_back(r.at(row, col).virtual_time);
                k.push_back(r.at(row, col).mean_processed_tokens);
            }
            acc.push_back(a);
            time.push_back(t);
            tokens.push_back(k);
        }
        j["accuracy"] = acc;
        j["virtual_time"] = time;
        j["mean_processed_tokens"] = tokens;
    }
    j["items"] = r.cells.empty() ? 0 : r.cells.front().items;
    return j;
}

namespace {

std::string fmt(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

}  // namespace

std::string to_csv(const SweepResult& r) {
    std::ostringstream out;
    out << "# seed=" << r.seed << "\n";
    out << "window,chunk,accuracy,virtual_time_seconds,mean_processed_tokens,items\n";
    for (const auto& c : r.cells) {
        out << c.window << ',' << c.chunk << ',' << fmt(c.accuracy, 4) << ',' << fmt(c.virtual_time, 6) << ','
            << fmt(c.mean_processed_tokens, 1) << ',' << c.items << '\n';
    }
    return out.str();
}

json report(const std::vector<ItemRun>& runs, std::uint64_t seed) {
    if (runs.empty()) throw Error(ErrorCode::EmptyReport, "no run records to report");
    using Key = std::tuple<std::string, std::string, long long, std::size_t, bool>;
    struct Group {
        std::vector<double> scores;
        double time = 0.0;
        double tokens = 0.0;
        std::size_t peak_mr = 0;
        std::map<std::size_t, std::size_t> chunks_read;
    };
    std::map<Key, Group> groups;
    for (const auto& r : runs) {
        const Key key{std::string(engine::to_string(r.trace.strategy)), r.trace.backend,
                      r.window ? static_cast<long long>(*r.window) : -1LL, r.trace.chunk_tokens, r.trace.early_stop};
        auto& g = groups[key];
        g.scores.push_back(r.score);
        g.time += r.trace.virtual_time_seconds;
        g.tokens += static_cast<double>(r.trace.processed_tokens());
        g.peak_mr = std::max(g.peak_mr, r.trace.peak_mr_tokens);
        ++g.chunks_read[r.trace.chunks_read];
    }
    json j;
    j["seed"] = seed;
    j["groups"] = json::array();
    for (const auto& [key, g] : groups) {
        json row;
        row["strategy"] = std::get<0>(key);
        row["backend"] = std::get<1>(key);
        row["window"] = std::get<2>(key) < 0 ? json(nullptr) : json(std::get<2>(key));
        row["chunk_tokens"] = std::get<3>(key);
        row["early_stop"] = std::get<4>(key);
        row["items"] = g.scores.size();
        row["score"] = metrics::score_suite(g.scores);
        row["virtual_time_seconds"] = g.time;
        row["mean_processed_tokens"] = g.tokens / static_cast<double>(g.scores.size());
        row["peak_mr_tokens"] = g.peak_mr;
        json hist = json::object();
        for (const auto& [read, count] : g.chunks_read) hist[std::to_string(read)] = count;
        row["chunks_read_histogram"] = hist;
        j["groups"].push_back(row);
    }
    return j;
}

std::string report_csv(const json& rep) {
    std::ostringstream out;
    out << "# seed=" << rep.at("seed").get<std::uint64_t>() << "\n";
    out << "strategy,backend,window,chunk_tokens,early_stop,items,score,virtual_time_seconds,mean_processed_tokens,"
           "peak_mr_tokens,chunks_read_histogram\n";
    for (const auto& g : rep.at("groups")) {
        std::string hist;
        for (const auto& [read, count] : g.at("chunks_read_histogram").items()) {
            hist += (hist.empty() ? "" : " ") + read + ":" + std::to_string(count.get<std::size_t>());
        }
        out << g.at("strategy").get<std::string>() << ',' << g.at("backend").get<std::string>() << ','
            << (g.at("window").is_null() ? std::string() : std::to_string(g.at("window").get<long long>())) << ','
            << g.at("chunk_tokens").get<std::size_t>() << ',' << (g.at("early_stop").get<bool>() ? "on" : "off")
            << ',' << g.at("items").get<std::size_t>() << ',' << fmt(g.at("score").get<double>(), 2) << ','
            << fmt(g.at("virtual_time_seconds").get<double>(), 6) << ','
            << fmt(g.at("mean_processed_tokens").get<double>(), 1) << ',' << g.at("peak_mr_tokens").get<std::size_t>()
            << ',' << hist << '\n';
    }
    return out.str();
}

}  // namespace smoothread::harness
