// SPDX-License-Identifier: Apache-2.0
//
// smoothread: chunk, gen, run, sweep, dataset build, eval, cost, report.
#include "smoothread/benchgen.hpp"
#include "smoothread/chunker.hpp"
#include "smoothread/cost_model.hpp"
#include "smoothread/dataset_builder.hpp"
#include "smoothread/error.hpp"
#include "smoothread/harness.hpp"
#include "smoothread/metrics.hpp"
#include "smoothread/presets.hpp"
#include "smoothread/svg.hpp"
#include "smoothread/trace_json.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

using nlohmann::json;
using namespace smoothread;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    std::string out = "-";
    std::string format = "json";
};

std::string read_input(const std::string& path) {
    if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << content;
    if (!out) throw Error(ErrorCode::IoError, "write error in " + path);
}

bool on_off(const std::string& v) { return v == "on"; }

std::string fmt(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

// A single JSON object, or JSONL.
std::vector<EvalItem> read_items(const std::string& path) {
    const std::string body = read_input(path);
    try {
        const json j = json::parse(body);
        if (j.is_object()) return {eval_item_from_json(j)};
        if (j.is_array()) {
            std::vector<EvalItem> items;
            for (const auto& e : j) items.push_back(eval_item_from_json(e));
            return items;
        }
    } catch (const json::exception&) {
    }
    std::vector<EvalItem> items;
    std::istringstream in(body);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            items.push_back(eval_item_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ConfigError, path + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return items;
}

std::size_t resolve_chunk_tokens(std::size_t flag, const std::string& preset) {
    if (flag > 0) return flag;
    if (!preset.empty()) return presets::get(preset).chunk_tokens;
    return presets::kDefaultChunkTokens;
}

struct CostFlags {
    double p0 = backends::SimCost{}.p0;
    double p1 = backends::SimCost{}.p1;
    double d_mult = backends::SimCost{}.d_mult;

    void add(CLI::App* cmd) {
        cmd->add_option("--p0", p0, "simulator seconds per token")->capture_default_str();
        cmd->add_option("--p1", p1, "simulator seconds per token per occupied slot")->capture_default_str();
        cmd->add_option("--d-mult", d_mult, "simulator decode/prefill cost ratio")->capture_default_str();
    }
    backends::SimCost cost() const { return {p0, p1, d_mult}; }
};

// ---------------------------------------------------------------- chunk

struct ChunkCmd {
    std::string input = "-";
    std::size_t max_tokens = 0;
    std::string preset;
    std::string delimiters;

    void run(const Globals& g) const {
        chunker::ChunkingConfig cfg;
        cfg.max_chunk_tokens = resolve_chunk_tokens(max_tokens, preset);
        if (!delimiters.empty()) {
            try {
                cfg.delimiters = json::parse(delimiters).get<std::vector<std::string>>();
            } catch (const json::exception& e) {
                throw Error(ErrorCode::ConfigError, std::string("--delimiters must be a JSON array of strings: ") +
                                                        e.what());
            }
        }
        cfg.validate();
        const auto chunks = chunker::split_hierarchical(read_input(input), cfg);
        if (g.format == "csv") {
            std::string out = "# seed=" + std::to_string(g.seed) + "\nindex,est_tokens,start,end\n";
            for (const auto& c : chunks)
                out += std::to_string(c.index) + "," + std::to_string(c.est_tokens) + "," +
                       std::to_string(c.byte_span.start) + "," + std::to_string(c.byte_span.end) + "\n";
            write_output(g.out, out);
            return;
        }
        json arr = json::array();
        for (const auto& c : chunks)
            arr.push_back({{"index", c.index},
                           {"text", c.text},
                           {"est_tokens", c.est_tokens},
                           {"byte_span", {c.byte_span.start, c.byte_span.end}}});
        write_output(g.out, arr.dump(2) + "\n");
    }
};

// ---------------------------------------------------------------- gen

struct GenNiahCmd {
    std::size_t tokens = 16384;
    std::size_t needles = 1;
    std::vector<std::size_t> offsets;
    std::size_t count = 1;
    std::string haystack;

    void run(const Globals& g) const {
        benchgen::NiahSpec spec;
        spec.context_tokens = tokens;
        spec.num_needles = needles;
        spec.seed = g.seed;
        spec.haystack_path = haystack;
        if (!offsets.empty()) {
            spec.placement = benchgen::Placement::OffsetFromEnd;
            spec.offsets_from_end = offsets;
            if (offsets.size() == 1 && needles > 1) spec.offsets_from_end.assign(needles, offsets.front());
        }
        const auto items = benchgen::gen_niah_suite(spec, count);
        std::string out;
        std::map<std::string, std::size_t> warnings;
        for (const auto& item : items) {
            for (const auto& w : item.meta.at("warnings")) ++warnings[w.get<std::string>()];
            out += to_json(item).dump() + "\n";
        }
        for (const auto& [w, n] : warnings) std::cerr << "warning: " << w << " (" << n << " of " << items.size() << " items)\n";
        write_output(g.out, out);
    }
};

struct GenPassageCmd {
    std::size_t unique = 5;
    std::size_t copies = 1;
    std::size_t count = 1;
    std::string pool;

    void run(const Globals& g) const {
        benchgen::PassageCountSpec spec;
        spec.unique_passages = unique;
        spec.copies = copies;
        if (!pool.empty()) {
            // Paragraphs separated by blank lines.
            const std::string text = read_input(pool);
            std::size_t pos = 0;
            while (pos < text.size()) {
                auto cut = text.find("\n\n", pos);
                std::string para = text.substr(pos, cut == std::string::npos ? std::string::npos : cut - pos);
                while (!para.empty() && (para.back() == '\n' || para.back() == ' ')) para.pop_back();
                while (!para.empty() && para.front() == '\n') para.erase(0, 1);
                if (!para.empty()) spec.pool.push_back(para);
                if (cut == std::string::npos) break;
                pos = cut + 2;
            }
        }
        std::string out;
        for (std::size_t i = 0; i < count; ++i) {
            spec.seed = g.seed + i;
            auto item = benchgen::gen_passage_count(spec);
            item.id = "passage-count-" + std::to_string(g.seed) + "-" + std::to_string(i);
            out += to_json(item).dump() + "\n";
        }
        write_output(g.out, out);
    }
};

// ---------------------------------------------------------------- run

struct RunCmd {
    std::string strategy = "smooth";
    std::string backend = "sim-swa";
    std::size_t window = 4096;
    std::size_t chunk_tokens = 0;
    std::string preset;
    std::string early_stop = "on";
    std::string input;
    std::string trace;
    std::string records;
    std::string endpoint;
    std::string model = "default";
    CostFlags cost;

    void run(const Globals& g) const {
        harness::BackendSpec bs;
        bs.kind = backend;
        bs.window = backend == "sim-swa" ? std::optional<std::size_t>(window) : std::nullopt;
        bs.cost = cost.cost();
        if (backend == "remote") {
            bs.remote = backends::RemoteBackendConfig::from_env();
            if (!endpoint.empty()) bs.remote.endpoint_url = endpoint;
            bs.remote.model_name = model;
        }
        auto be = harness::make_backend(bs);
        harness::RunSpec rs;
        rs.strategy = engine::strategy_from_string(strategy);
        rs.chunk_tokens = resolve_chunk_tokens(chunk_tokens, preset);
        rs.early_stop = on_off(early_stop);

        const auto items = read_items(input);
        if (items.empty()) throw Error(ErrorCode::EmptySuite, "no items in " + input);
        std::vector<harness::ItemRun> runs;
        for (const auto& item : items) runs.push_back(harness::run_item(item, *be, rs, bs.window));

        if (!trace.empty()) {
            if (runs.size() == 1) {
                write_output(trace, engine::to_json(runs.front().trace).dump(2) + "\n");
            } else {
                std::string body;
                for (const auto& r : runs) body += harness::to_json(r).dump() + "\n";
                write_output(trace, body);
            }
        }

        if (!records.empty()) {
            std::string body;
            for (const auto& r : runs) body += harness::to_json(r).dump() + "\n";
            write_output(records, body);
        }

        std::vector<double> scores;
        for (const auto& r : runs) scores.push_back(r.score);
        if (g.format == "csv") {
            std::string out = "# seed=" + std::to_string(g.seed) + "\n";
            out += "item_id,score,chunks_read,chunks_total,peak_mr_tokens,processed_tokens,virtual_time_seconds\n";
            for (const auto& r : runs)
                out += r.item_id + "," + fmt(r.score, 4) + "," + std::to_string(r.trace.chunks_read) + "," +
                       std::to_string(r.trace.chunks_total) + "," + std::to_string(r.trace.peak_mr_tokens) + "," +
                       std::to_string(r.trace.processed_tokens()) + "," + fmt(r.trace.virtual_time_seconds, 6) + "\n";
            write_output(g.out, out);
            return;
        }
        json j;
        j["seed"] = g.seed;
        j["strategy"] = strategy;
        j["backend"] = backend;
        j["chunk_tokens"] = rs.chunk_tokens;
        j["early_stop"] = rs.early_stop;
        j["score"] = metrics::score_suite(scores);
        j["records"] = json::array();
        for (const auto& r : runs) {
            json rec = harness::to_json(r);
            rec["trace"].erase("steps");
            rec["trace"].erase("summaries");
            j["records"].push_back(rec);
        }
        write_output(g.out, j.dump(2) + "\n");
    }
};

// ---------------------------------------------------------------- sweep

std::optional<harness::Ratio> parse_ratio(const std::string& s) {
    if (s.empty()) return std::nullopt;
    const auto colon = s.find(':');
    try {
        if (colon == std::string::npos) throw std::invalid_argument("missing ':'");
        harness::Ratio r;
        r.chunk = std::stoul(s.substr(0, colon));
        r.window = std::stoul(s.substr(colon + 1));
        return r;
    } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError, "--ratio must look like C:W, e.g. 1:2");
    }
}

struct SweepCmd {
    std::string suite;
    std::vector<std::size_t> windows;
    std::vector<std::size_t> chunks;
    std::string ratio;
    std::string strategy = "smooth";
    std::string early_stop = "on";
    std::size_t workers = 1;
    std::string svg_prefix;
    CostFlags cost;

    void run(const Globals& g) const {
        harness::SweepConfig cfg;
        cfg.windows = windows;
        cfg.chunks = chunks;
        cfg.ratio = parse_ratio(ratio);
        cfg.strategy = engine::strategy_from_string(strategy);
        cfg.early_stop = on_off(early_stop);
        cfg.seed = g.seed;
        cfg.workers = workers;
        cfg.cost = cost.cost();
        cfg.validate();
        const auto items = read_items(suite);
        const auto result = harness::run_sweep(cfg, items);
        write_output(g.out, g.format == "csv" ? harness::to_csv(result) : harness::to_json(result).dump(2) + "\n");

        if (svg_prefix.empty()) return;
        if (result.ratio_mode) {
            std::vector<double> xs, ts, acc;
            for (const auto& c : result.cells) {
                xs.push_back(static_cast<double>(c.chunk));
                ts.push_back(c.virtual_time);
                acc.push_back(c.accuracy * 100.0);
            }
            write_output(svg_prefix + "_time.svg",
                         svg::line_chart("Virtual time at C:W = " + ratio, "chunk size C", "seconds", xs,
                                         {{"total virtual time", ts}}));
            write_output(svg_prefix + "_accuracy.svg",
                         svg::line_chart("Accuracy at C:W = " + ratio, "chunk size C", "accuracy (%)", xs,
                                         {{"accuracy", acc}}));
            return;
        }
        std::vector<std::string> rows, cols;
        for (auto w : result.windows) rows.push_back("W=" + std::to_string(w));
        for (auto c : result.chunks) cols.push_back("C=" + std::to_string(c));
        std::vector<std::vector<double>> acc(rows.size()), ts(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < cols.size(); ++c) {
                acc[r].push_back(result.at(r, c).accuracy * 100.0);
                ts[r].push_back(result.at(r, c).virtual_time);
            }
        }
        write_output(svg_prefix + "_accuracy.svg", svg::heatmap("Accuracy (%)", rows, cols, acc));
        write_output(svg_prefix + "_time.svg", svg::heatmap("Virtual time (s)", rows, cols, ts));
    }
};

// ---------------------------------------------------------------- dataset build

struct DatasetCmd {
    std::string raw;
    std::string teacher = "rule";
    std::vector<std::string> formats = {"sr", "ur", "os"};
    std::string early_stop = "on";
    double clean_threshold = -1.0;
    std::size_t workers = 1;
    std::size_t chunk_tokens = 0;
    std::string endpoint;
    std::string model = "default";

    void run(const Globals& g) const {
        if (g.out == "-") throw Error(ErrorCode::ConfigError, "dataset build needs --out <directory>");
        dataset::BuildOptions opts;
        opts.formats.clear();
        for (const auto& f : formats) opts.formats.push_back(dataset::format_from_string(f));
        opts.early_stop = on_off(early_stop);
        opts.seed = g.seed;
        opts.workers = workers;
        opts.chunk_tokens = chunk_tokens;
        if (clean_threshold >= 0.0) opts.thresholds = {clean_threshold, clean_threshold, clean_threshold, clean_threshold};

        const auto loaded = benchgen::load_jsonl(raw);
        for (const auto& e : loaded.errors)
            std::cerr << "warning: " << raw << ":" << e.line << ": " << e.message << "\n";
        std::vector<dataset::RawItem> items;
        for (const auto& e : loaded.items) items.push_back(dataset::raw_from_eval(e));

        std::unique_ptr<dataset::Teacher> t;
        if (teacher == "rule") {
            t = std::make_unique<dataset::RuleTeacher>();
        } else if (teacher == "remote") {
            auto cfg = backends::RemoteBackendConfig::from_env();
            if (!endpoint.empty()) cfg.endpoint_url = endpoint;
            cfg.model_name = model;
            t = std::make_unique<dataset::RemoteTeacher>(cfg);
        } else {
            throw Error(ErrorCode::ConfigError, "unknown teacher '" + teacher + "'");
        }
        auto result = dataset::build_dataset(items, *t, opts);
        result.report["load_errors"] = loaded.errors.size();
        dataset::write_dataset(g.out, result, opts);
        std::cerr << "wrote " << g.out << "\n";
    }
};

// ---------------------------------------------------------------- eval

struct EvalCmd {
    std::string items_path;
    std::string answers_path;

    void run(const Globals& g) const {
        const auto items = read_items(items_path);
        std::map<std::string, std::string> answers;
        std::istringstream in(read_input(answers_path));
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                const json j = json::parse(line);
                answers[j.at("id").get<std::string>()] = j.at("answer").get<std::string>();
            } catch (const json::exception& e) {
                throw Error(ErrorCode::ConfigError, "bad answer line: " + std::string(e.what()));
            }
        }
        std::vector<double> scores;
        json per_item = json::array();
        std::string csv = "# seed=" + std::to_string(g.seed) + "\nid,task,metric,score\n";
        for (const auto& item : items) {
            auto it = answers.find(item.id);
            const std::string answer = it == answers.end() ? std::string() : it->second;
            const auto r = metrics::score_item(item, answer);
            scores.push_back(r.value);
            per_item.push_back({{"id", item.id},
                                {"task", std::string(to_string(item.task))},
                                {"metric", std::string(metrics::to_string(r.name))},
                                {"score", r.value},
                                {"answered", it != answers.end()}});
            csv += item.id + "," + std::string(to_string(item.task)) + "," + std::string(metrics::to_string(r.name)) +
                   "," + fmt(r.value, 4) + "\n";
        }
        const double suite = metrics::score_suite(scores);
        if (g.format == "csv") {
            csv += "ALL,,," + fmt(suite, 2) + "\n";
            write_output(g.out, csv);
            return;
        }
        json j;
        j["seed"] = g.seed;
        j["items"] = per_item;
        j["score"] = suite;
        write_output(g.out, j.dump(2) + "\n");
    }
};

// ---------------------------------------------------------------- cost

struct CostCmd {
    std::string params_file;
    cost_model::CostParams p{1.0e-4, 12.0, 64.0, 2048.0, 0.0, 1.0e-9, 1.0e-4};
    std::vector<double> lengths;
    std::string svg;

    void run(const Globals& g) const {
        cost_model::CostParams params = p;
        if (!params_file.empty()) {
            try {
                const json j = json::parse(read_input(params_file));
                params.p_r = j.value("p_r", params.p_r);
                params.beta = j.value("beta", params.beta);
                params.g = j.value("g", params.g);
                params.c = j.value("c", params.c);
                params.quad_a = j.value("quad_a", params.quad_a);
                params.quad_b = j.value("quad_b", params.quad_b);
            } catch (const json::exception& e) {
                throw Error(ErrorCode::ConfigError, std::string("bad params file: ") + e.what());
            }
        }
        std::vector<double> ls = lengths;
        if (ls.empty()) {
            for (double l = 1024; l <= 262144; l *= 2) ls.push_back(l);
        }
        const auto rows = cost_model::cost_table(params, ls);
        const auto cross = cost_model::crossover_length(params);
        if (g.format == "csv") {
            std::string out = "# seed=" + std::to_string(g.seed) +
                              " crossover=" + (cross ? fmt(*cross, 1) : std::string("none")) +
                              "\nl,t_recurrent_sr,t_self_attn_os\n";
            for (const auto& r : rows) out += fmt(r.l, 0) + "," + fmt(r.t_sr, 6) + "," + fmt(r.t_os, 6) + "\n";
            write_output(g.out, out);
        } else {
            json j;
            j["seed"] = g.seed;
            j["params"] = {{"p_r", params.p_r}, {"beta", params.beta}, {"g", params.g},
                           {"c", params.c},     {"quad_a", params.quad_a}, {"quad_b", params.quad_b}};
            j["crossover_length"] = cross ? json(*cross) : json(nullptr);
            j["rows"] = json::array();
            for (const auto& r : rows) j["rows"].push_back({{"l", r.l}, {"t_recurrent_sr", r.t_sr}, {"t_self_attn_os", r.t_os}});
            write_output(g.out, j.dump(2) + "\n");
        }
        if (!svg.empty()) {
            std::vector<double> xs, sr, os;
            for (const auto& r : rows) {
                xs.push_back(r.l);
                sr.push_back(r.t_sr);
                os.push_back(r.t_os);
            }
            write_output(svg, svg::line_chart("Inference time vs context length", "context tokens l", "seconds", xs,
                                              {{"recurrent, smooth reading", sr}, {"self-attention, one step", os}}));
        }
    }
};

// ---------------------------------------------------------------- report

struct ReportCmd {
    std::vector<std::string> runs;

    void run(const Globals& g) const {
        std::vector<harness::ItemRun> records;
        for (const auto& path : runs) {
            std::istringstream in(read_input(path));
            std::string line;
            while (std::getline(in, line)) {
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                try {
                    records.push_back(harness::item_run_from_json(json::parse(line)));
                } catch (const json::exception& e) {
                    throw Error(ErrorCode::ConfigError, path + ": " + e.what());
                }
            }
        }
        const auto rep = harness::report(records, g.seed);
        write_output(g.out, g.format == "csv" ? harness::report_csv(rep) : rep.dump(2) + "\n");
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smooth Reading experiments: chunking, benchmarks, inference runs, datasets, metrics, cost model"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "seed for every random choice")->capture_default_str();
    app.add_option("--out", g.out, "output file or directory ('-' = stdout)")->capture_default_str();
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    ChunkCmd chunk;
    auto* chunk_cmd = app.add_subcommand("chunk", "split text into chunks");
    chunk_cmd->add_option("--input", chunk.input, "UTF-8 text file ('-' = stdin)")->capture_default_str();
    chunk_cmd->add_option("--max-tokens", chunk.max_tokens, "chunk budget in estimated tokens");
    chunk_cmd->add_option("--preset", chunk.preset, "named chunk-size preset");
    chunk_cmd->add_option("--delimiters", chunk.delimiters, "JSON array overriding the delimiter list");

    auto* gen_cmd = app.add_subcommand("gen", "generate evaluation items");
    gen_cmd->require_subcommand(1);
    GenNiahCmd niah;
    auto* niah_cmd = gen_cmd->add_subcommand("niah", "needle-in-a-haystack items");
    niah_cmd->add_option("--tokens", niah.tokens, "context length in estimated tokens")->capture_default_str();
    niah_cmd->add_option("--needles", niah.needles, "needles per item")->capture_default_str();
    niah_cmd->add_option("--offset-from-end", niah.offsets, "token offsets of the needles from the end");
    niah_cmd->add_option("--count", niah.count, "number of items")->capture_default_str();
    niah_cmd->add_option("--haystack", niah.haystack, "filler text file (default: bundled essays)");
    GenPassageCmd passage;
    auto* passage_cmd = gen_cmd->add_subcommand("passage-count", "passage counting items");
    passage_cmd->add_option("--unique", passage.unique, "distinct passages per item")->capture_default_str();
    passage_cmd->add_option("--copies", passage.copies, "occurrences of every passage")->capture_default_str();
    passage_cmd->add_option("--count", passage.count, "number of items")->capture_default_str();
    passage_cmd->add_option("--pool", passage.pool, "text file of blank-line separated passages");

    RunCmd run;
    auto* run_cmd = app.add_subcommand("run", "run one strategy over items");
    run_cmd->add_option("--strategy", run.strategy)->check(CLI::IsMember({"one-step", "unsmooth", "smooth"}))
        ->capture_default_str();
    run_cmd->add_option("--backend", run.backend)->check(CLI::IsMember({"sim-swa", "sim-attn", "remote"}))
        ->capture_default_str();
    run_cmd->add_option("--window", run.window, "sliding window W in tokens (sim-swa)")->capture_default_str();
    run_cmd->add_option("--chunk-tokens", run.chunk_tokens, "chunk size c");
    run_cmd->add_option("--preset", run.preset, "named chunk-size preset");
    run_cmd->add_option("--early-stop", run.early_stop)->check(CLI::IsMember({"on", "off"}))->capture_default_str();
    run_cmd->add_option("--input", run.input, "item JSON or items JSONL")->required();
    run_cmd->add_option("--trace", run.trace, "write the trace (one item) or run records (JSONL) here");
    run_cmd->add_option("--records", run.records, "write run records (JSONL, input of report) here");
    run_cmd->add_option("--endpoint", run.endpoint, "chat-completions base URL (default $ENDPOINT_URL)");
    run_cmd->add_option("--model", run.model, "remote model name")->capture_default_str();
    run.cost.add(run_cmd);

    SweepCmd sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "window x chunk sweep on the sliding-window simulator");
    sweep_cmd->add_option("--suite", sweep.suite, "items JSONL")->required();
    sweep_cmd->add_option("--windows", sweep.windows, "window sizes (rows)")->delimiter(',');
    sweep_cmd->add_option("--chunks", sweep.chunks, "chunk sizes (columns)")->delimiter(',')->required();
    sweep_cmd->add_option("--ratio", sweep.ratio, "fixed C:W ratio instead of a window list, e.g. 1:2");
    sweep_cmd->add_option("--strategy", sweep.strategy)->check(CLI::IsMember({"one-step", "unsmooth", "smooth"}))
        ->capture_default_str();
    sweep_cmd->add_option("--early-stop", sweep.early_stop)->check(CLI::IsMember({"on", "off"}))->capture_default_str();
    sweep_cmd->add_option("--workers", sweep.workers, "parallel cells")->capture_default_str();
    sweep_cmd->add_option("--svg", sweep.svg_prefix, "write <prefix>_accuracy.svg and <prefix>_time.svg");
    sweep.cost.add(sweep_cmd);

    auto* dataset_cmd = app.add_subcommand("dataset", "SFT dataset construction");
    dataset_cmd->require_subcommand(1);
    DatasetCmd build;
    auto* build_cmd = dataset_cmd->add_subcommand("build", "build SR/UR/OS data from raw items");
    build_cmd->add_option("--raw", build.raw, "raw items JSONL (context, query, gold, task)")->required();
    build_cmd->add_option("--teacher", build.teacher)->check(CLI::IsMember({"rule", "remote"}))->capture_default_str();
    build_cmd->add_option("--formats", build.formats)->delimiter(',')->check(CLI::IsMember({"sr", "ur", "os"}))
        ->capture_default_str();
    build_cmd->add_option("--early-stop", build.early_stop)->check(CLI::IsMember({"on", "off"}))->capture_default_str();
    build_cmd->add_option("--clean-threshold", build.clean_threshold, "one threshold for every metric");
    build_cmd->add_option("--workers", build.workers, "items in flight")->capture_default_str();
    build_cmd->add_option("--chunk-tokens", build.chunk_tokens, "fixed chunk size (default: teacher's choice)");
    build_cmd->add_option("--endpoint", build.endpoint, "chat-completions base URL (default $ENDPOINT_URL)");
    build_cmd->add_option("--model", build.model, "remote model name")->capture_default_str();

    EvalCmd eval;
    auto* eval_cmd = app.add_subcommand("eval", "score answers against items");
    eval_cmd->add_option("--items", eval.items_path, "items JSONL")->required();
    eval_cmd->add_option("--answers", eval.answers_path, "answers JSONL: {\"id\", \"answer\"}")->required();

    CostCmd cost;
    auto* cost_cmd = app.add_subcommand("cost", "analytic inference-time model");
    cost_cmd->add_option("--params", cost.params_file, "JSON file with p_r, beta, g, c, quad_a, quad_b");
    cost_cmd->add_option("--p-r", cost.p.p_r)->capture_default_str();
    cost_cmd->add_option("--beta", cost.p.beta)->capture_default_str();
    cost_cmd->add_option("--g", cost.p.g)->capture_default_str();
    cost_cmd->add_option("--c", cost.p.c)->capture_default_str();
    cost_cmd->add_option("--quad-a", cost.p.quad_a)->capture_default_str();
    cost_cmd->add_option("--quad-b", cost.p.quad_b)->capture_default_str();
    cost_cmd->add_option("--lengths", cost.lengths, "context lengths to tabulate")->delimiter(',');
    cost_cmd->add_option("--svg", cost.svg, "write a plot here");

    ReportCmd report;
    auto* report_cmd = app.add_subcommand("report", "aggregate run records");
    report_cmd->add_option("--runs", report.runs, "run-record JSONL files (from run --records)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*chunk_cmd) chunk.run(g);
        else if (*niah_cmd) niah.run(g);
        else if (*passage_cmd) passage.run(g);
        else if (*run_cmd) run.run(g);
        else if (*sweep_cmd) sweep.run(g);
        else if (*build_cmd) build.run(g);
        else if (*eval_cmd) eval.run(g);
        else if (*cost_cmd) cost.run(g);
        else if (*report_cmd) report.run(g);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
