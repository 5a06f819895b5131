// SPDX-License-Identifier: Apache-2.0
//
// Running evaluation items through a backend, (W, C) sweeps over the
// sliding-window simulator, and aggregate reports over run records.
#pragma once

#include "smoothread/engine.hpp"
#include "smoothread/eval_item.hpp"
#include "smoothread/remote_backend.hpp"
#include "smoothread/sim_backend.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace smoothread::harness {

struct BackendSpec {
    std::string kind = "sim-swa";  // "sim-swa" | "sim-attn" | "remote"
    std::optional<std::size_t> window = 4096;
    backends::SimCost cost{};
    backends::RemoteBackendConfig remote{};
};

// Throws ConfigError for an unknown kind or a sim-swa spec without a window.
std::unique_ptr<backends::Backend> make_backend(const BackendSpec& spec);

struct RunSpec {
    engine::Strategy strategy = engine::Strategy::Smooth;
    std::size_t chunk_tokens = 1024;
    bool early_stop = true;
};

struct ItemRun {
    std::string item_id;
    Task task = Task::NeedleRetrieval;
    double score = 0.0;
    std::optional<std::size_t> window;
    engine::InferenceTrace trace;
};

// Chunks the item's context with `spec.chunk_tokens`, runs the strategy on a
// fresh session and scores the answer.
ItemRun run_item(const EvalItem& item, backends::Backend& backend, const RunSpec& spec,
                 std::optional<std::size_t> window = std::nullopt);

nlohmann::json to_json(const ItemRun& run);
ItemRun item_run_from_json(const nlohmann::json& j);

struct Ratio {
    std::size_t chunk = 1;
    std::size_t window = 2;
};

struct SweepConfig {
    std::vector<std::size_t> windows;
    std::vector<std::size_t> chunks;
    std::optional<Ratio> ratio;  // C:W; windows then follow from chunks
    engine::Strategy strategy = engine::Strategy::Smooth;
    bool early_stop = true;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    backends::SimCost cost{};

    // Throws ConfigError when the grid is empty, has zero sizes, or mixes an
    // explicit window list with ratio mode.
    void validate() const;
};

struct SweepCell {
    std::size_t window = 0;
    std::size_t chunk = 0;
    double accuracy = 0.0;          // mean item score in [0, 1]
    double virtual_time = 0.0;      // summed over items
    double mean_processed_tokens = 0.0;
    std::size_t items = 0;
};

struct SweepResult {
    bool ratio_mode = false;
    std::vector<std::size_t> windows;  // rows; in ratio mode one per chunk size
    std::vector<std::size_t> chunks;   // columns
    std::vector<SweepCell> cells;      // row-major; in ratio mode cells[i] pairs windows[i] with chunks[i]
    std::uint64_t seed = 0;

    const SweepCell& at(std::size_t row, std::size_t col) const;
};

// Throws ConfigError (invalid grid) or EmptySuite (no items).
SweepResult run_sweep(const SweepConfig& config, const std::vector<EvalItem>& items);

nlohmann::json to_json(const SweepResult& result);
std::string to_csv(const SweepResult& result);

// Groups run records by (strategy, backend, window, chunk_tokens, early_stop)
// and reports mean score (x100), summed virtual time, mean processed tokens,
// peak MR and the chunks_read histogram. Throws EmptyReport when empty.
nlohmann::json report(const std::vector<ItemRun>& runs, std::uint64_t seed);
std::string report_csv(const nlohmann::json& report);

}  // namespace smoothread::harness
