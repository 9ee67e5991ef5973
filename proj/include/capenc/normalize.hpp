#pragma once

// Per-task normalization of raw performances into gaps to the best result:
// delta = best - value, then divided by the largest gap on that task, so 0 is
// the state of the art and 1 the worst reported result.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "capenc/results_db.hpp"

namespace capenc {

struct DeltaEntry {
    std::size_t model = 0;  // index into DeltaMatrix::models
    std::size_t task = 0;   // index into DeltaMatrix::tasks
    double gap = 0.0;       // best - value, in metric units
    double delta = 0.0;     // gap / max gap on the task, in [0, 1]
};

struct TaskStats {
    double best_value = 0.0;
    double max_gap = 0.0;
    bool degenerate = false;  // every observed value equal; all deltas set to 0
};

struct DeltaMatrix {
    std::vector<ModelKey> models;
    std::vector<TaskKey> tasks;
    std::vector<TaskStats> task_stats;  // parallel to tasks
    std::vector<DeltaEntry> entries;    // same order as the source records

    std::optional<std::size_t> find_model(const ModelKey& key) const;
    std::optional<std::size_t> find_task(const TaskKey& key) const;
    std::optional<std::size_t> find_model_label(const std::string& label) const;
    std::optional<std::size_t> find_task_label(const std::string& label) const;

    std::vector<std::string> model_labels() const;
    std::vector<std::string> task_labels() const;

    /// Same model/task lists and stats, restricted to the given entry indices.
    DeltaMatrix subset(const std::vector<std::size_t>& entry_indices) const;
};

/// Requires an aggregated db. Tasks whose values are all equal are flagged
/// degenerate and get delta 0.
DeltaMatrix normalize(const ResultsDb& db);

struct Denormalized {
    double value = 0.0;
    bool extrapolated = false;  // delta_hat outside [0, 1]
};

/// Maps a predicted delta back to metric units: best - delta_hat * max_gap.
/// Throws on unknown or degenerate tasks.
Denormalized denormalize(double delta_hat, const TaskKey& task, const DeltaMatrix& matrix);
Denormalized denormalize(double delta_hat, const TaskStats& stats);

/// Dense view: one row per model, one column per task label, empty cells for
/// unobserved pairs.
std::string export_delta_csv(const DeltaMatrix& matrix);

}  // namespace capenc
