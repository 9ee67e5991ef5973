#include "capenc/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "capenc/error.hpp"
#include "capenc/text.hpp"

namespace capenc {

namespace {

// Smallest k <= 9 such that every value is a k-decimal number up to
// rounding of its binary representation. Literature values are decimals, so
// gaps computed on the scaled integers are exact (94.1 - 89.7 gives 4.4, not
// 4.3999999999999915).
std::optional<int> decimal_scale(const std::vector<double>& values) {
    double scale = 1.0;
    for (int k = 0; k <= 9; ++k, scale *= 10.0) {
        bool ok = true;
        for (double v : values) {
            const double scaled = v * scale;
            if (std::abs(scaled) > 0x1.0p52 ||
                std::abs(scaled - std::nearbyint(scaled)) > 8.0 * 0x1.0p-52 * std::abs(scaled)) {
                ok = false;
                break;
            }
        }
        if (ok) return k;
    }
    return std::nullopt;
}

template <typename Key>
std::optional<std::size_t> index_of(const std::vector<Key>& keys, const Key& key) {
    const auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) return std::nullopt;
    return static_cast<std::size_t>(it - keys.begin());
}

template <typename Key>
std::optional<std::size_t> index_of_label(const std::vector<Key>& keys, const std::string& label) {
    for (std::size_t i = 0; i < keys.size(); ++i)
        if (keys[i].label() == label) return i;
    return std::nullopt;
}

}  // namespace

std::optional<std::size_t> DeltaMatrix::find_model(const ModelKey& key) const {
    return index_of(models, key);
}
std::optional<std::size_t> DeltaMatrix::find_task(const TaskKey& key) const {
    return index_of(tasks, key);
}
std::optional<std::size_t> DeltaMatrix::find_model_label(const std::string& label) const {
    return index_of_label(models, label);
}
std::optional<std::size_t> DeltaMatrix::find_task_label(const std::string& label) const {
    return index_of_label(tasks, label);
}

std::vector<std::string> DeltaMatrix::model_labels() const {
    std::vector<std::string> out;
    out.reserve(models.size());
    for (const auto& m : models) out.push_back(m.label());
    return out;
}

std::vector<std::string> DeltaMatrix::task_labels() const {
    std::vector<std::string> out;
    out.reserve(tasks.size());
    for (const auto& t : tasks) out.push_back(t.label());
    return out;
}

DeltaMatrix DeltaMatrix::subset(const std::vector<std::size_t>& entry_indices) const {
    DeltaMatrix out;
    out.models = models;
    out.tasks = tasks;
    out.task_stats = task_stats;
    out.entries.reserve(entry_indices.size());
    for (std::size_t i : entry_indices) out.entries.push_back(entries.at(i));
    return out;
}

DeltaMatrix normalize(const ResultsDb& db) {
    if (!db.is_aggregated())
        throw Error("normalize requires an aggregated db (one record per model/task pair)");

    DeltaMatrix out;
    out.models = db.models();
    out.tasks = db.tasks();

    // Labels are the public identity of points; two keys sharing a label
    // would silently merge in exported embeddings.
    for (const auto& [labels, what] :
         {std::pair{out.model_labels(), "model"}, std::pair{out.task_labels(), "task"}}) {
        auto sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
        if (dup != sorted.end())
            throw Error(std::string("two distinct ") + what + " keys share the label '" + *dup +
                        "'");
    }

    std::map<ModelKey, std::size_t> model_index;
    std::map<TaskKey, std::size_t> task_index;
    for (std::size_t i = 0; i < out.models.size(); ++i) model_index[out.models[i]] = i;
    for (std::size_t i = 0; i < out.tasks.size(); ++i) task_index[out.tasks[i]] = i;

    std::vector<std::vector<std::size_t>> by_task(out.tasks.size());
    const auto& recs = db.records();
    for (std::size_t i = 0; i < recs.size(); ++i) by_task[task_index.at(recs[i].task)].push_back(i);

    out.entries.resize(recs.size());
    out.task_stats.resize(out.tasks.size());
    for (std::size_t t = 0; t < out.tasks.size(); ++t) {
        std::vector<double> values;
        for (std::size_t i : by_task[t]) values.push_back(recs[i].value);
        const double best = *std::max_element(values.begin(), values.end());
        const double worst = *std::min_element(values.begin(), values.end());

        auto& stats = out.task_stats[t];
        stats.best_value = best;
        stats.degenerate = !(best > worst);

        const auto k = decimal_scale(values);
        const double scale = k ? std::pow(10.0, *k) : 1.0;
        auto units = [&](double v) { return k ? std::nearbyint(v * scale) : v; };
        const double spread = units(best) - units(worst);
        stats.max_gap = k ? spread / scale : spread;

        for (std::size_t i : by_task[t]) {
            auto& e = out.entries[i];
            e.model = model_index.at(recs[i].model);
            e.task = t;
            const double gap = units(best) - units(recs[i].value);
            e.gap = k ? gap / scale : gap;
            e.delta = stats.degenerate ? 0.0 : gap / spread;
        }
    }
    return out;
}

Denormalized denormalize(double delta_hat, const TaskStats& stats) {
    if (stats.degenerate) throw Error("cannot denormalize on zero-spread task");
    return {stats.best_value - delta_hat * stats.max_gap, delta_hat < 0.0 || delta_hat > 1.0};
}

Denormalized denormalize(double delta_hat, const TaskKey& task, const DeltaMatrix& matrix) {
    const auto t = matrix.find_task(task);
    if (!t) throw Error("unknown task: " + task.label());
    return denormalize(delta_hat, matrix.task_stats[*t]);
}

std::string export_delta_csv(const DeltaMatrix& matrix) {
    std::vector<std::vector<std::string>> cells(
        matrix.models.size(), std::vector<std::string>(matrix.tasks.size()));
    for (const auto& e : matrix.entries) cells[e.model][e.task] = text::format_double(e.delta);

    text::CsvRow header{"model"};
    for (const auto& t : matrix.tasks) header.push_back(t.label());
    std::string out = text::csv_line(header);
    for (std::size_t m = 0; m < matrix.models.size(); ++m) {
        text::CsvRow row{matrix.models[m].label()};
        row.insert(row.end(), cells[m].begin(), cells[m].end());
        out += text::csv_line(row);
    }
    return out;
}

}  // namespace capenc
