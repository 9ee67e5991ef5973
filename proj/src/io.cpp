#include "capenc/io.hpp"

#include <nlohmann/json.hpp>

#include "capenc/error.hpp"
#include "capenc/text.hpp"

namespace capenc::io {

using nlohmann::json;

namespace {

json parse(std::string_view contents, const char* what) {
    try {
        return json::parse(contents);
    } catch (const json::parse_error& e) {
        throw Error(std::string("invalid ") + what + " JSON: " + e.what());
    }
}

template <typename T>
T require(const json& obj, const char* key, const char* what) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw Error(std::string(what) + " JSON is missing '" + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw Error(std::string(what) + " JSON field '" + key + "' has the wrong type");
    }
}

Point point_from_json(const json& coords) {
    if (!coords.is_array()) throw Error("embedding JSON point must be an array of numbers");
    Point p;
    for (const auto& c : coords) {
        if (!c.is_number()) throw Error("embedding JSON point must be an array of numbers");
        p.push_back(c.get<double>());
    }
    return p;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(); }

}  // namespace

std::string embedding_to_json(const EmbeddingSpace& space) {
    json doc;
    doc["geometry"] = {{"kind", std::string(to_string(space.geometry.kind))},
                       {"dim", space.geometry.dim},
                       {"ball_epsilon", space.geometry.ball_epsilon}};
    doc["seed"] = space.report.seed;
    doc["loss"] = space.report.final_loss;
    json models = json::object(), tasks = json::object();
    for (std::size_t i = 0; i < space.model_labels.size(); ++i)
        models[space.model_labels[i]] = space.model_points[i];
    for (std::size_t i = 0; i < space.task_labels.size(); ++i)
        tasks[space.task_labels[i]] = space.task_points[i];
    doc["model_points"] = std::move(models);
    doc["task_points"] = std::move(tasks);
    return doc.dump(2) + "\n";
}

EmbeddingSpace embedding_from_json(std::string_view contents) {
    const json doc = parse(contents, "embedding");
    if (!doc.is_object()) throw Error("embedding JSON must be an object");
    EmbeddingSpace space;
    const auto geom = require<json>(doc, "geometry", "embedding");
    const auto kind = parse_geometry_kind(require<std::string>(geom, "kind", "embedding"));
    if (!kind) throw Error("embedding JSON has an unknown geometry kind");
    space.geometry.kind = *kind;
    space.geometry.dim = require<int>(geom, "dim", "embedding");
    space.geometry.ball_epsilon = require<double>(geom, "ball_epsilon", "embedding");
    space.report.seed = require<std::uint64_t>(doc, "seed", "embedding");
    space.report.final_loss = require<double>(doc, "loss", "embedding");
    const auto model_points = require<json>(doc, "model_points", "embedding");
    const auto task_points = require<json>(doc, "task_points", "embedding");
    if (!model_points.is_object() || !task_points.is_object())
        throw Error("embedding JSON points must be objects keyed by label");
    for (const auto& [label, coords] : model_points.items()) {
        space.model_labels.push_back(label);
        space.model_points.push_back(point_from_json(coords));
    }
    for (const auto& [label, coords] : task_points.items()) {
        space.task_labels.push_back(label);
        space.task_points.push_back(point_from_json(coords));
    }
    space.validate();
    return space;
}

void save_embedding(const EmbeddingSpace& space, const std::filesystem::path& path) {
    text::write_file(path, embedding_to_json(space));
}

EmbeddingSpace load_embedding(const std::filesystem::path& path) {
    return embedding_from_json(text::read_file(path));
}

std::string delta_to_json(const DeltaMatrix& delta) {
    json models = json::array(), tasks = json::array(), entries = json::array();
    for (const auto& m : delta.models)
        models.push_back({{"label", m.label()}, {"method", m.method}, {"backbone", m.backbone}});
    for (std::size_t t = 0; t < delta.tasks.size(); ++t) {
        const auto& task = delta.tasks[t];
        const auto& stats = delta.task_stats[t];
        tasks.push_back({{"label", task.label()},
                         {"dataset", task.dataset},
                         {"fraction", task.fraction},
                         {"metric", task.metric},
                         {"best_value", stats.best_value},
                         {"max_delta", stats.max_gap},
                         {"degenerate", stats.degenerate}});
    }
    for (const auto& e : delta.entries)
        entries.push_back({{"model", delta.models[e.model].label()},
                           {"task", delta.tasks[e.task].label()},
                           {"gap", e.gap},
                           {"delta", e.delta}});
    json doc = {{"models", models}, {"tasks", tasks}, {"entries", entries}};
    return doc.dump(2) + "\n";
}

DeltaMatrix delta_from_json(std::string_view contents) {
    const json doc = parse(contents, "delta");
    DeltaMatrix delta;
    const auto models = require<json>(doc, "models", "delta");
    const auto tasks = require<json>(doc, "tasks", "delta");
    const auto entries = require<json>(doc, "entries", "delta");
    if (!models.is_array() || !tasks.is_array() || !entries.is_array())
        throw Error("delta JSON models, tasks and entries must be arrays");
    for (const auto& m : models)
        delta.models.push_back({require<std::string>(m, "method", "delta"),
                                require<std::string>(m, "backbone", "delta")});
    for (const auto& t : tasks) {
        delta.tasks.push_back({require<std::string>(t, "dataset", "delta"),
                               require<double>(t, "fraction", "delta"),
                               require<std::string>(t, "metric", "delta")});
        delta.task_stats.push_back({require<double>(t, "best_value", "delta"),
                                    require<double>(t, "max_delta", "delta"),
                                    require<bool>(t, "degenerate", "delta")});
    }
    for (const auto& e : entries) {
        const auto m = delta.find_model_label(require<std::string>(e, "model", "delta"));
        const auto t = delta.find_task_label(require<std::string>(e, "task", "delta"));
        if (!m || !t) throw Error("delta JSON entry references an unknown model or task");
        delta.entries.push_back(
            {*m, *t, require<double>(e, "gap", "delta"), require<double>(e, "delta", "delta")});
    }
    return delta;
}

void save_delta(const DeltaMatrix& delta, const std::filesystem::path& path) {
    text::write_file(path, delta_to_json(delta));
}

DeltaMatrix load_delta(const std::filesystem::path& path) {
    return delta_from_json(text::read_file(path));
}

std::filesystem::path delta_sidecar_path(const std::filesystem::path& embedding_path) {
    auto p = embedding_path;
    p.replace_extension(".delta.json");
    return p;
}

std::string eval_rows_csv(const std::vector<EvalReport>& reports) {
    std::string out = text::csv_line(
        {"geometry", "split", "model", "task", "true_delta", "predicted_delta", "model_degree"});
    for (const auto& r : reports)
        for (const auto& row : r.rows)
            out += text::csv_line({std::string(to_string(r.geometry.kind)), std::to_string(row.split),
                                   row.model, row.task, text::format_double(row.true_delta),
                                   text::format_double(row.predicted_delta),
                                   std::to_string(row.model_degree)});
    return out;
}

std::string scatter_csv(const std::vector<EvalReport>& reports) {
    std::string out =
        text::csv_line({"geometry", "true_delta", "predicted_delta", "model", "task", "degree"});
    for (const auto& r : reports)
        for (const auto& row : r.rows)
            out += text::csv_line({std::string(to_string(r.geometry.kind)),
                                   text::format_double(row.true_delta),
                                   text::format_double(row.predicted_delta), row.model, row.task,
                                   std::to_string(row.model_degree)});
    return out;
}

std::string degree_table_csv(const std::vector<EvalReport>& reports,
                             const std::vector<DegreeErrorTable>& tables) {
    std::string out =
        text::csv_line({"geometry", "bucket", "count", "mean_abs_error", "error_std"});
    for (std::size_t i = 0; i < reports.size() && i < tables.size(); ++i)
        for (const auto& b : tables[i].buckets)
            out += text::csv_line(
                {std::string(to_string(reports[i].geometry.kind)), b.label(),
                 std::to_string(b.count),
                 b.mean_abs_error ? text::format_double(*b.mean_abs_error) : "",
                 b.error_std ? text::format_double(*b.error_std) : ""});
    return out;
}

std::string eval_summary_json(const std::vector<EvalReport>& reports, const SplitPlan& plan) {
    json doc;
    doc["plan"] = {{"n_splits", plan.n_splits()},
                   {"holdout_size", plan.holdout_size()},
                   {"seed", plan.seed()}};
    json geoms = json::object();
    for (const auto& r : reports) {
        geoms[std::string(to_string(r.geometry.kind))] = {
            {"dim", r.geometry.dim},
            {"count", r.summary.count},
            {"rmse", r.summary.rmse},
            {"mae", r.summary.mae},
            {"pearson", optional_number(r.summary.pearson)},
            {"skipped", r.skipped.size()},
            {"train_losses", r.train_losses},
            {"holdout_sets", r.holdout_sets},
            {"log", r.log}};
    }
    doc["geometries"] = std::move(geoms);
    return doc.dump(2) + "\n";
}

std::string quality_csv(const std::vector<QualityRow>& rows) {
    std::string out = text::csv_line(
        {"dataset", "fraction", "metric", "task", "n", "mu", "sigma", "saturated"});
    for (const auto& r : rows)
        out += text::csv_line({r.task.dataset, text::format_double(r.task.fraction), r.task.metric,
                               r.task.label(), std::to_string(r.n), text::format_double(r.mu),
                               text::format_double(r.sigma), r.saturated ? "true" : "false"});
    return out;
}

std::string centrality_csv(const std::vector<CentralityRow>& rows) {
    std::string out = text::csv_line({"rank", "model", "centrality"});
    for (const auto& r : rows)
        out += text::csv_line(
            {std::to_string(r.rank), r.model, text::format_double(r.centrality)});
    return out;
}

std::string map_csv(const std::vector<ScatterPoint>& points) {
    std::string out = text::csv_line({"label", "kind", "x", "y", "class"});
    for (const auto& p : points)
        out += text::csv_line({p.label, std::string(to_string(p.kind)), text::format_double(p.x),
                               text::format_double(p.y), p.cls});
    return out;
}

}  // namespace capenc::io
