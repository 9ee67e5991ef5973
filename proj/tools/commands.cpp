#include "commands.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <set>

#include "capenc/error.hpp"
#include "capenc/evaluator.hpp"
#include "capenc/io.hpp"
#include "capenc/normalize.hpp"
#include "capenc/text.hpp"
#include "manifest.hpp"

namespace capenc::cli {

namespace {

void warn(const std::string& message) { std::cerr << "capenc: warning: " << message << "\n"; }
void note(const std::string& message) { std::cerr << "capenc: " << message << "\n"; }

ResultsDb load_db(const fs::path& path) {
    auto db = ingest(path, format_from_path(path));
    if (!db.is_aggregated()) {
        note("duplicate (model, task) pairs found; keeping the highest value of each");
        db = aggregate_max(db);
    }
    return db;
}

Geometry make_geometry(const std::string& kind, int dim, double ball_epsilon) {
    const auto k = parse_geometry_kind(kind);
    if (!k) throw Error("unknown geometry: " + kind);
    Geometry g{*k, dim, ball_epsilon};
    g.validate();
    return g;
}

nlohmann::json fit_json(const FitFlags& f) {
    return {{"iterations", f.iterations},       {"learning_rate", f.learning_rate},
            {"optimizer", f.optimizer},         {"tolerance", f.tolerance},
            {"init_scale", f.init_scale},       {"seed", f.seed}};
}

std::string nearest_labels(const std::string& wanted, const std::vector<std::string>& labels) {
    std::vector<std::pair<std::size_t, std::string>> scored;
    for (const auto& l : labels) scored.emplace_back(text::edit_distance(wanted, l), l);
    std::sort(scored.begin(), scored.end());
    std::string out;
    for (std::size_t i = 0; i < scored.size() && i < 3; ++i) {
        if (i) out += ", ";
        out += "'" + scored[i].second + "'";
    }
    return out.empty() ? "(none)" : out;
}

std::size_t require_index(std::optional<std::size_t> index, const std::string& kind,
                          const std::string& label, const std::vector<std::string>& known) {
    if (!index)
        throw Error("unknown " + kind + " '" + label + "'; nearest known: " +
                    nearest_labels(label, known));
    return *index;
}

// Model class for the 2D map: the architecture family recorded for it, if any.
std::map<std::string, std::string> model_classes(const ResultsDb& db) {
    std::map<std::string, std::string> out;
    for (const auto& r : db.records())
        if (r.arch_family && !out.contains(r.model.label()))
            out[r.model.label()] = std::string(to_string(*r.arch_family));
    return out;
}

}  // namespace

FitConfig FitFlags::to_config() const {
    FitConfig c;
    c.max_iterations = iterations;
    c.learning_rate = learning_rate;
    const auto kind = parse_optimizer_kind(optimizer);
    if (!kind) throw Error("unknown optimizer: " + optimizer);
    c.optimizer = *kind;
    c.convergence_tolerance = tolerance;
    c.init_scale = init_scale;
    c.seed = seed;
    c.validate();
    return c;
}

int cmd_ingest(const IngestOptions& opt) {
    RunManifest manifest("ingest");
    DbFormat format = format_from_path(opt.input);
    if (opt.format) {
        const auto f = parse_db_format(*opt.format);
        if (!f) throw Error("unknown format: " + *opt.format);
        format = *f;
    }
    manifest.add_input("input", opt.input);
    auto db = ingest(opt.input, format);
    std::cout << "ingested: " << describe(summarize(db)) << "\n";

    const bool aggregate = opt.aggregate || opt.min_degree > 0;
    if (aggregate) {
        if (!opt.aggregate) note("--min-degree implies --aggregate");
        db = aggregate_max(db);
        std::cout << "aggregated: " << describe(summarize(db)) << "\n";
    }
    const std::size_t task_degree = opt.min_task_degree.value_or(opt.min_degree);
    if (opt.min_degree > 0 || task_degree > 0) {
        auto filtered = filter_min_degree(db, opt.min_degree, task_degree);
        db = std::move(filtered.db);
        std::cout << "filtered (model degree >= " << opt.min_degree << ", task degree >= "
                  << task_degree << "): " << describe(summarize(db)) << "\n";
        if (filtered.emptied) warn("no records survive the degree filter; writing an empty db");
    }

    manifest.set("format", format == DbFormat::Csv ? "csv" : "json");
    manifest.set("aggregate", aggregate);
    manifest.set("min_degree", opt.min_degree);
    manifest.set("min_task_degree", task_degree);
    export_db(db, opt.out, format_from_path(opt.out));
    manifest.write(manifest_path_for_file(opt.out));
    return 0;
}

int cmd_embed(const EmbedOptions& opt) {
    RunManifest manifest("embed");
    const Geometry geometry = make_geometry(opt.geometry, opt.dim, opt.ball_epsilon);
    const FitConfig config = opt.fit.to_config();
    manifest.add_input("db", opt.db);
    const auto db = load_db(opt.db);
    const auto delta = normalize(db);

    std::string degenerate;
    for (std::size_t j = 0; j < delta.tasks.size(); ++j)
        if (delta.task_stats[j].degenerate) degenerate += (degenerate.empty() ? "" : ", ") + delta.tasks[j].label();
    if (!degenerate.empty()) warn("degenerate task(s) with zero spread, deltas set to 0: " + degenerate);

    const auto space = fit(delta, geometry, config);
    std::cout << "embedded " << describe(summarize(db)) << " in " << to_string(geometry.kind)
              << " dim " << geometry.dim << "\n";
    std::cout << "final loss " << text::format_double(space.report.final_loss) << " after "
              << space.report.iterations << " iterations"
              << (space.report.converged ? " (converged)" : " (iteration limit)") << "\n";

    manifest.set("geometry", std::string(to_string(geometry.kind)));
    manifest.set("dim", geometry.dim);
    manifest.set("ball_epsilon", geometry.ball_epsilon);
    manifest.set("fit", fit_json(opt.fit));
    manifest.set_seed(config.seed);
    io::save_embedding(space, opt.out);
    io::save_delta(delta, io::delta_sidecar_path(opt.out));
    manifest.write(manifest_path_for_file(opt.out));
    return 0;
}

int cmd_predict(const PredictOptions& opt) {
    const auto space = io::load_embedding(opt.embedding);
    const auto m = require_index(space.find_model(opt.model), "model", opt.model, space.model_labels);
    const auto t = require_index(space.find_task(opt.task), "task", opt.task, space.task_labels);
    const double delta_hat = distance(space.geometry, space.model_points[m], space.task_points[t]);

    std::string raw_line;
    if (opt.raw) {
        const auto sidecar = io::delta_sidecar_path(opt.embedding);
        if (!fs::exists(sidecar)) throw Error("--raw needs the delta sidecar " + sidecar.string());
        const auto delta = io::load_delta(sidecar);
        const auto ti = delta.find_task_label(opt.task);
        if (!ti) throw Error("task '" + opt.task + "' has no statistics in " + sidecar.string());
        const auto raw = denormalize(delta_hat, delta.task_stats[*ti]);
        raw_line = "raw: " + text::format_double(raw.value) + " " + delta.tasks[*ti].metric;
        if (raw.extrapolated) warn("predicted delta lies outside [0, 1]; raw value extrapolates");
    }
    std::cout << "model: " << opt.model << "\n";
    std::cout << "task: " << opt.task << "\n";
    std::cout << "delta_hat: " << text::format_double(delta_hat) << "\n";
    if (!raw_line.empty()) std::cout << raw_line << "\n";
    return 0;
}

int cmd_place(const PlaceOptions& opt) {
    RunManifest manifest("place");
    const auto kind = parse_entity_kind(opt.kind);
    if (!kind) throw Error("unknown kind: " + opt.kind);
    FitConfig config = opt.fit.to_config();
    config.place_restarts = opt.restarts;
    config.validate();

    manifest.add_input("embedding", opt.embedding);
    manifest.add_input("results", opt.results);
    const auto space = io::load_embedding(opt.embedding);
    const auto sidecar_path = io::delta_sidecar_path(opt.embedding);
    if (!fs::exists(sidecar_path))
        throw Error("place needs the delta sidecar " + sidecar_path.string());
    manifest.add_input("delta", sidecar_path);
    auto delta = io::load_delta(sidecar_path);
    const auto results = aggregate_max(ingest(opt.results, format_from_path(opt.results)));

    std::map<std::string, double> known;
    if (*kind == EntityKind::Model) {
        const auto models = results.models();
        if (models.size() != 1 || models.front().label() != opt.name)
            throw Error("results must all belong to model '" + opt.name + "'");
        if (space.find_model(opt.name)) throw Error("model '" + opt.name + "' already exists");
        for (const auto& r : results.records()) {
            const auto label = r.task.label();
            require_index(space.find_task(label), "task", label, space.task_labels);
            const auto ti = delta.find_task_label(label);
            if (!ti) throw Error("task '" + label + "' has no statistics in the delta sidecar");
            const auto& stats = delta.task_stats[*ti];
            if (stats.degenerate) {
                warn("task '" + label + "' has zero spread; using delta 0");
                known[label] = 0.0;
            } else {
                known[label] = (stats.best_value - r.value) / stats.max_gap;
            }
        }
    } else {
        const auto tasks = results.tasks();
        if (tasks.size() != 1 || tasks.front().label() != opt.name)
            throw Error("results must all belong to task '" + opt.name + "'");
        if (space.find_task(opt.name)) throw Error("task '" + opt.name + "' already exists");
        for (const auto& r : results.records()) {
            const auto label = r.model.label();
            require_index(space.find_model(label), "model", label, space.model_labels);
        }
        const auto local = normalize(results);
        if (local.task_stats.front().degenerate)
            warn("all results for the new task are equal; deltas set to 0");
        for (const auto& e : local.entries) known[local.models[e.model].label()] = e.delta;
    }
    for (const auto& [label, d] : known)
        if (d < 0.0 || d > 1.0)
            warn("delta for '" + label + "' is " + text::format_double(d) +
                 ", outside the range observed in the literature");
    if (known.size() < 5) warn("low degree: " + std::to_string(known.size()));

    const auto placement = place_entity(space, *kind, known, config);
    const auto updated = with_entity(space, *kind, opt.name, placement.point);
    std::cout << "placed " << opt.kind << " '" << opt.name << "' from " << known.size()
              << " result(s); residual loss " << text::format_double(placement.loss) << "\n";

    // Extend the sidecar so the new embedding stays self-describing.
    if (*kind == EntityKind::Model) {
        delta.models.push_back(results.models().front());
        const std::size_t mi = delta.models.size() - 1;
        for (const auto& r : results.records()) {
            const auto ti = *delta.find_task_label(r.task.label());
            const auto& stats = delta.task_stats[ti];
            delta.entries.push_back({mi, ti, stats.best_value - r.value, known.at(r.task.label())});
        }
    } else {
        const auto local = normalize(results);
        delta.tasks.push_back(local.tasks.front());
        delta.task_stats.push_back(local.task_stats.front());
        const std::size_t ti = delta.tasks.size() - 1;
        for (const auto& e : local.entries) {
            const auto label = local.models[e.model].label();
            auto mi = delta.find_model_label(label);
            if (!mi) {
                delta.models.push_back(local.models[e.model]);
                mi = delta.models.size() - 1;
            }
            delta.entries.push_back({*mi, ti, e.gap, e.delta});
        }
    }

    text::CsvRow header{*kind == EntityKind::Model ? "task" : "model", "predicted_delta"};
    if (*kind == EntityKind::Model) header.push_back("predicted_value");
    std::string predictions = text::csv_line(header);
    const auto& others = *kind == EntityKind::Model ? space.task_labels : space.model_labels;
    const auto& other_points = *kind == EntityKind::Model ? space.task_points : space.model_points;
    for (std::size_t i = 0; i < others.size(); ++i) {
        if (known.contains(others[i])) continue;
        const double d = distance(space.geometry, placement.point, other_points[i]);
        text::CsvRow row{others[i], text::format_double(d)};
        if (*kind == EntityKind::Model) {
            const auto ti = delta.find_task_label(others[i]);
            row.push_back(ti && !delta.task_stats[*ti].degenerate
                              ? text::format_double(denormalize(d, delta.task_stats[*ti]).value)
                              : "");
        }
        predictions += text::csv_line(row);
    }

    manifest.set("kind", opt.kind);
    manifest.set("name", opt.name);
    manifest.set("restarts", opt.restarts);
    manifest.set("fit", fit_json(opt.fit));
    manifest.set_seed(config.seed);
    auto predictions_path = opt.out;
    predictions_path.replace_extension(".predictions.csv");
    io::save_embedding(updated, opt.out);
    io::save_delta(delta, io::delta_sidecar_path(opt.out));
    text::write_file(predictions_path, predictions);
    manifest.write(manifest_path_for_file(opt.out));
    return 0;
}

int cmd_eval(const EvalOptions& opt) {
    RunManifest manifest("eval");
    const FitConfig config = opt.fit.to_config();
    const SplitPlan plan(opt.splits, opt.holdout, opt.split_seed);

    std::vector<GeometryKind> kinds;
    if (opt.geometries == "all") {
        kinds = {GeometryKind::Euclidean, GeometryKind::Cosine, GeometryKind::Poincare};
    } else {
        std::string_view rest = opt.geometries;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto name = std::string(text::trim(rest.substr(0, comma)));
            const auto k = parse_geometry_kind(name);
            if (!k) throw Error("unknown geometry: " + name);
            kinds.push_back(*k);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
    }

    manifest.add_input("db", opt.db);
    const auto delta = normalize(load_db(opt.db));
    std::vector<EvalReport> reports;
    std::vector<DegreeErrorTable> tables;
    for (auto kind : kinds) {
        const Geometry g = make_geometry(std::string(to_string(kind)), opt.dim, opt.ball_epsilon);
        reports.push_back(run_splits(delta, g, plan, config));
        tables.push_back(error_by_degree(reports.back()));
    }

    std::cout << "geometry   rows  rmse      mae       pearson\n";
    for (const auto& r : reports) {
        std::cout << to_string(r.geometry.kind)
                  << std::string(11 - to_string(r.geometry.kind).size(), ' ') << r.summary.count
                  << "  " << text::format_fixed(r.summary.rmse, 6) << "  "
                  << text::format_fixed(r.summary.mae, 6) << "  "
                  << (r.summary.pearson ? text::format_fixed(*r.summary.pearson, 4) : "n/a")
                  << "\n";
        for (const auto& line : r.log) note(line);
    }

    manifest.set("splits", opt.splits);
    manifest.set("holdout", opt.holdout);
    manifest.set("split_seed", opt.split_seed);
    manifest.set("geometries", opt.geometries);
    manifest.set("dim", opt.dim);
    manifest.set("ball_epsilon", opt.ball_epsilon);
    manifest.set("fit", fit_json(opt.fit));
    manifest.set_seed(config.seed);
    text::write_file(opt.out / "rows.csv", io::eval_rows_csv(reports));
    text::write_file(opt.out / "scatter.csv", io::scatter_csv(reports));
    text::write_file(opt.out / "error_by_degree.csv", io::degree_table_csv(reports, tables));
    text::write_file(opt.out / "summary.json", io::eval_summary_json(reports, plan));
    manifest.write(opt.out / "manifest.json");
    return 0;
}

int cmd_analyze(const AnalyzeOptions& opt) {
    RunManifest manifest("analyze");
    const auto method = parse_projection_method(opt.method);
    if (!method) throw Error("unknown projection method: " + opt.method);
    manifest.add_input("db", opt.db);
    manifest.add_input("embedding", opt.embedding);
    const auto db = load_db(opt.db);
    const auto space = io::load_embedding(opt.embedding);

    const auto quality = dataset_quality(db, {opt.min_mean, opt.max_sigma});
    const auto central = centrality(space);
    const auto projection = project_2d(space, *method);

    const auto classes = model_classes(db);
    std::map<std::string, std::string> task_metric;
    for (const auto& t : db.tasks()) task_metric[t.label()] = t.metric;
    std::vector<ScatterPoint> points;
    for (std::size_t i = 0; i < projection.labels.size(); ++i) {
        ScatterPoint p;
        p.x = projection.coords[i][0];
        p.y = projection.coords[i][1];
        p.label = projection.labels[i];
        p.kind = projection.kinds[i];
        if (p.kind == EntityKind::Model) {
            const auto it = classes.find(p.label);
            p.cls = it != classes.end() ? "model: " + it->second : "model";
        } else {
            const auto it = task_metric.find(p.label);
            p.cls = it != task_metric.end() ? "task: " + it->second : "task";
        }
        points.push_back(std::move(p));
    }

    const auto saturated = std::count_if(quality.begin(), quality.end(),
                                         [](const QualityRow& q) { return q.saturated; });
    std::cout << quality.size() << " tasks, " << saturated << " saturated\n";
    if (!central.empty())
        std::cout << "most central model: " << central.front().model << " ("
                  << text::format_fixed(central.front().centrality, 4) << ")\n";
    std::cout << to_string(*method) << " map stress " << text::format_double(projection.stress)
              << "\n";

    manifest.set("method", opt.method);
    manifest.set("min_mean", opt.min_mean);
    manifest.set("max_sigma", opt.max_sigma);
    text::write_file(opt.out / "quality.csv", io::quality_csv(quality));
    text::write_file(opt.out / "centrality.csv", io::centrality_csv(central));
    text::write_file(opt.out / "map2d.csv", io::map_csv(points));
    text::write_file(opt.out / "map2d.svg", render_scatter(points));
    manifest.write(opt.out / "manifest.json");
    return 0;
}

}  // namespace capenc::cli
