#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "capenc/capenc.hpp"

namespace py = pybind11;
using namespace capenc;

namespace {

Geometry make_geometry(const std::string& kind, int dim, double ball_epsilon) {
    const auto k = parse_geometry_kind(kind);
    if (!k) throw Error("unknown geometry: " + kind);
    Geometry g{*k, dim, ball_epsilon};
    g.validate();
    return g;
}

py::dict summary_dict(const ErrorSummary& s) {
    py::dict d;
    d["count"] = s.count;
    d["rmse"] = s.rmse;
    d["mae"] = s.mae;
    d["pearson"] = s.pearson ? py::cast(*s.pearson) : py::none();
    return d;
}

}  // namespace

PYBIND11_MODULE(_capenc, m) {
    m.doc() = "Embed models and tasks so that latent distance predicts relative performance.";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<Error>(m, "CapencError", PyExc_RuntimeError);

    py::class_<ModelKey>(m, "ModelKey")
        .def(py::init<std::string, std::string>(), py::arg("method"), py::arg("backbone") = "")
        .def_readwrite("method", &ModelKey::method)
        .def_readwrite("backbone", &ModelKey::backbone)
        .def_property_readonly("label", &ModelKey::label)
        .def("__repr__", [](const ModelKey& k) { return "ModelKey('" + k.label() + "')"; });

    py::class_<TaskKey>(m, "TaskKey")
        .def(py::init([](std::string dataset, std::string metric, double fraction) {
                 return TaskKey{std::move(dataset), fraction, std::move(metric)};
             }),
             py::arg("dataset"), py::arg("metric"), py::arg("fraction") = 100.0)
        .def_readwrite("dataset", &TaskKey::dataset)
        .def_readwrite("fraction", &TaskKey::fraction)
        .def_readwrite("metric", &TaskKey::metric)
        .def_property_readonly("label", &TaskKey::label)
        .def("__repr__", [](const TaskKey& k) { return "TaskKey('" + k.label() + "')"; });

    py::class_<ResultsDb>(m, "ResultsDb")
        .def("__len__", &ResultsDb::size)
        .def_property_readonly("models", [](const ResultsDb& db) {
            std::vector<std::string> out;
            for (const auto& k : db.models()) out.push_back(k.label());
            return out;
        })
        .def_property_readonly("tasks", [](const ResultsDb& db) {
            std::vector<std::string> out;
            for (const auto& k : db.tasks()) out.push_back(k.label());
            return out;
        })
        .def("values", [](const ResultsDb& db) {
            std::vector<std::tuple<std::string, std::string, double>> out;
            for (const auto& r : db.records()) out.emplace_back(r.model.label(), r.task.label(), r.value);
            return out;
        }, "(model, task, value) for every record, in ingestion order")
        .def("is_aggregated", &ResultsDb::is_aggregated)
        .def("to_csv", [](const ResultsDb& db) { return export_csv(db); })
        .def("__repr__", [](const ResultsDb& db) { return "<ResultsDb " + describe(summarize(db)) + ">"; });

    m.def("load_db", [](const std::filesystem::path& path) { return ingest(path, format_from_path(path)); },
          py::arg("path"));
    m.def("read_csv", &ingest_csv_text, py::arg("text"));
    m.def("read_json", &ingest_json_text, py::arg("text"));
    m.def("aggregate_max", &aggregate_max, py::arg("db"));
    m.def("filter_min_degree",
          [](const ResultsDb& db, std::size_t k_model, std::optional<std::size_t> k_task) {
              return filter_min_degree(db, k_model, k_task.value_or(k_model)).db;
          },
          py::arg("db"), py::arg("min_degree") = 5, py::arg("min_task_degree") = py::none());

    py::class_<TaskStats>(m, "TaskStats")
        .def_readonly("best_value", &TaskStats::best_value)
        .def_readonly("max_delta", &TaskStats::max_gap)
        .def_readonly("degenerate", &TaskStats::degenerate);

    py::class_<DeltaMatrix>(m, "DeltaMatrix")
        .def_property_readonly("models", &DeltaMatrix::model_labels)
        .def_property_readonly("tasks", &DeltaMatrix::task_labels)
        .def_readonly("task_stats", &DeltaMatrix::task_stats)
        .def("entries", [](const DeltaMatrix& d) {
            std::vector<std::tuple<std::string, std::string, double, double>> out;
            for (const auto& e : d.entries)
                out.emplace_back(d.models[e.model].label(), d.tasks[e.task].label(), e.gap, e.delta);
            return out;
        }, "(model, task, gap, delta) per observed pair")
        .def("__len__", [](const DeltaMatrix& d) { return d.entries.size(); });

    m.def("normalize", &normalize, py::arg("db"));
    m.def("denormalize",
          [](double delta_hat, const TaskStats& stats) { return denormalize(delta_hat, stats).value; },
          py::arg("delta_hat"), py::arg("stats"));

    py::class_<Geometry>(m, "Geometry")
        .def(py::init(&make_geometry), py::arg("kind") = "euclidean", py::arg("dim") = 5,
             py::arg("ball_epsilon") = 1e-5)
        .def_property_readonly("kind", [](const Geometry& g) { return std::string(to_string(g.kind)); })
        .def_readonly("dim", &Geometry::dim)
        .def_readonly("ball_epsilon", &Geometry::ball_epsilon)
        .def("distance", [](const Geometry& g, const Point& u, const Point& v) { return distance(g, u, v); })
        .def("gradient", [](const Geometry& g, const Point& u, const Point& v) {
            const auto grad = distance_gradient(g, u, v);
            return py::make_tuple(grad.d_u, grad.d_v);
        }, "ambient gradients (d/du, d/dv) of the distance")
        .def("project", [](const Geometry& g, Point p) { return project_to_domain(g, std::move(p)); });

    py::class_<FitConfig>(m, "FitConfig")
        .def(py::init([](int iterations, double lr, const std::string& optimizer, double tol,
                         double init_scale, std::uint64_t seed, int restarts) {
                 FitConfig c;
                 c.max_iterations = iterations;
                 c.learning_rate = lr;
                 const auto kind = parse_optimizer_kind(optimizer);
                 if (!kind) throw Error("unknown optimizer: " + optimizer);
                 c.optimizer = *kind;
                 c.convergence_tolerance = tol;
                 c.init_scale = init_scale;
                 c.seed = seed;
                 c.place_restarts = restarts;
                 c.validate();
                 return c;
             }),
             py::arg("iterations") = 5000, py::arg("learning_rate") = 0.01,
             py::arg("optimizer") = "adam", py::arg("tolerance") = 1e-7, py::arg("init_scale") = 0.1,
             py::arg("seed") = 42, py::arg("restarts") = 8)
        .def_readwrite("iterations", &FitConfig::max_iterations)
        .def_readwrite("learning_rate", &FitConfig::learning_rate)
        .def_readwrite("seed", &FitConfig::seed);

    py::class_<EmbeddingSpace>(m, "EmbeddingSpace")
        .def_readonly("geometry", &EmbeddingSpace::geometry)
        .def_readonly("models", &EmbeddingSpace::model_labels)
        .def_readonly("tasks", &EmbeddingSpace::task_labels)
        .def_property_readonly("loss", [](const EmbeddingSpace& s) { return s.report.final_loss; })
        .def_property_readonly("iterations", [](const EmbeddingSpace& s) { return s.report.iterations; })
        .def_property_readonly("converged", [](const EmbeddingSpace& s) { return s.report.converged; })
        .def("model_point", &EmbeddingSpace::model_point, py::arg("label"))
        .def("task_point", &EmbeddingSpace::task_point, py::arg("label"))
        .def("predict", [](const EmbeddingSpace& s, const std::string& model, const std::string& task) {
            return distance(s.geometry, s.model_point(model), s.task_point(task));
        }, py::arg("model"), py::arg("task"), "predicted normalized gap (latent distance)")
        .def("loss_on", [](const EmbeddingSpace& s, const DeltaMatrix& d) { return loss(s, d); })
        .def("save", [](const EmbeddingSpace& s, const std::filesystem::path& p) { io::save_embedding(s, p); })
        .def("to_json", &io::embedding_to_json);

    m.def("load_embedding", &io::load_embedding, py::arg("path"));
    m.def("fit", &fit, py::arg("delta"), py::arg("geometry") = Geometry{},
          py::arg("config") = FitConfig{}, py::call_guard<py::gil_scoped_release>());
    m.def("place",
          [](const EmbeddingSpace& s, const std::string& kind, const std::string& label,
             const std::map<std::string, double>& known, const FitConfig& config) {
              const auto k = parse_entity_kind(kind);
              if (!k) throw Error("kind must be 'model' or 'task'");
              const auto placed = place_entity(s, *k, known, config);
              return with_entity(s, *k, label, placed.point);
          },
          py::arg("space"), py::arg("kind"), py::arg("label"), py::arg("known"),
          py::arg("config") = FitConfig{}, "returns a copy of space with the new point added");

    py::class_<SplitPlan>(m, "SplitPlan")
        .def(py::init<std::size_t, std::size_t, std::uint64_t>(), py::arg("n_splits") = 10,
             py::arg("holdout") = 10, py::arg("seed") = 42)
        .def_property_readonly("n_splits", &SplitPlan::n_splits)
        .def_property_readonly("holdout", &SplitPlan::holdout_size)
        .def_property_readonly("seed", &SplitPlan::seed);

    m.def("evaluate",
          [](const DeltaMatrix& delta, const Geometry& g, const SplitPlan& plan, const FitConfig& config) {
              EvalReport r;
              {
                  py::gil_scoped_release release;
                  r = run_splits(delta, g, plan, config);
              }
              py::dict d = summary_dict(r.summary);
              d["geometry"] = std::string(to_string(g.kind));
              std::vector<std::tuple<std::string, std::string, double, double>> rows;
              for (const auto& row : r.rows)
                  rows.emplace_back(row.model, row.task, row.true_delta, row.predicted_delta);
              d["rows"] = rows;
              d["skipped"] = r.skipped.size();
              return d;
          },
          py::arg("delta"), py::arg("geometry") = Geometry{}, py::arg("plan") = SplitPlan{},
          py::arg("config") = FitConfig{},
          "holdout evaluation; returns count, rmse, mae, pearson and the prediction rows");

    m.def("dataset_quality", [](const ResultsDb& db, double min_mean, double max_sigma) {
        std::vector<py::dict> out;
        for (const auto& q : dataset_quality(db, {min_mean, max_sigma})) {
            py::dict d;
            d["task"] = q.task.label();
            d["n"] = q.n;
            d["mu"] = q.mu;
            d["sigma"] = q.sigma;
            d["saturated"] = q.saturated;
            out.push_back(std::move(d));
        }
        return out;
    }, py::arg("db"), py::arg("min_mean") = 95.0, py::arg("max_sigma") = 1.5);

    m.def("centrality", [](const EmbeddingSpace& s) {
        std::vector<std::tuple<std::size_t, std::string, double>> out;
        for (const auto& c : centrality(s)) out.emplace_back(c.rank, c.model, c.centrality);
        return out;
    }, py::arg("space"), "(rank, model, mean distance to tasks), most central first");
}
