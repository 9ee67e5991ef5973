#include "capenc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Dense>

#include "capenc/error.hpp"

namespace capenc {

bool is_saturated(std::string_view metric, double mu, double sigma,
                  const SaturationThresholds& thresholds) {
    return metric_range(metric) == MetricRange::Percentage && mu >= thresholds.min_mean &&
           sigma <= thresholds.max_sigma;
}

std::vector<QualityRow> dataset_quality(const ResultsDb& db,
                                        const SaturationThresholds& thresholds) {
    // Welford accumulation per task.
    struct Running {
        std::size_t n = 0;
        double mean = 0.0;
        double m2 = 0.0;
    };
    const auto tasks = db.tasks();
    std::map<TaskKey, Running> acc;
    for (const auto& r : db.records()) {
        auto& a = acc[r.task];
        ++a.n;
        const double d = r.value - a.mean;
        a.mean += d / static_cast<double>(a.n);
        a.m2 += d * (r.value - a.mean);
    }

    std::vector<QualityRow> rows;
    rows.reserve(tasks.size());
    for (const auto& task : tasks) {
        const auto& a = acc.at(task);
        QualityRow row;
        row.task = task;
        row.n = a.n;
        row.mu = a.mean;
        row.sigma = a.n > 1 ? std::sqrt(std::max(0.0, a.m2) / static_cast<double>(a.n)) : 0.0;
        row.saturated = is_saturated(task.metric, row.mu, row.sigma, thresholds);
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const QualityRow& a, const QualityRow& b) { return a.sigma > b.sigma; });
    return rows;
}

std::vector<CentralityRow> centrality(const EmbeddingSpace& space) {
    if (space.task_points.empty()) throw Error("centrality needs at least one task point");
    std::vector<CentralityRow> rows;
    rows.reserve(space.model_points.size());
    for (std::size_t m = 0; m < space.model_points.size(); ++m) {
        double sum = 0.0;
        for (const auto& t : space.task_points) sum += distance(space.geometry, space.model_points[m], t);
        rows.push_back({space.model_labels[m], sum / static_cast<double>(space.task_points.size()), 0});
    }
    std::sort(rows.begin(), rows.end(), [](const CentralityRow& a, const CentralityRow& b) {
        if (a.centrality != b.centrality) return a.centrality < b.centrality;
        return a.model < b.model;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = i + 1;
    return rows;
}

std::string_view to_string(ProjectionMethod method) {
    return method == ProjectionMethod::Pca ? "pca" : "stress2d";
}

std::optional<ProjectionMethod> parse_projection_method(std::string_view text) {
    if (text == "pca") return ProjectionMethod::Pca;
    if (text == "stress2d") return ProjectionMethod::Stress2d;
    return std::nullopt;
}

std::vector<std::array<double, 2>> pca_2d(const std::vector<Point>& points) {
    if (points.empty()) return {};
    const Eigen::Index n = static_cast<Eigen::Index>(points.size());
    const Eigen::Index dim = static_cast<Eigen::Index>(points.front().size());
    Eigen::MatrixXd x(n, dim);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < dim; ++k) x(i, k) = points[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    x.rowwise() -= x.colwise().mean();

    const Eigen::MatrixXd cov = x.transpose() * x;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw Error("PCA eigen-decomposition failed");

    // Eigenvalues come out ascending; take the top two.
    Eigen::MatrixXd axes = Eigen::MatrixXd::Zero(dim, 2);
    for (Eigen::Index c = 0; c < std::min<Eigen::Index>(2, dim); ++c) {
        Eigen::VectorXd v = solver.eigenvectors().col(dim - 1 - c);
        Eigen::Index arg = 0;
        for (Eigen::Index k = 1; k < dim; ++k)
            if (std::abs(v(k)) > std::abs(v(arg))) arg = k;
        if (v(arg) < 0.0) v = -v;
        axes.col(c) = v;
    }
    const Eigen::MatrixXd y = x * axes;
    std::vector<std::array<double, 2>> out(points.size());
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = {y(i, 0), y(i, 1)};
    return out;
}

Projection2d project_2d(const EmbeddingSpace& space, ProjectionMethod method,
                        const FitConfig& config) {
    std::vector<Point> points;
    Projection2d out;
    for (std::size_t i = 0; i < space.model_points.size(); ++i) {
        points.push_back(space.model_points[i]);
        out.labels.push_back(space.model_labels[i]);
        out.kinds.push_back(EntityKind::Model);
    }
    for (std::size_t i = 0; i < space.task_points.size(); ++i) {
        points.push_back(space.task_points[i]);
        out.labels.push_back(space.task_labels[i]);
        out.kinds.push_back(EntityKind::Task);
    }
    if (points.size() < 3) throw Error("2D projection needs at least 3 points");

    std::vector<StressTerm> terms;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            terms.push_back({i, j, distance(space.geometry, points[i], points[j])});

    const Geometry plane{GeometryKind::Euclidean, 2, space.geometry.ball_epsilon};
    const auto pca = pca_2d(points);
    std::vector<Point> layout;
    layout.reserve(pca.size());
    for (const auto& c : pca) layout.push_back({c[0], c[1]});

    if (method == ProjectionMethod::Stress2d) {
        StressProblem problem;
        problem.geometry = plane;
        problem.n_points = points.size();
        problem.terms = terms;
        problem.initial = layout;
        layout = minimize_stress(problem, config).points;
    }
    out.coords.reserve(layout.size());
    for (const auto& p : layout) out.coords.push_back({p[0], p[1]});
    out.stress = stress(plane, layout, terms);
    return out;
}

}  // namespace capenc
