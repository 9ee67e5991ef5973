#pragma once

// Corpus and embedding diagnostics: per-task spread of literature results,
// model centrality in the latent space, and 2D maps for display.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "capenc/embedder.hpp"
#include "capenc/results_db.hpp"

namespace capenc {

struct SaturationThresholds {
    double min_mean = 95.0;
    double max_sigma = 1.5;
};

struct QualityRow {
    TaskKey task;
    double sigma = 0.0;  // population standard deviation of raw values
    double mu = 0.0;
    std::size_t n = 0;
    bool saturated = false;
};

/// A task is saturated when its metric tops out at 100, its mean is at least
/// min_mean and its spread at most max_sigma.
bool is_saturated(std::string_view metric, double mu, double sigma,
                  const SaturationThresholds& thresholds = {});

/// One row per task, sorted by sigma descending (ties keep first-appearance order).
std::vector<QualityRow> dataset_quality(const ResultsDb& db,
                                        const SaturationThresholds& thresholds = {});

struct CentralityRow {
    std::string model;
    double centrality = 0.0;  // mean distance to every task point
    std::size_t rank = 0;     // 1 = most central
};

/// Rows in rank order; ties broken by label.
std::vector<CentralityRow> centrality(const EmbeddingSpace& space);

enum class ProjectionMethod { Stress2d, Pca };

std::string_view to_string(ProjectionMethod method);
std::optional<ProjectionMethod> parse_projection_method(std::string_view text);

struct Projection2d {
    std::vector<std::string> labels;  // models first, then tasks
    std::vector<EntityKind> kinds;
    std::vector<std::array<double, 2>> coords;
    double stress = 0.0;  // mean squared error between 2D and latent distances, all pairs
};

/// Principal-component projection of the raw coordinates onto two axes; each
/// axis is signed so its largest-magnitude loading is positive.
std::vector<std::array<double, 2>> pca_2d(const std::vector<Point>& points);

/// pca: the projection above. stress2d: a 2D Euclidean stress fit of all
/// pairwise latent distances, started from the PCA layout. Needs >= 3 points.
Projection2d project_2d(const EmbeddingSpace& space, ProjectionMethod method,
                        const FitConfig& config = {});

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    std::string label;
    EntityKind kind = EntityKind::Model;
    std::string cls;  // color key
};

/// Standalone SVG: circles for models, squares for tasks, one color per class
/// (in first-appearance order), text labels and a legend. Output bytes depend
/// only on the input.
std::string render_scatter(const std::vector<ScatterPoint>& points,
                           std::string_view title = "capabilities map");

}  // namespace capenc
