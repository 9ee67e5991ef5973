#pragma once

// Fits one point per model and per task so that latent distances reproduce
// the normalized gaps: minimizes the mean over observed (model, task) entries
// of (d(x_m, x_t) - delta)^2 with a first-order optimizer and a projection
// onto the geometry's domain after every step.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capenc/error.hpp"
#include "capenc/geometry.hpp"
#include "capenc/normalize.hpp"

namespace capenc {

enum class OptimizerKind { GradientDescent, Adam };

std::string_view to_string(OptimizerKind kind);
std::optional<OptimizerKind> parse_optimizer_kind(std::string_view text);

struct FitConfig {
    int max_iterations = 5000;
    double learning_rate = 0.01;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    /// Stop when the loss changed by less than this fraction over
    /// convergence_window iterations.
    double convergence_tolerance = 1e-7;
    int convergence_window = 50;
    double init_scale = 0.1;
    std::uint64_t seed = 42;
    int place_restarts = 8;

    void validate() const;
};

struct FitReport {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    double loss_at_tenth = 0.0;  // loss after 10% of max_iterations (or at stop)
    int iterations = 0;
    bool converged = false;
    std::uint64_t seed = 0;
};

/// Raised when the loss stops being finite; names the iteration and the pair.
class NonFiniteLoss : public Error {
public:
    NonFiniteLoss(std::string message, int iteration, std::size_t first, std::size_t second)
        : Error(std::move(message)), iteration_(iteration), first_(first), second_(second) {}
    int iteration() const noexcept { return iteration_; }
    std::size_t first() const noexcept { return first_; }
    std::size_t second() const noexcept { return second_; }

private:
    int iteration_;
    std::size_t first_, second_;
};

/// One squared-residual term of a stress objective between points i and j.
struct StressTerm {
    std::size_t i = 0;
    std::size_t j = 0;
    double target = 0.0;
};

struct StressSolution {
    std::vector<Point> points;
    FitReport report;
};

struct StressProblem {
    Geometry geometry;
    std::size_t n_points = 0;
    std::vector<StressTerm> terms;
    /// Optional starting positions (projected before use). Uniform random in
    /// [-init_scale, init_scale]^dim when empty.
    std::vector<Point> initial;
    /// Points flagged true are never moved.
    std::vector<bool> frozen;
};

/// Mean squared residual over the terms.
double stress(const Geometry& g, std::span<const Point> points, std::span<const StressTerm> terms);

/// Minimizes the stress; returns the lowest-loss iterate seen, so the result
/// never has a higher loss than the starting configuration.
StressSolution minimize_stress(const StressProblem& problem, const FitConfig& config);

class EmbeddingSpace {
public:
    Geometry geometry;
    std::vector<std::string> model_labels;
    std::vector<std::string> task_labels;
    std::vector<Point> model_points;  // parallel to model_labels
    std::vector<Point> task_points;   // parallel to task_labels
    FitReport report;

    std::optional<std::size_t> find_model(std::string_view label) const;
    std::optional<std::size_t> find_task(std::string_view label) const;
    const Point& model_point(std::string_view label) const;
    const Point& task_point(std::string_view label) const;

    /// Checks label uniqueness, sizes and geometry domain of every point.
    void validate() const;
};

/// Mean over the observed entries of delta of (d(x_m, x_t) - delta)^2.
/// Throws if the space lacks a point for one of delta's models or tasks.
double loss(const EmbeddingSpace& space, const DeltaMatrix& delta);

EmbeddingSpace fit(const DeltaMatrix& delta, const Geometry& geometry, const FitConfig& config);

enum class EntityKind { Model, Task };

std::string_view to_string(EntityKind kind);
std::optional<EntityKind> parse_entity_kind(std::string_view text);

struct Placement {
    Point point;
    double loss = 0.0;  // residual loss over the known entries
    int best_restart = 0;
};

/// Fits a single new point against a frozen space. known maps labels of the
/// opposite kind (tasks for a new model, models for a new task) to deltas.
/// Runs config.place_restarts seeded restarts and keeps the best.
Placement place_entity(const EmbeddingSpace& space, EntityKind kind,
                       const std::map<std::string, double>& known, const FitConfig& config);

/// Returns a copy of space with the placed point appended under label.
EmbeddingSpace with_entity(const EmbeddingSpace& space, EntityKind kind, const std::string& label,
                           const Point& point);

}  // namespace capenc
