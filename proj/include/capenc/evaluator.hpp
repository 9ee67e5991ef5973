#pragma once

// Repeated random-holdout validation: hide a few observed (model, task)
// entries, fit on the rest, and compare the latent distance of each hidden
// pair with its true delta.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "capenc/embedder.hpp"
#include "capenc/geometry.hpp"
#include "capenc/normalize.hpp"

namespace capenc {

class SplitPlan {
public:
    /// Throws Error when n_splits or holdout_size is zero.
    SplitPlan(std::size_t n_splits = 10, std::size_t holdout_size = 10, std::uint64_t seed = 42);

    std::size_t n_splits() const noexcept { return n_splits_; }
    std::size_t holdout_size() const noexcept { return holdout_size_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::size_t n_splits_;
    std::size_t holdout_size_;
    std::uint64_t seed_;
};

struct Split {
    std::vector<std::size_t> holdout;  // entry indices, in draw order
    std::vector<std::size_t> train;    // entry indices, ascending
    std::vector<std::string> log;      // resampled candidates and why
};

/// Draws every split of the plan. Candidates whose removal would leave their
/// model or task without a training entry are skipped and logged. Depends only
/// on the matrix and the plan, so all geometries see the same holdouts.
std::vector<Split> make_splits(const DeltaMatrix& delta, const SplitPlan& plan);

struct PredictionRow {
    std::size_t split = 0;
    std::size_t entry = 0;  // index into DeltaMatrix::entries
    std::string model;
    std::string task;
    double true_delta = 0.0;
    double predicted_delta = 0.0;
    std::size_t model_degree = 0;  // training entries of the model in this split
};

struct SkippedRow {
    std::size_t split = 0;
    std::string model;
    std::string task;
    std::string reason;
};

struct ErrorSummary {
    std::size_t count = 0;
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> pearson;  // undefined when either side has zero variance
};

ErrorSummary summarize_errors(const std::vector<PredictionRow>& rows);

struct EvalReport {
    Geometry geometry;
    std::vector<PredictionRow> rows;
    std::vector<SkippedRow> skipped;
    std::vector<std::vector<std::size_t>> holdout_sets;  // per split
    std::vector<double> train_losses;                    // per split
    std::vector<std::string> log;
    ErrorSummary summary;
};

EvalReport run_splits(const DeltaMatrix& delta, const Geometry& geometry, const SplitPlan& plan,
                      const FitConfig& config);

/// Euclidean, cosine and Poincare evaluated on identical holdouts. dim and
/// ball_epsilon come from base.
std::vector<EvalReport> compare_geometries(const DeltaMatrix& delta, const SplitPlan& plan,
                                           const FitConfig& config, const Geometry& base = {});

struct DegreeBucket {
    std::size_t lo = 0;
    std::optional<std::size_t> hi;  // inclusive; open-ended when empty
    std::size_t count = 0;
    std::optional<double> mean_abs_error;
    std::optional<double> error_std;  // population std of signed errors

    std::string label() const;  // "5-9", "20+"
};

struct DegreeErrorTable {
    std::vector<DegreeBucket> buckets;
    std::vector<std::pair<std::size_t, double>> points;  // (degree, signed error)
};

/// Buckets predictions by the held-out model's training degree. edges are the
/// inclusive lower bounds; the default gives 1-4, 5-9, 10-19, 20+.
DegreeErrorTable error_by_degree(const EvalReport& report,
                                 const std::vector<std::size_t>& edges = {1, 5, 10, 20});

}  // namespace capenc
