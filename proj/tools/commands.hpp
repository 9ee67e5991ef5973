#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "capenc/analysis.hpp"
#include "capenc/embedder.hpp"
#include "capenc/geometry.hpp"
#include "capenc/results_db.hpp"

namespace capenc::cli {

namespace fs = std::filesystem;

/// Optimizer flags shared by embed, place and eval.
struct FitFlags {
    int iterations = 5000;
    double learning_rate = 0.01;
    std::string optimizer = "adam";
    double tolerance = 1e-7;
    double init_scale = 0.1;
    std::uint64_t seed = 42;

    FitConfig to_config() const;
};

struct IngestOptions {
    fs::path input;
    std::optional<std::string> format;
    bool aggregate = false;
    std::size_t min_degree = 0;
    std::optional<std::size_t> min_task_degree;  // defaults to min_degree
    fs::path out;
};

struct EmbedOptions {
    fs::path db;
    std::string geometry = "euclidean";
    int dim = 5;
    double ball_epsilon = 1e-5;
    FitFlags fit;
    fs::path out;
};

struct PredictOptions {
    fs::path embedding;
    std::string model;
    std::string task;
    bool raw = false;
};

struct PlaceOptions {
    fs::path embedding;
    std::string kind;
    std::string name;
    fs::path results;
    fs::path out;
    int restarts = 8;
    FitFlags fit;
};

struct EvalOptions {
    fs::path db;
    std::size_t splits = 10;
    std::size_t holdout = 10;
    std::string geometries = "all";
    int dim = 5;
    double ball_epsilon = 1e-5;
    std::uint64_t split_seed = 42;
    FitFlags fit;
    fs::path out;
};

struct AnalyzeOptions {
    fs::path db;
    fs::path embedding;
    std::string method = "stress2d";
    double min_mean = 95.0;
    double max_sigma = 1.5;
    fs::path out;
};

// Each returns the process exit code; data errors are thrown as capenc::Error.
int cmd_ingest(const IngestOptions& opt);
int cmd_embed(const EmbedOptions& opt);
int cmd_predict(const PredictOptions& opt);
int cmd_place(const PlaceOptions& opt);
int cmd_eval(const EvalOptions& opt);
int cmd_analyze(const AnalyzeOptions& opt);

}  // namespace capenc::cli
