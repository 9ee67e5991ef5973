#pragma once

// Shared generators for the unit and acceptance suites. Everything here is a
// plain function of a seed so failures reproduce.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "capenc/capenc.hpp"
#include "capenc/random.hpp"

namespace capenc::testing {

inline std::string model_name(std::size_t i) { return "m" + std::to_string(i); }
inline std::string task_name(std::size_t i) { return "t" + std::to_string(i); }

/// Ground-truth configuration plus the delta matrix it induces.
struct Planted {
    std::vector<Point> models;
    std::vector<Point> tasks;
    DeltaMatrix delta;
};

inline double euclid(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

/// Gaussian points, rescaled so the largest model-task distance is 1. With
/// observe < 1 each pair is kept with that probability, but every model and
/// task keeps at least one entry.
inline Planted planted(std::size_t n_models, std::size_t n_tasks, int dim, std::uint64_t seed,
                       double observe = 1.0) {
    Rng rng(seed);
    Planted p;
    for (std::size_t i = 0; i < n_models; ++i) {
        Point x(dim);
        for (auto& c : x) c = rng.normal();
        p.models.push_back(std::move(x));
    }
    for (std::size_t j = 0; j < n_tasks; ++j) {
        Point x(dim);
        for (auto& c : x) c = rng.normal();
        p.tasks.push_back(std::move(x));
    }
    double dmax = 0.0;
    for (const auto& m : p.models)
        for (const auto& t : p.tasks) dmax = std::max(dmax, euclid(m, t));
    for (auto& m : p.models)
        for (auto& c : m) c /= dmax;
    for (auto& t : p.tasks)
        for (auto& c : t) c /= dmax;

    for (std::size_t i = 0; i < n_models; ++i) p.delta.models.push_back({model_name(i), ""});
    for (std::size_t j = 0; j < n_tasks; ++j) {
        p.delta.tasks.push_back({task_name(j), 100.0, "OA"});
        p.delta.task_stats.push_back({100.0, 10.0, false});
    }
    for (std::size_t i = 0; i < n_models; ++i)
        for (std::size_t j = 0; j < n_tasks; ++j) {
            const bool keep = observe >= 1.0 || rng.uniform() < observe || j == i % n_tasks ||
                              i == j % n_models;
            if (!keep) continue;
            const double d = euclid(p.models[i], p.tasks[j]);
            p.delta.entries.push_back({i, j, 10.0 * d, d});
        }
    return p;
}

/// Random sparse aggregated corpus with distinct (model, task) pairs.
inline ResultsDb random_corpus(Rng& rng, std::size_t max_models, std::size_t max_tasks,
                               double density) {
    const std::size_t nm = 1 + rng.below(max_models);
    const std::size_t nt = 1 + rng.below(max_tasks);
    std::vector<PerformanceRecord> records;
    for (std::size_t i = 0; i < nm; ++i)
        for (std::size_t j = 0; j < nt; ++j) {
            if (rng.uniform() >= density) continue;
            PerformanceRecord r;
            r.model = {model_name(i), (i % 3 == 0) ? "ViT-B" : ""};
            r.task = {"d" + std::to_string(j), (j % 4 == 0) ? 10.0 : 100.0, "OA"};
            r.value = std::round(rng.uniform(40.0, 100.0) * 100.0) / 100.0;
            r.row = records.size() + 1;
            records.push_back(std::move(r));
        }
    rng.shuffle(records);
    return ResultsDb(std::move(records));
}

/// Scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        Rng rng(std::hash<std::string>{}(tag) ^ reinterpret_cast<std::uintptr_t>(this));
        path_ = std::filesystem::temp_directory_path() /
                ("capenc-" + tag + "-" + std::to_string(rng.below(1'000'000'000)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace capenc::testing
