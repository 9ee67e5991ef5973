#include "capenc/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "capenc/error.hpp"
#include "capenc/random.hpp"

namespace capenc {

namespace {

struct SplitOutcome {
    std::vector<PredictionRow> rows;
    std::vector<SkippedRow> skipped;
    double train_loss = 0.0;
};

SplitOutcome evaluate_split(const DeltaMatrix& delta, const Geometry& geometry, const Split& split,
                            std::size_t index, const FitConfig& config) {
    FitConfig run = config;
    run.seed = derive_seed(config.seed, index);
    const auto space = fit(delta.subset(split.train), geometry, run);

    std::vector<std::size_t> degree(delta.models.size(), 0);
    for (std::size_t e : split.train) ++degree[delta.entries[e].model];

    SplitOutcome out;
    out.train_loss = space.report.final_loss;
    for (std::size_t e : split.holdout) {
        const auto& entry = delta.entries[e];
        PredictionRow row;
        row.split = index;
        row.entry = e;
        row.model = space.model_labels[entry.model];
        row.task = space.task_labels[entry.task];
        row.true_delta = entry.delta;
        row.predicted_delta =
            distance(geometry, space.model_points[entry.model], space.task_points[entry.task]);
        row.model_degree = degree[entry.model];
        if (!std::isfinite(row.predicted_delta)) {
            out.skipped.push_back({index, row.model, row.task, "non-finite predicted distance"});
            continue;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace

SplitPlan::SplitPlan(std::size_t n_splits, std::size_t holdout_size, std::uint64_t seed)
    : n_splits_(n_splits), holdout_size_(holdout_size), seed_(seed) {
    if (n_splits_ == 0) throw Error("split plan needs at least one split");
    if (holdout_size_ == 0) throw Error("split plan needs a holdout size of at least one");
}

std::vector<Split> make_splits(const DeltaMatrix& delta, const SplitPlan& plan) {
    const std::size_t n = delta.entries.size();
    if (n <= plan.holdout_size())
        throw Error("delta matrix has " + std::to_string(n) +
                    " entries; need more than the holdout size " +
                    std::to_string(plan.holdout_size()));

    std::vector<std::size_t> model_total(delta.models.size(), 0), task_total(delta.tasks.size(), 0);
    for (const auto& e : delta.entries) {
        ++model_total[e.model];
        ++task_total[e.task];
    }

    std::vector<Split> splits;
    splits.reserve(plan.n_splits());
    for (std::size_t s = 0; s < plan.n_splits(); ++s) {
        Rng rng(derive_seed(plan.seed(), s));
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        rng.shuffle(order);

        auto model_left = model_total;
        auto task_left = task_total;
        Split split;
        std::vector<bool> held(n, false);
        for (std::size_t candidate : order) {
            if (split.holdout.size() == plan.holdout_size()) break;
            const auto& e = delta.entries[candidate];
            if (model_left[e.model] <= 1 || task_left[e.task] <= 1) {
                split.log.push_back("split " + std::to_string(s) + ": resampled (" +
                                    delta.models[e.model].label() + ", " +
                                    delta.tasks[e.task].label() + "): would leave its " +
                                    (model_left[e.model] <= 1 ? "model" : "task") +
                                    " without training entries");
                continue;
            }
            --model_left[e.model];
            --task_left[e.task];
            held[candidate] = true;
            split.holdout.push_back(candidate);
        }
        if (split.holdout.size() < plan.holdout_size())
            throw Error("delta matrix too small for the split plan: only " +
                        std::to_string(split.holdout.size()) + " of " +
                        std::to_string(plan.holdout_size()) +
                        " holdout entries can be removed without orphaning a model or task");
        for (std::size_t i = 0; i < n; ++i)
            if (!held[i]) split.train.push_back(i);
        splits.push_back(std::move(split));
    }
    return splits;
}

ErrorSummary summarize_errors(const std::vector<PredictionRow>& rows) {
    ErrorSummary s;
    s.count = rows.size();
    if (rows.empty()) return s;
    const double n = static_cast<double>(rows.size());
    double se = 0.0, ae = 0.0, mean_t = 0.0, mean_p = 0.0;
    for (const auto& r : rows) {
        const double err = r.predicted_delta - r.true_delta;
        se += err * err;
        ae += std::abs(err);
        mean_t += r.true_delta;
        mean_p += r.predicted_delta;
    }
    s.rmse = std::sqrt(se / n);
    s.mae = ae / n;
    mean_t /= n;
    mean_p /= n;
    double stt = 0.0, spp = 0.0, stp = 0.0;
    for (const auto& r : rows) {
        const double dt = r.true_delta - mean_t;
        const double dp = r.predicted_delta - mean_p;
        stt += dt * dt;
        spp += dp * dp;
        stp += dt * dp;
    }
    if (stt > 0.0 && spp > 0.0) s.pearson = stp / std::sqrt(stt * spp);
    return s;
}

EvalReport run_splits(const DeltaMatrix& delta, const Geometry& geometry, const SplitPlan& plan,
                      const FitConfig& config) {
    geometry.validate();
    config.validate();
    const auto splits = make_splits(delta, plan);

    // Splits are independent; results are gathered in split order.
    std::vector<SplitOutcome> outcomes(splits.size());
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(splits.size(),
                                                        std::thread::hardware_concurrency()));
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t s = w; s < splits.size(); s += workers)
                outcomes[s] = evaluate_split(delta, geometry, splits[s], s, config);
        }));
    }
    for (auto& job : jobs) job.get();

    EvalReport report;
    report.geometry = geometry;
    for (std::size_t s = 0; s < splits.size(); ++s) {
        report.holdout_sets.push_back(splits[s].holdout);
        report.log.insert(report.log.end(), splits[s].log.begin(), splits[s].log.end());
        report.train_losses.push_back(outcomes[s].train_loss);
        for (auto& row : outcomes[s].rows) report.rows.push_back(std::move(row));
        for (auto& skip : outcomes[s].skipped) {
            report.log.push_back("split " + std::to_string(skip.split) + ": skipped (" + skip.model +
                                 ", " + skip.task + "): " + skip.reason);
            report.skipped.push_back(std::move(skip));
        }
    }
    report.summary = summarize_errors(report.rows);
    return report;
}

std::vector<EvalReport> compare_geometries(const DeltaMatrix& delta, const SplitPlan& plan,
                                           const FitConfig& config, const Geometry& base) {
    std::vector<EvalReport> reports;
    for (auto kind : {GeometryKind::Euclidean, GeometryKind::Cosine, GeometryKind::Poincare}) {
        Geometry g = base;
        g.kind = kind;
        reports.push_back(run_splits(delta, g, plan, config));
    }
    return reports;
}

std::string DegreeBucket::label() const {
    if (!hi) return std::to_string(lo) + "+";
    return std::to_string(lo) + "-" + std::to_string(*hi);
}

DegreeErrorTable error_by_degree(const EvalReport& report, const std::vector<std::size_t>& edges) {
    if (edges.empty() || !std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw Error("degree bucket edges must be non-empty and strictly increasing");

    DegreeErrorTable table;
    std::vector<std::vector<double>> errors(edges.size());
    for (std::size_t b = 0; b < edges.size(); ++b) {
        DegreeBucket bucket;
        bucket.lo = edges[b];
        if (b + 1 < edges.size()) bucket.hi = edges[b + 1] - 1;
        table.buckets.push_back(bucket);
    }
    for (const auto& row : report.rows) {
        const double err = row.predicted_delta - row.true_delta;
        table.points.emplace_back(row.model_degree, err);
        const auto it = std::upper_bound(edges.begin(), edges.end(), row.model_degree);
        const std::size_t b = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
        errors[b].push_back(err);
    }
    for (std::size_t b = 0; b < edges.size(); ++b) {
        auto& bucket = table.buckets[b];
        const auto& errs = errors[b];
        bucket.count = errs.size();
        if (errs.empty()) continue;
        const double n = static_cast<double>(errs.size());
        double abs_sum = 0.0, mean = 0.0;
        for (double e : errs) {
            abs_sum += std::abs(e);
            mean += e;
        }
        mean /= n;
        double var = 0.0;
        for (double e : errs) var += (e - mean) * (e - mean);
        bucket.mean_abs_error = abs_sum / n;
        bucket.error_std = std::sqrt(var / n);
    }
    return table;
}

}  // namespace capenc
