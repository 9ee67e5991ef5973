// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run all criteria
//   acceptance --criterion N   run one (exit status reflects it)

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capenc/capenc.hpp"
#include "capenc/text.hpp"
#include "fixtures.hpp"

using namespace capenc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << x;
    return s.str();
}

// 8 models + 8 tasks in R^5, all 64 pairs observed.
constexpr std::uint64_t kPlantedSeed = 20240501;

testing::Planted planted_8x8() { return testing::planted(8, 8, 5, kPlantedSeed); }

// 20% of 64 entries held out per split, 10 splits.
const SplitPlan kSparsePlan(10, 13, 42);

Outcome criterion_1() {
    const auto start = Clock::now();
    const auto db = ingest(fs::path(CAPENC_DATA_DIR) / "table_norm.csv", DbFormat::Csv);
    const auto delta = normalize(aggregate_max(db));
    const std::map<std::string, std::pair<double, double>> expected{
        {"ResNet50 IN", {4.4, 1.0}}, {"SkySense", {0.0, 0.0}}, {"RingMo", {0.9, 0.9 / 4.4}}};
    bool ok = delta.entries.size() == 3;
    std::string got;
    for (const auto& e : delta.entries) {
        const auto& [gap, d] = expected.at(delta.models[e.model].label());
        ok = ok && e.gap == gap && std::abs(e.delta - d) <= 1e-9;
        got += delta.models[e.model].label() + " " + text::format_double(e.gap) + "/" + fmt(e.delta, 6) + "; ";
    }
    const double t = seconds_since(start);
    ok = ok && t < 1.0;
    return {ok, got + "t=" + fmt(t, 2) + "s"};
}

Outcome criterion_2() {
    const auto start = Clock::now();
    const auto p = planted_8x8();
    const auto s = fit(p.delta, Geometry{}, FitConfig{});
    double worst = 0.0;
    for (const auto& e : p.delta.entries)
        worst = std::max(worst, std::abs(distance(s.geometry, s.model_points[e.model], s.task_points[e.task]) - e.delta));
    const double t = seconds_since(start);
    const bool ok = s.report.final_loss < 1e-4 && worst < 0.02 && t < 30.0;
    return {ok, "loss=" + fmt(s.report.final_loss, 3) + " max|d-delta|=" + fmt(worst, 3) + " t=" + fmt(t, 2) + "s"};
}

Outcome criterion_3() {
    const auto start = Clock::now();
    const auto p = planted_8x8();
    const auto e = run_splits(p.delta, Geometry{GeometryKind::Euclidean, 5, 1e-5}, kSparsePlan, FitConfig{});
    const auto b = run_splits(p.delta, Geometry{GeometryKind::Poincare, 5, 1e-5}, kSparsePlan, FitConfig{});
    const double t = seconds_since(start);
    const bool ok = e.summary.rmse < 0.05 && b.summary.rmse < 0.05 && t < 300.0;
    return {ok, "rmse euclidean=" + fmt(e.summary.rmse) + " poincare=" + fmt(b.summary.rmse) +
                    " (threshold 0.05) t=" + fmt(t, 2) + "s"};
}

Outcome criterion_4() {
    const auto p = planted_8x8();
    const auto reports = compare_geometries(p.delta, kSparsePlan, FitConfig{});
    const double e = reports[0].summary.rmse, c = reports[1].summary.rmse;
    return {e <= c, "rmse euclidean=" + fmt(e) + " cosine=" + fmt(c)};
}

Point sample(const Geometry& g, Rng& rng) {
    Point p(g.dim);
    for (auto& c : p) c = rng.normal();
    if (g.kind == GeometryKind::Poincare) {
        const double r = rng.uniform(0.0, 0.95), n = norm(p);
        for (auto& c : p) c *= r / n;
    }
    return p;
}

Outcome criterion_5() {
    const auto start = Clock::now();
    const double h = 1e-6;
    std::string detail;
    std::size_t failures = 0;
    for (const auto kind : {GeometryKind::Euclidean, GeometryKind::Cosine, GeometryKind::Poincare}) {
        const Geometry g{kind, 5, 1e-5};
        Rng rng(derive_seed(5, static_cast<std::uint64_t>(kind)));
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const auto u = sample(g, rng), v = sample(g, rng);
            const auto grad = distance_gradient(g, u, v);
            // relative error of the full (d/du, d/dv) vector against central differences
            double diff = 0.0, ref = 0.0;
            for (int side = 0; side < 2; ++side) {
                Point a = side == 0 ? u : v;
                const Point& other = side == 0 ? v : u;
                const Point& analytic = side == 0 ? grad.d_u : grad.d_v;
                for (std::size_t k = 0; k < a.size(); ++k) {
                    const double x = a[k];
                    a[k] = x + h;
                    const double up = distance(g, a, other);
                    a[k] = x - h;
                    const double down = distance(g, a, other);
                    a[k] = x;
                    const double fd = (up - down) / (2 * h);
                    diff += (analytic[k] - fd) * (analytic[k] - fd);
                    ref += fd * fd;
                }
            }
            const double rel = std::sqrt(diff) / std::max(std::sqrt(ref), 1e-300);
            worst = std::max(worst, rel);
            if (!(rel < 1e-5)) ++failures;
        }
        detail += std::string(to_string(kind)) + " max rel=" + fmt(worst, 2) + "; ";
    }
    const double t = seconds_since(start);
    return {failures == 0 && t < 10.0, detail + "failures=" + std::to_string(failures) + " t=" + fmt(t, 2) + "s"};
}

Outcome criterion_6() {
    std::size_t violations = 0;
    double worst_triangle = 0.0, worst_radial = 0.0;
    for (const auto kind : {GeometryKind::Euclidean, GeometryKind::Poincare}) {
        const Geometry g{kind, 5, 1e-5};
        Rng rng(derive_seed(6, static_cast<std::uint64_t>(kind)));
        for (int trial = 0; trial < 1000; ++trial) {
            const auto a = sample(g, rng), b = sample(g, rng), c = sample(g, rng);
            if (distance(g, a, b) != distance(g, b, a)) ++violations;
            if (distance(g, a, a) != 0.0) ++violations;
            const double slack = distance(g, a, c) - distance(g, a, b) - distance(g, b, c);
            worst_triangle = std::max(worst_triangle, slack);
            if (slack > 1e-9) ++violations;
        }
    }
    const Geometry ball{GeometryKind::Poincare, 5, 1e-5};
    Rng rng(66);
    const Point origin(5, 0.0);
    for (int trial = 0; trial < 1000; ++trial) {
        Point v = sample(ball, rng);
        const double r = rng.uniform(0.0, 0.99), n = norm(v);
        if (n == 0.0) continue;
        for (auto& c : v) c *= r / n;
        const double err = std::abs(distance(ball, origin, v) - 2.0 * std::atanh(norm(v)));
        worst_radial = std::max(worst_radial, err);
        if (err > 1e-9) ++violations;
    }
    return {violations == 0, "violations=" + std::to_string(violations) + " max triangle slack=" +
                                 fmt(worst_triangle, 2) + " max radial err=" + fmt(worst_radial, 2)};
}

Outcome criterion_7() {
    std::size_t checked = 0, violations = 0;
    auto check_space = [&](const EmbeddingSpace& s) {
        const double limit = 1.0 - s.geometry.ball_epsilon;
        for (const auto* pts : {&s.model_points, &s.task_points})
            for (const auto& x : *pts) {
                ++checked;
                if (!(norm(x) <= limit)) ++violations;
            }
    };
    for (const double eps : {1e-5, 1e-3, 0.05}) {
        const Geometry g{GeometryKind::Poincare, 5, eps};
        // planted data at three scales, including targets far beyond the ball's comfort zone
        for (const double scale : {1.0, 5.0, 30.0}) {
            auto p = testing::planted(8, 8, 5, 700 + static_cast<std::uint64_t>(scale), 0.8);
            for (auto& e : p.delta.entries) e.delta *= scale;
            FitConfig cfg;
            cfg.learning_rate = 0.05;
            const auto s = fit(p.delta, g, cfg);
            check_space(s);
            const auto placed = place_entity(s, EntityKind::Model, {{"t0@100%/OA", 2.0 * scale}, {"t1@100%/OA", 0.1}}, cfg);
            ++checked;
            if (!(norm(placed.point) <= 1.0 - eps)) ++violations;
        }
    }
    // evaluation fits: every prediction must come from an in-ball pair, i.e. be finite
    const auto p = planted_8x8();
    const auto report = run_splits(p.delta, Geometry{GeometryKind::Poincare, 5, 1e-5}, SplitPlan(3, 13, 7), FitConfig{});
    for (const auto& r : report.rows)
        if (!std::isfinite(r.predicted_delta)) ++violations;
    return {violations == 0 && checked > 0,
            "points checked=" + std::to_string(checked) + " violations=" + std::to_string(violations)};
}

// Models with degrees spread over 2..30 on a planted configuration; every
// observed delta carries the same Gaussian noise.
DeltaMatrix degree_corpus() {
    const std::size_t n_models = 58, n_tasks = 36;
    const int dim = 3;
    const auto p = testing::planted(n_models, n_tasks, dim, 8080);
    Rng rng(8081);
    DeltaMatrix d;
    d.models = p.delta.models;
    d.tasks = p.delta.tasks;
    d.task_stats = p.delta.task_stats;
    for (std::size_t i = 0; i < n_models; ++i) {
        const std::size_t degree = 2 + i % 29;  // 2..30
        std::vector<std::size_t> order(n_tasks);
        for (std::size_t j = 0; j < n_tasks; ++j) order[j] = j;
        rng.shuffle(order);
        for (std::size_t k = 0; k < degree; ++k) {
            const std::size_t j = order[k];
            const double truth = testing::euclid(p.models[i], p.tasks[j]);
            d.entries.push_back({i, j, truth, truth + 0.02 * rng.normal()});
        }
    }
    return d;
}

Outcome criterion_8() {
    const auto d = degree_corpus();
    const auto report = run_splits(d, Geometry{GeometryKind::Euclidean, 3, 1e-5}, SplitPlan(10, 60, 8), FitConfig{});
    const auto table = error_by_degree(report);
    bool ok = true;
    std::string detail;
    std::optional<double> previous;
    for (const auto& b : table.buckets) {
        detail += b.label() + ": n=" + std::to_string(b.count) +
                  " mae=" + (b.mean_abs_error ? fmt(*b.mean_abs_error) : "-") + "; ";
        if (!b.mean_abs_error) {
            ok = false;  // every bucket must be populated for the trend to mean anything
            continue;
        }
        if (previous && *b.mean_abs_error > *previous) ok = false;
        previous = b.mean_abs_error;
    }
    return {ok, detail};
}

int run(const std::string& command) { return std::system(command.c_str()); }

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto bytes = text::read_file(entry.path());
        if (entry.path().filename().string().find("manifest") != std::string::npos) {
            auto doc = nlohmann::json::parse(bytes);
            doc.erase("wall_clock_seconds");  // the one field that measures time, not content
            bytes = doc.dump(2);
        }
        out[fs::relative(entry.path(), dir).generic_string()] = std::move(bytes);
    }
    return out;
}

Outcome criterion_9() {
    testing::TempDir scratch("determinism");
    std::vector<std::map<std::string, std::string>> runs;
    for (const char* name : {"a", "b"}) {
        const auto dir = scratch / name;
        fs::create_directories(dir);
        fs::copy_file(fs::path(CAPENC_DATA_DIR) / "sample_corpus.csv", dir / "corpus.csv");
        const std::string cli = quote(CAPENC_CLI);
        const std::string script =
            "cd " + quote(dir) + " && " + cli + " ingest --input corpus.csv --aggregate --min-degree 3 --out db.csv" +
            " && " + cli + " embed --db db.csv --seed 7 --out emb.json" + " && " + cli +
            " eval --db db.csv --seed 7 --splits 4 --out eval" + " && " + cli +
            " analyze --db db.csv --embedding emb.json --out analysis";
        if (run("(" + script + ") > /dev/null 2>&1") != 0) return {false, "pipeline failed in run " + std::string(name)};
        runs.push_back(snapshot(dir));
    }
    std::size_t differing = 0;
    for (const auto& [file, bytes] : runs[0]) {
        const auto it = runs[1].find(file);
        if (it == runs[1].end() || it->second != bytes) ++differing;
    }
    const bool ok = differing == 0 && runs[0].size() == runs[1].size() && runs[0].size() >= 14;
    return {ok, std::to_string(runs[0].size()) + " files compared, " + std::to_string(differing) + " differ"};
}

Outcome criterion_10() {
    Rng rng(1010);
    std::size_t mismatches = 0, nonempty = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto db = testing::random_corpus(rng, 30, 30, rng.uniform(0.05, 0.45));
        const std::size_t km = 1 + rng.below(5), kt = 1 + rng.below(5);
        // reference: recount and drop until nothing changes
        std::set<std::pair<std::string, std::string>> alive;
        for (const auto& r : db.records()) alive.insert({r.model.label(), r.task.label()});
        for (bool changed = true; changed;) {
            changed = false;
            std::map<std::string, std::size_t> dm, dt;
            for (const auto& [m, t] : alive) ++dm[m], ++dt[t];
            for (auto it = alive.begin(); it != alive.end();) {
                if (dm[it->first] < km || dt[it->second] < kt) {
                    it = alive.erase(it);
                    changed = true;
                } else {
                    ++it;
                }
            }
        }
        std::set<std::pair<std::string, std::string>> got;
        const auto filtered = filter_min_degree(db, km, kt);
        for (const auto& r : filtered.db.records()) got.insert({r.model.label(), r.task.label()});
        if (got != alive) ++mismatches;
        if (!got.empty()) ++nonempty;
    }
    return {mismatches == 0, "100 corpora, " + std::to_string(mismatches) + " mismatches, " +
                                 std::to_string(nonempty) + " non-empty results"};
}

Outcome criterion_11() {
    Rng rng(1111);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto db = testing::random_corpus(rng, 20, 15, rng.uniform(0.2, 0.8));
        for (const auto& q : dataset_quality(db)) {
            std::vector<double> v;
            for (const auto& r : db.records())
                if (r.task == q.task) v.push_back(r.value);
            double sum = 0.0;
            for (double x : v) sum += x;
            const double mu = sum / v.size();
            double ss = 0.0;
            for (double x : v) ss += (x - mu) * (x - mu);
            worst = std::max({worst, std::abs(q.mu - mu), std::abs(q.sigma - std::sqrt(ss / v.size()))});
        }
    }
    // a two-value task with mean 99.19 and population sigma 0.6
    const auto ucm = ingest_csv_text("method,dataset,metric,value\nA,UCMerced,OA,98.59\nB,UCMerced,OA,99.79\n");
    const auto row = dataset_quality(ucm).front();
    const bool table_rule = is_saturated("OA", 99.19, 0.6);
    const bool ok = worst <= 1e-12 && table_rule && row.saturated && std::abs(row.mu - 99.19) < 1e-9 &&
                    std::abs(row.sigma - 0.6) < 1e-9;
    return {ok, "max |diff|=" + fmt(worst, 2) + " UCMerced(mu=99.19, sigma=0.6) saturated=" +
                    (table_rule && row.saturated ? "true" : "false")};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria{
    {"normalization golden values", criterion_1},
    {"planted embedding recovery", criterion_2},
    {"sparse holdout generalization", criterion_3},
    {"euclidean beats cosine on planted data", criterion_4},
    {"gradient correctness", criterion_5},
    {"metric properties", criterion_6},
    {"poincare domain safety", criterion_7},
    {"error shrinks with degree", criterion_8},
    {"end-to-end determinism", criterion_9},
    {"filtering oracle", criterion_10},
    {"quality statistics oracle", criterion_11},
};

bool report(std::size_t n) {
    Outcome out;
    try {
        out = kCriteria[n - 1].second();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << kCriteria[n - 1].first << " ("
              << out.detail << ")" << std::endl;
    return out.pass;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::size_t> which;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            const auto n = text::parse_unsigned(argv[++i]);
            if (!n || *n < 1 || *n > kCriteria.size()) {
                std::cerr << "criterion must be 1.." << kCriteria.size() << "\n";
                return 2;
            }
            which.push_back(*n);
        } else {
            std::cerr << "usage: acceptance [--criterion N]\n";
            return 2;
        }
    }
    if (which.empty())
        for (std::size_t n = 1; n <= kCriteria.size(); ++n) which.push_back(n);
    bool all = true;
    for (auto n : which) all = report(n) && all;
    return all ? 0 : 1;
}
