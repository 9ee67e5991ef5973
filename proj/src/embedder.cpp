#include "capenc/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "capenc/random.hpp"
#include "capenc/text.hpp"

namespace capenc {

namespace {

// Loss and gradient accumulation for one evaluation. Terms are visited in a
// fixed order so results are bit-reproducible.
class StressEvaluator {
public:
    StressEvaluator(const Geometry& g, std::size_t n_points)
        : geometry_(g), dim_(static_cast<std::size_t>(g.dim)), gu_(dim_), gv_(dim_),
          grad_(n_points * dim_) {}

    double evaluate(const std::vector<double>& x, std::span<const StressTerm> terms,
                    int iteration) {
        std::fill(grad_.begin(), grad_.end(), 0.0);
        if (terms.empty()) return 0.0;
        const double scale = 2.0 / static_cast<double>(terms.size());
        double sum = 0.0;
        for (const auto& term : terms) {
            std::span<const double> u(x.data() + term.i * dim_, dim_);
            std::span<const double> v(x.data() + term.j * dim_, dim_);
            const double d = distance_and_gradient(geometry_, u, v, gu_, gv_);
            const double r = d - term.target;
            if (!std::isfinite(r)) {
                throw NonFiniteLoss("non-finite loss at iteration " + std::to_string(iteration) +
                                        " on pair (" + std::to_string(term.i) + ", " +
                                        std::to_string(term.j) + ")",
                                    iteration, term.i, term.j);
            }
            sum += r * r;
            const double w = scale * r;
            double* gi = grad_.data() + term.i * dim_;
            double* gj = grad_.data() + term.j * dim_;
            for (std::size_t k = 0; k < dim_; ++k) {
                gi[k] += w * gu_[k];
                gj[k] += w * gv_[k];
            }
        }
        return sum / static_cast<double>(terms.size());
    }

    const std::vector<double>& gradient() const { return grad_; }

private:
    Geometry geometry_;
    std::size_t dim_;
    std::vector<double> gu_, gv_;
    std::vector<double> grad_;
};

std::vector<Point> unflatten(const std::vector<double>& x, std::size_t n, std::size_t dim) {
    std::vector<Point> out(n);
    for (std::size_t p = 0; p < n; ++p)
        out[p].assign(x.begin() + static_cast<std::ptrdiff_t>(p * dim),
                      x.begin() + static_cast<std::ptrdiff_t>((p + 1) * dim));
    return out;
}

}  // namespace

std::string_view to_string(OptimizerKind kind) {
    return kind == OptimizerKind::Adam ? "adam" : "gd";
}

std::optional<OptimizerKind> parse_optimizer_kind(std::string_view text) {
    if (text == "adam") return OptimizerKind::Adam;
    if (text == "gd" || text == "sgd") return OptimizerKind::GradientDescent;
    return std::nullopt;
}

std::string_view to_string(EntityKind kind) { return kind == EntityKind::Model ? "model" : "task"; }

std::optional<EntityKind> parse_entity_kind(std::string_view text) {
    if (text == "model") return EntityKind::Model;
    if (text == "task") return EntityKind::Task;
    return std::nullopt;
}

void FitConfig::validate() const {
    if (max_iterations < 1) throw Error("max_iterations must be >= 1");
    if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
    if (!(convergence_tolerance > 0.0)) throw Error("convergence_tolerance must be positive");
    if (convergence_window < 1) throw Error("convergence_window must be >= 1");
    if (!(init_scale > 0.0)) throw Error("init_scale must be positive");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
        throw Error("Adam betas must lie in [0, 1)");
    if (!(adam_epsilon > 0.0)) throw Error("adam_epsilon must be positive");
    if (place_restarts < 1) throw Error("place_restarts must be >= 1");
}

double stress(const Geometry& g, std::span<const Point> points, std::span<const StressTerm> terms) {
    if (terms.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& t : terms) {
        const double r = distance(g, points[t.i], points[t.j]) - t.target;
        sum += r * r;
    }
    return sum / static_cast<double>(terms.size());
}

StressSolution minimize_stress(const StressProblem& problem, const FitConfig& config) {
    config.validate();
    const Geometry& g = problem.geometry;
    g.validate();
    const std::size_t dim = static_cast<std::size_t>(g.dim);
    const std::size_t n = problem.n_points;
    for (const auto& t : problem.terms) {
        if (t.i >= n || t.j >= n) throw Error("stress term references a missing point");
    }
    if (!problem.frozen.empty() && problem.frozen.size() != n)
        throw Error("frozen mask size does not match the number of points");
    if (!problem.initial.empty() && problem.initial.size() != n)
        throw Error("initial positions do not match the number of points");

    std::vector<double> x(n * dim);
    if (problem.initial.empty()) {
        Rng rng(config.seed);
        for (double& v : x) v = rng.uniform(-config.init_scale, config.init_scale);
    } else {
        for (std::size_t p = 0; p < n; ++p) {
            if (problem.initial[p].size() != dim) throw Error("initial point has wrong dimension");
            std::copy(problem.initial[p].begin(), problem.initial[p].end(),
                      x.begin() + static_cast<std::ptrdiff_t>(p * dim));
        }
    }
    auto is_frozen = [&](std::size_t p) { return !problem.frozen.empty() && problem.frozen[p]; };
    for (std::size_t p = 0; p < n; ++p)
        if (!is_frozen(p)) project_to_domain(g, std::span<double>(x.data() + p * dim, dim));

    StressEvaluator eval(g, n);
    std::vector<double> m1(x.size(), 0.0), m2(x.size(), 0.0);
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(config.max_iterations) + 1);

    FitReport report;
    report.seed = config.seed;
    std::vector<double> best_x = x;
    double best_loss = std::numeric_limits<double>::infinity();
    const int tenth = std::max(1, config.max_iterations / 10);
    const auto window = static_cast<std::size_t>(config.convergence_window);
    double b1_power = 1.0, b2_power = 1.0;

    int it = 0;
    for (;; ++it) {
        const double current = eval.evaluate(x, problem.terms, it);
        history.push_back(current);
        if (it == 0) report.initial_loss = current;
        if (it == tenth) report.loss_at_tenth = current;
        if (current < best_loss) {
            best_loss = current;
            best_x = x;
        }
        if (history.size() > window) {
            const double before = history[history.size() - 1 - window];
            const double change = std::abs(before - current);
            if (before == 0.0 || change <= config.convergence_tolerance * before) {
                report.converged = true;
                break;
            }
        }
        if (it == config.max_iterations) break;

        const auto& grad = eval.gradient();
        if (config.optimizer == OptimizerKind::Adam) {
            b1_power *= config.adam_beta1;
            b2_power *= config.adam_beta2;
        }
        for (std::size_t p = 0; p < n; ++p) {
            if (is_frozen(p)) continue;
            for (std::size_t k = p * dim; k < (p + 1) * dim; ++k) {
                if (config.optimizer == OptimizerKind::Adam) {
                    m1[k] = config.adam_beta1 * m1[k] + (1.0 - config.adam_beta1) * grad[k];
                    m2[k] = config.adam_beta2 * m2[k] + (1.0 - config.adam_beta2) * grad[k] * grad[k];
                    const double m_hat = m1[k] / (1.0 - b1_power);
                    const double v_hat = m2[k] / (1.0 - b2_power);
                    x[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
                } else {
                    x[k] -= config.learning_rate * grad[k];
                }
            }
            project_to_domain(g, std::span<double>(x.data() + p * dim, dim));
        }
    }
    if (it < tenth) report.loss_at_tenth = history.back();
    report.iterations = it;
    report.final_loss = best_loss;
    return {unflatten(best_x, n, dim), report};
}

std::optional<std::size_t> EmbeddingSpace::find_model(std::string_view label) const {
    const auto it = std::find(model_labels.begin(), model_labels.end(), label);
    if (it == model_labels.end()) return std::nullopt;
    return static_cast<std::size_t>(it - model_labels.begin());
}

std::optional<std::size_t> EmbeddingSpace::find_task(std::string_view label) const {
    const auto it = std::find(task_labels.begin(), task_labels.end(), label);
    if (it == task_labels.end()) return std::nullopt;
    return static_cast<std::size_t>(it - task_labels.begin());
}

const Point& EmbeddingSpace::model_point(std::string_view label) const {
    const auto i = find_model(label);
    if (!i) throw Error("unknown model: " + std::string(label));
    return model_points[*i];
}

const Point& EmbeddingSpace::task_point(std::string_view label) const {
    const auto i = find_task(label);
    if (!i) throw Error("unknown task: " + std::string(label));
    return task_points[*i];
}

void EmbeddingSpace::validate() const {
    geometry.validate();
    if (model_labels.size() != model_points.size() || task_labels.size() != task_points.size())
        throw Error("embedding labels and points differ in length");
    for (const auto* labels : {&model_labels, &task_labels}) {
        std::set<std::string> seen(labels->begin(), labels->end());
        if (seen.size() != labels->size()) throw Error("embedding has duplicate labels");
    }
    for (const auto& p : model_points) check_point(geometry, p);
    for (const auto& p : task_points) check_point(geometry, p);
}

double loss(const EmbeddingSpace& space, const DeltaMatrix& delta) {
    std::vector<const Point*> model_ptr, task_ptr;
    for (const auto& label : delta.model_labels()) model_ptr.push_back(&space.model_point(label));
    for (const auto& label : delta.task_labels()) task_ptr.push_back(&space.task_point(label));
    if (delta.entries.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& e : delta.entries) {
        const double r = distance(space.geometry, *model_ptr[e.model], *task_ptr[e.task]) - e.delta;
        sum += r * r;
    }
    return sum / static_cast<double>(delta.entries.size());
}

EmbeddingSpace fit(const DeltaMatrix& delta, const Geometry& geometry, const FitConfig& config) {
    if (delta.entries.empty()) throw Error("cannot fit an empty delta matrix");
    geometry.validate();

    const std::size_t n_models = delta.models.size();
    StressProblem problem;
    problem.geometry = geometry;
    problem.n_points = n_models + delta.tasks.size();
    problem.terms.reserve(delta.entries.size());
    for (const auto& e : delta.entries)
        problem.terms.push_back({e.model, n_models + e.task, e.delta});

    StressSolution solution;
    try {
        solution = minimize_stress(problem, config);
    } catch (const NonFiniteLoss& err) {
        const auto name = [&](std::size_t p) {
            return p < n_models ? delta.models[p].label() : delta.tasks[p - n_models].label();
        };
        throw NonFiniteLoss("non-finite loss at iteration " + std::to_string(err.iteration()) +
                                " on pair (" + name(err.first()) + ", " + name(err.second()) + ")",
                            err.iteration(), err.first(), err.second());
    }

    EmbeddingSpace space;
    space.geometry = geometry;
    space.model_labels = delta.model_labels();
    space.task_labels = delta.task_labels();
    space.model_points.assign(solution.points.begin(),
                              solution.points.begin() + static_cast<std::ptrdiff_t>(n_models));
    space.task_points.assign(solution.points.begin() + static_cast<std::ptrdiff_t>(n_models),
                             solution.points.end());
    space.report = solution.report;
    return space;
}

Placement place_entity(const EmbeddingSpace& space, EntityKind kind,
                       const std::map<std::string, double>& known, const FitConfig& config) {
    if (known.empty()) throw Error("cannot place entity with no observations");
    config.validate();
    const Geometry& g = space.geometry;
    const std::size_t dim = static_cast<std::size_t>(g.dim);

    // Anchors are the opposite-kind points; the new point is the last one.
    StressProblem problem;
    problem.geometry = g;
    double max_target = 0.0;
    for (const auto& [label, delta] : known) {
        if (!std::isfinite(delta)) throw Error("non-finite delta for " + label);
        const Point& anchor =
            kind == EntityKind::Model ? space.task_point(label) : space.model_point(label);
        problem.initial.push_back(anchor);
        max_target = std::max(max_target, std::abs(delta));
    }
    const std::size_t n_anchors = problem.initial.size();
    problem.n_points = n_anchors + 1;
    problem.frozen.assign(problem.n_points, true);
    problem.frozen.back() = false;
    std::size_t a = 0;
    for (const auto& entry : known) problem.terms.push_back({n_anchors, a++, entry.second});

    Point centroid(dim, 0.0);
    for (std::size_t i = 0; i < n_anchors; ++i)
        for (std::size_t k = 0; k < dim; ++k)
            centroid[k] += problem.initial[i][k] / static_cast<double>(n_anchors);
    const double radius = max_target + config.init_scale;

    Placement best;
    best.loss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < config.place_restarts; ++r) {
        FitConfig run = config;
        run.seed = derive_seed(config.seed, static_cast<std::uint64_t>(r));
        Rng rng(run.seed);
        Point start(dim);
        for (std::size_t k = 0; k < dim; ++k) start[k] = centroid[k] + rng.uniform(-radius, radius);
        problem.initial.resize(n_anchors);
        problem.initial.push_back(std::move(start));

        const auto solution = minimize_stress(problem, run);
        if (solution.report.final_loss < best.loss) {
            best.loss = solution.report.final_loss;
            best.point = solution.points.back();
            best.best_restart = r;
        }
    }
    return best;
}

EmbeddingSpace with_entity(const EmbeddingSpace& space, EntityKind kind, const std::string& label,
                           const Point& point) {
    check_point(space.geometry, point);
    EmbeddingSpace out = space;
    auto& labels = kind == EntityKind::Model ? out.model_labels : out.task_labels;
    auto& points = kind == EntityKind::Model ? out.model_points : out.task_points;
    if (std::find(labels.begin(), labels.end(), label) != labels.end())
        throw Error(std::string(to_string(kind)) + " '" + label + "' already exists in the space");
    labels.push_back(label);
    points.push_back(point);
    return out;
}

}  // namespace capenc
