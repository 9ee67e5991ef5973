#include "capenc/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "capenc/error.hpp"

namespace capenc {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void check_sizes(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw Error("dimension mismatch: " + std::to_string(u.size()) + " vs " +
                    std::to_string(v.size()));
    if (u.empty()) throw Error("points must have at least one coordinate");
}

void check_ball(double sq_norm) {
    if (!(sq_norm < 1.0)) throw Error("point lies on or outside the Poincare ball");
}

// arcosh(1 + x) without cancellation for small x.
double arcosh1p(double x) { return std::log1p(x + std::sqrt(x * (x + 2.0))); }

}  // namespace

std::string_view to_string(GeometryKind kind) {
    switch (kind) {
        case GeometryKind::Euclidean: return "euclidean";
        case GeometryKind::Cosine: return "cosine";
        case GeometryKind::Poincare: return "poincare";
    }
    return "euclidean";
}

std::optional<GeometryKind> parse_geometry_kind(std::string_view text) {
    if (text == "euclidean" || text == "l2") return GeometryKind::Euclidean;
    if (text == "cosine") return GeometryKind::Cosine;
    if (text == "poincare") return GeometryKind::Poincare;
    return std::nullopt;
}

void Geometry::validate() const {
    if (dim < 1) throw Error("geometry dimension must be >= 1");
    if (!(ball_epsilon > 0.0 && ball_epsilon < 0.1))
        throw Error("ball_epsilon must lie in (0, 0.1)");
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void check_point(const Geometry& g, std::span<const double> p) {
    if (p.size() != static_cast<std::size_t>(g.dim))
        throw Error("point has " + std::to_string(p.size()) + " coordinates, geometry has " +
                    std::to_string(g.dim));
    for (double x : p)
        if (!std::isfinite(x)) throw Error("point has a non-finite coordinate");
    if (g.kind == GeometryKind::Cosine && dot(p, p) == 0.0)
        throw Error("zero vector is not a valid cosine point");
    if (g.kind == GeometryKind::Poincare && norm(p) > g.max_norm())
        throw Error("point lies outside the Poincare ball radius 1 - ball_epsilon");
}

double distance(const Geometry& g, std::span<const double> u, std::span<const double> v) {
    check_sizes(u, v);
    switch (g.kind) {
        case GeometryKind::Euclidean: {
            const double d = std::sqrt(squared_distance(u, v));
            if (!std::isfinite(d)) throw Error("non-finite coordinate in distance");
            return d;
        }
        case GeometryKind::Cosine: {
            const double nn = norm(u) * norm(v);
            if (nn == 0.0) throw Error("cosine distance undefined for a zero vector");
            return std::clamp(1.0 - dot(u, v) / nn, 0.0, 2.0);
        }
        case GeometryKind::Poincare: {
            const double a = dot(u, u);
            const double b = dot(v, v);
            check_ball(a);
            check_ball(b);
            return arcosh1p(2.0 * squared_distance(u, v) / ((1.0 - a) * (1.0 - b)));
        }
    }
    return 0.0;
}

double distance_and_gradient(const Geometry& g, std::span<const double> u,
                             std::span<const double> v, std::span<double> d_u,
                             std::span<double> d_v, bool* subgradient) {
    check_sizes(u, v);
    const std::size_t n = u.size();
    if (subgradient) *subgradient = false;
    auto zero = [&] {
        std::fill(d_u.begin(), d_u.end(), 0.0);
        std::fill(d_v.begin(), d_v.end(), 0.0);
        if (subgradient) *subgradient = true;
    };

    switch (g.kind) {
        case GeometryKind::Euclidean: {
            const double r = std::sqrt(squared_distance(u, v));
            if (r == 0.0) {
                zero();
                return 0.0;
            }
            for (std::size_t i = 0; i < n; ++i) {
                d_u[i] = (u[i] - v[i]) / r;
                d_v[i] = (v[i] - u[i]) / r;
            }
            return r;
        }
        case GeometryKind::Cosine: {
            const double nu = norm(u);
            const double nv = norm(v);
            if (nu == 0.0 || nv == 0.0) throw Error("cosine distance undefined for a zero vector");
            const double nn = nu * nv;
            const double c = dot(u, v) / nn;
            // d = 1 - c;  dc/du = v/(|u||v|) - c u/|u|^2
            for (std::size_t i = 0; i < n; ++i) {
                d_u[i] = -(v[i] / nn - c * u[i] / (nu * nu));
                d_v[i] = -(u[i] / nn - c * v[i] / (nv * nv));
            }
            return std::clamp(1.0 - c, 0.0, 2.0);
        }
        case GeometryKind::Poincare: {
            const double a = dot(u, u);
            const double b = dot(v, v);
            check_ball(a);
            check_ball(b);
            const double alpha = 1.0 - a;
            const double beta = 1.0 - b;
            const double s = squared_distance(u, v);
            if (s == 0.0) {
                zero();
                return 0.0;
            }
            const double x = 2.0 * s / (alpha * beta);
            // d = arcosh(1 + x);  dd/dx = 1 / sqrt(x (x + 2))
            // dx/du = 4 (u - v) / (alpha beta) + 4 s u / (alpha^2 beta)
            const double k = 4.0 / (alpha * beta * std::sqrt(x * (x + 2.0)));
            for (std::size_t i = 0; i < n; ++i) {
                d_u[i] = k * ((u[i] - v[i]) + s * u[i] / alpha);
                d_v[i] = k * ((v[i] - u[i]) + s * v[i] / beta);
            }
            return arcosh1p(x);
        }
    }
    return 0.0;
}

DistanceGradient distance_gradient(const Geometry& g, std::span<const double> u,
                                   std::span<const double> v) {
    DistanceGradient out;
    out.d_u.resize(u.size());
    out.d_v.resize(v.size());
    distance_and_gradient(g, u, v, out.d_u, out.d_v, &out.subgradient);
    return out;
}

void project_to_domain(const Geometry& g, std::span<double> p) {
    switch (g.kind) {
        case GeometryKind::Euclidean:
            return;
        case GeometryKind::Cosine:
            if (norm(p) < 1e-12) {
                std::fill(p.begin(), p.end(), 0.0);
                if (!p.empty()) p[0] = 1.0;
            }
            return;
        case GeometryKind::Poincare: {
            const double limit = g.max_norm();
            const double r = norm(p);
            if (!(r > limit)) return;
            const double scale = limit / r;
            for (double& x : p) x *= scale;
            // Rounding can leave the norm one ulp above the limit.
            while (norm(p) > limit)
                for (double& x : p) x *= 1.0 - 0x1.0p-52;
            return;
        }
    }
}

Point project_to_domain(const Geometry& g, Point p) {
    project_to_domain(g, std::span<double>(p));
    return p;
}

}  // namespace capenc
