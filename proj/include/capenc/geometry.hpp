#pragma once

// The three candidate latent geometries behind one interface: distance,
// ambient (Euclidean) gradient of the distance, and projection back onto the
// valid domain after an optimizer step.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace capenc {

enum class GeometryKind { Euclidean, Cosine, Poincare };

std::string_view to_string(GeometryKind kind);
std::optional<GeometryKind> parse_geometry_kind(std::string_view text);

struct Geometry {
    GeometryKind kind = GeometryKind::Euclidean;
    int dim = 5;
    double ball_epsilon = 1e-5;  // Poincare points keep norm <= 1 - ball_epsilon

    /// Throws Error unless dim >= 1 and ball_epsilon is in (0, 0.1).
    void validate() const;
    double max_norm() const { return 1.0 - ball_epsilon; }
};

using Point = std::vector<double>;

/// Throws Error if p is not a valid point of g: wrong size, non-finite
/// coordinates, zero vector (cosine) or norm above 1 - ball_epsilon (Poincare).
void check_point(const Geometry& g, std::span<const double> p);

/// Euclidean: |u - v|. Cosine: 1 - cos(u, v), in [0, 2]. Poincare:
/// arcosh(1 + 2|u - v|^2 / ((1 - |u|^2)(1 - |v|^2))).
/// Throws Error for a zero vector under cosine or a point on/outside the unit
/// ball under Poincare.
double distance(const Geometry& g, std::span<const double> u, std::span<const double> v);

struct DistanceGradient {
    Point d_u;
    Point d_v;
    bool subgradient = false;  // distance not differentiable here; zeros returned
};

DistanceGradient distance_gradient(const Geometry& g, std::span<const double> u,
                                   std::span<const double> v);

/// Same as distance_gradient but writes into caller buffers and returns the
/// distance. Used on the optimizer hot path. Returns false in *subgradient
/// when the gradient is exact.
double distance_and_gradient(const Geometry& g, std::span<const double> u,
                             std::span<const double> v, std::span<double> d_u,
                             std::span<double> d_v, bool* subgradient = nullptr);

/// Euclidean: identity. Cosine: near-zero vectors become e_0. Poincare:
/// points beyond 1 - ball_epsilon are rescaled radially onto that sphere.
void project_to_domain(const Geometry& g, std::span<double> p);
Point project_to_domain(const Geometry& g, Point p);

double norm(std::span<const double> v);

}  // namespace capenc
