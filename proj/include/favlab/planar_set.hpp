#pragma once

#include <variant>
#include <vector>

#include "favlab/geometry.hpp"

namespace favlab {

struct Segment {
  Vec2 a;
  Vec2 b;
  double mass = 0.0;
};

struct AxisBox {
  Vec2 center;
  double side = 0.0;
  double mass = 0.0;
};

using Primitive = std::variant<Segment, AxisBox>;

/// Exact geometric support (segments and axis-aligned boxes), each primitive
/// carrying a nonnegative one-dimensional mass.
struct PlanarSet {
  std::vector<Primitive> primitives;

  double total_mass() const;
  /// Exact diameter of the union (convex hull of primitive corners).
  double diameter() const;
  bool empty() const { return primitives.empty(); }
};

/// Closed interval the primitive projects onto along e_theta.
std::pair<double, double> project_primitive(const Primitive& p, Direction theta);

/// Exact length of the union of projected intervals.
double projection_length(const PlanarSet& set, Direction theta);

/// Midpoint-rule quadrature of theta -> projection_length over [0,1).
/// Deterministic for fixed n_angles; requires n_angles >= 16.
double favard(const PlanarSet& set, int n_angles, int threads = 1);

/// Per-angle projection lengths at the same midpoint nodes favard uses.
std::vector<double> favard_profile(const PlanarSet& set, int n_angles, int threads = 1);

}  // namespace favlab
