#pragma once

#include <cmath>
#include <limits>

namespace favlab {

/// Absolute tolerance for length comparisons at the geometry level.
/// Measure-level tolerances live with the measure code.
inline constexpr double kLengthTol = 1e-12;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double c) const { return {c * x, c * y}; }
  bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double norm_sq(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

/// cos/sin of a turn-valued angle (1 turn = 2*pi radians), exact at
/// quarter turns so that axis-aligned projections stay bit-exact.
double cos_turn(double t);
double sin_turn(double t);

/// Angle on the circle T = R/Z, stored in turns in [0,1).
struct Direction {
  double t = 0.0;

  static Direction of(double raw);
  Direction perp() const { return of(t + 0.25); }
  Direction antipode() const { return of(t + 0.5); }
  Vec2 unit() const { return {cos_turn(t), sin_turn(t)}; }
  bool operator==(const Direction&) const = default;
};

/// Circular distance in turns, always in [0, 1/2].
double direction_distance(Direction a, Direction b);

/// Orthogonal projection e_theta . p onto the line spanned by e_theta.
inline double project(Vec2 p, Direction theta) { return dot(p, theta.unit()); }
/// Perp-projection, identically project(p, theta + 1/4).
inline double project_perp(Vec2 p, Direction theta) { return project(p, theta.perp()); }

/// Closed circular interval [center - halfwidth, center + halfwidth] of
/// directions, halfwidth in turns in (0, 1/4].
struct AngleInterval {
  Direction center;
  double halfwidth = 0.0;

  double measure() const { return 2.0 * halfwidth; }
  /// C*I: same center, halfwidth scaled by c (clamped to the 1/4 cap).
  AngleInterval scaled(double c) const;
  bool contains(Direction d) const;
};

/// Rectangle with a designated long axis. `orientation` is the direction of
/// the longer sides; `short_side` <= `long_side`.
struct AnisoRect {
  Vec2 center;
  double short_side = 0.0;
  double long_side = 0.0;
  Direction orientation;

  AnisoRect scaled(double c) const {
    return {center, c * short_side, c * long_side, orientation};
  }
  /// Closed-rectangle membership, evaluated in the rect frame.
  bool contains(Vec2 p) const;
};

/// The standard tall rectangle R(x, r): vertical long axis, width r,
/// height r / aspect. Its horizontal projection is pi_0(x) + [-r/2, r/2].
AnisoRect tall_rect(Vec2 center, double width, double aspect);

/// max(|x1-x2|, aspect*|y1-y2|). Balls of radius r are tall_rect(x, 2r, aspect).
double aniso_metric(Vec2 p, Vec2 q, double aspect);

/// Union of lines through `apex` with directions in an interval, restricted
/// to the annulus r_in < |y-x| <= r_out (open at r_in, closed at r_out;
/// the apex itself belongs whenever r_in == 0).
struct Cone {
  Vec2 apex;
  AngleInterval directions;
  double r_in = 0.0;
  double r_out = kInf;

  bool contains(Vec2 p) const;
};

/// Annulus part of cone membership, shared by every cone flavour.
bool cone_radial_ok(double d, double r_in, double r_out);

/// Angular part of interval-cone membership: |perp offset| <= sin(2*pi*hw)*|d|.
bool cone_angular_ok(Vec2 apex, const AngleInterval& dirs, Vec2 p);

}  // namespace favlab
