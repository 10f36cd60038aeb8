#include "favlab/geometry.hpp"

#include <cmath>

namespace favlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap_turn(double raw) {
  double t = raw - std::floor(raw);
  if (t >= 1.0) t = 0.0;  // raw == -tiny rounds up to 1.0
  return t;
}

}  // namespace

double cos_turn(double t) {
  t = wrap_turn(t);
  double q = 4.0 * t;
  if (q == std::floor(q)) {
    switch (static_cast<int>(q)) {
      case 0: return 1.0;
      case 1: return 0.0;
      case 2: return -1.0;
      case 3: return 0.0;
    }
  }
  return std::cos(kTwoPi * t);
}

double sin_turn(double t) {
  t = wrap_turn(t);
  double q = 4.0 * t;
  if (q == std::floor(q)) {
    switch (static_cast<int>(q)) {
      case 0: return 0.0;
      case 1: return 1.0;
      case 2: return 0.0;
      case 3: return -1.0;
    }
  }
  return std::sin(kTwoPi * t);
}

Direction Direction::of(double raw) { return Direction{wrap_turn(raw)}; }

double direction_distance(Direction a, Direction b) {
  double d = std::fabs(a.t - b.t);
  return std::min(d, 1.0 - d);
}

AngleInterval AngleInterval::scaled(double c) const {
  return {center, std::min(c * halfwidth, 0.25)};
}

bool AngleInterval::contains(Direction d) const {
  return direction_distance(center, d) <= halfwidth + kLengthTol;
}

bool AnisoRect::contains(Vec2 p) const {
  Vec2 d = p - center;
  double along = project(d, orientation);
  double across = project_perp(d, orientation);
  return std::fabs(along) <= 0.5 * long_side + kLengthTol &&
         std::fabs(across) <= 0.5 * short_side + kLengthTol;
}

AnisoRect tall_rect(Vec2 center, double width, double aspect) {
  return {center, width, width / aspect, Direction{0.25}};
}

double aniso_metric(Vec2 p, Vec2 q, double aspect) {
  return std::max(std::fabs(p.x - q.x), aspect * std::fabs(p.y - q.y));
}

bool cone_radial_ok(double d, double r_in, double r_out) {
  if (r_in > 0.0 && d <= r_in) return false;
  return d <= r_out;
}

bool cone_angular_ok(Vec2 apex, const AngleInterval& dirs, Vec2 p) {
  Vec2 d = p - apex;
  double off = std::fabs(project_perp(d, dirs.center));
  double s = sin_turn(std::min(dirs.halfwidth, 0.25));
  return off <= s * norm(d) + kLengthTol;
}

bool Cone::contains(Vec2 p) const {
  double d = dist(apex, p);
  if (!cone_radial_ok(d, r_in, r_out)) return false;
  return cone_angular_ok(apex, directions, p);
}

}  // namespace favlab
