#include "favlab/planar_set.hpp"

#include <algorithm>
#include <cmath>

#include "favlab/direction_set.hpp"
#include "favlab/utils.hpp"

namespace favlab {

namespace {

void append_corners(const Primitive& p, std::vector<Vec2>* out) {
  if (const auto* s = std::get_if<Segment>(&p)) {
    out->push_back(s->a);
    out->push_back(s->b);
  } else {
    const auto& b = std::get<AxisBox>(p);
    double h = 0.5 * b.side;
    out->push_back({b.center.x - h, b.center.y - h});
    out->push_back({b.center.x + h, b.center.y - h});
    out->push_back({b.center.x - h, b.center.y + h});
    out->push_back({b.center.x + h, b.center.y + h});
  }
}

double cross(Vec2 o, Vec2 a, Vec2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Monotone-chain convex hull.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

double PlanarSet::total_mass() const {
  double m = 0.0;
  for (const auto& p : primitives)
    m += std::holds_alternative<Segment>(p) ? std::get<Segment>(p).mass : std::get<AxisBox>(p).mass;
  return m;
}

double PlanarSet::diameter() const {
  std::vector<Vec2> corners;
  corners.reserve(4 * primitives.size());
  for (const auto& p : primitives) append_corners(p, &corners);
  if (corners.size() < 2) return 0.0;
  std::vector<Vec2> hull = convex_hull(std::move(corners));
  if (hull.size() < 2) return 0.0;
  if (hull.size() == 2) return dist(hull[0], hull[1]);
  // Rotating calipers over antipodal pairs.
  double best = 0.0;
  std::size_t m = hull.size();
  std::size_t j = 1;
  for (std::size_t i = 0; i < m; ++i) {
    Vec2 e = hull[(i + 1) % m] - hull[i];
    while (true) {
      std::size_t jn = (j + 1) % m;
      double adv = e.x * (hull[jn].y - hull[j].y) - e.y * (hull[jn].x - hull[j].x);
      if (adv > 0) {
        j = jn;
      } else {
        break;
      }
    }
    best = std::max(best, dist(hull[i], hull[j]));
    best = std::max(best, dist(hull[(i + 1) % m], hull[j]));
  }
  return best;
}

std::pair<double, double> project_primitive(const Primitive& p, Direction theta) {
  Vec2 e = theta.unit();
  if (const auto* s = std::get_if<Segment>(&p)) {
    double u = dot(s->a, e), v = dot(s->b, e);
    return {std::min(u, v), std::max(u, v)};
  }
  const auto& b = std::get<AxisBox>(p);
  double c = dot(b.center, e);
  double h = 0.5 * b.side * (std::fabs(e.x) + std::fabs(e.y));
  return {c - h, c + h};
}

double projection_length(const PlanarSet& set, Direction theta) {
  if (set.empty()) throw PreconditionViolation("projection of an empty set");
  std::vector<std::pair<double, double>> iv;
  iv.reserve(set.primitives.size());
  for (const auto& p : set.primitives) iv.push_back(project_primitive(p, theta));
  std::sort(iv.begin(), iv.end());
  double total = 0.0;
  double lo = iv[0].first, hi = iv[0].second;
  for (std::size_t i = 1; i < iv.size(); ++i) {
    if (iv[i].first <= hi) {
      hi = std::max(hi, iv[i].second);
    } else {
      total += hi - lo;
      lo = iv[i].first;
      hi = iv[i].second;
    }
  }
  total += hi - lo;
  return total;
}

std::vector<double> favard_profile(const PlanarSet& set, int n_angles, int threads) {
  if (n_angles < 16) throw PreconditionViolation("favard needs at least 16 angles");
  std::vector<double> lengths(n_angles, 0.0);
  parallel_for(n_angles, threads, [&](int i) {
    double t = (static_cast<double>(i) + 0.5) / static_cast<double>(n_angles);
    lengths[i] = projection_length(set, Direction::of(t));
  });
  return lengths;
}

double favard(const PlanarSet& set, int n_angles, int threads) {
  std::vector<double> lengths = favard_profile(set, n_angles, threads);
  double sum = 0.0;
  for (double v : lengths) sum += v;
  return sum / static_cast<double>(n_angles);
}

}  // namespace favlab
