#include "favlab/measure.hpp"

#include <algorithm>
#include <cmath>

namespace favlab {

double DiscreteMeasure::diameter() const {
  // Samples of our generators hug the primitive hull; a direct sweep over
  // extreme points in a few directions is exact enough for radius ranges.
  double best = 0.0;
  if (points.size() < 2) return 0.0;
  // Exact O(n^2) is too slow for big samples; use hull of the point cloud.
  std::vector<Vec2> pts = points;
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a == b; }), pts.end());
  auto cross = [](Vec2 o, Vec2 a, Vec2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
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
  if (k > 0) hull.resize(k - 1);
  if (hull.size() < 2) return 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j) best = std::max(best, dist(hull[i], hull[j]));
  return best;
}

DiscreteMeasure sample_measure(const PlanarSet& set, double h) {
  if (h <= 0.0) throw PreconditionViolation("sample spacing must be positive");
  DiscreteMeasure mu;
  mu.spacing = h;
  for (const auto& prim : set.primitives) {
    if (const auto* s = std::get_if<Segment>(&prim)) {
      if (s->mass <= 0.0) continue;
      auto k = static_cast<std::size_t>(std::ceil(s->mass / h));
      double w = s->mass / static_cast<double>(k);
      Vec2 d = s->b - s->a;
      for (std::size_t i = 0; i < k; ++i) {
        double t = (static_cast<double>(i) + 0.5) / static_cast<double>(k);
        mu.points.push_back(s->a + d * t);
        mu.weights.push_back(w);
      }
    } else {
      const auto& b = std::get<AxisBox>(prim);
      if (b.mass <= 0.0) continue;
      auto k = static_cast<std::size_t>(std::ceil(std::sqrt(b.mass / h)));
      double w = b.mass / static_cast<double>(k * k);
      double lo_x = b.center.x - 0.5 * b.side;
      double lo_y = b.center.y - 0.5 * b.side;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          double fx = (static_cast<double>(i) + 0.5) / static_cast<double>(k);
          double fy = (static_cast<double>(j) + 0.5) / static_cast<double>(k);
          mu.points.push_back({lo_x + b.side * fx, lo_y + b.side * fy});
          mu.weights.push_back(w);
        }
      }
    }
  }
  mu.total = set.total_mass();
  return mu;
}

DensityProfile pushforward_density(const DiscreteMeasure& mu, Direction theta, double bin_width) {
  if (bin_width <= 0.0) throw PreconditionViolation("bin width must be positive");
  if (mu.points.empty()) throw PreconditionViolation("empty measure");
  DensityProfile prof;
  prof.theta = theta;
  prof.bin_width = bin_width;
  Vec2 e = theta.unit();
  double lo = kInf, hi = -kInf;
  for (const Vec2& p : mu.points) {
    double v = dot(p, e);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  prof.lo = std::floor(lo / bin_width) * bin_width;
  auto nbins = static_cast<std::size_t>(std::floor((hi - prof.lo) / bin_width)) + 1;
  prof.bins.assign(nbins, 0.0);
  for (std::size_t i = 0; i < mu.points.size(); ++i) {
    double v = dot(mu.points[i], e);
    auto b = static_cast<std::size_t>(std::floor((v - prof.lo) / bin_width));
    b = std::min(b, nbins - 1);
    prof.bins[b] += mu.weights[i];
  }
  double max_mass = 0.0;
  for (double& m : prof.bins) {
    max_mass = std::max(max_mass, m);
    double density = m / bin_width;
    prof.l2_norm_sq += density * density * bin_width;
    prof.sup_norm = std::max(prof.sup_norm, density);
    m = density;
  }
  prof.degenerate = max_mass > 0.5 * mu.total;
  return prof;
}

double ad_constant(const DiscreteMeasure& mu, int n_centers, int n_radii) {
  if (mu.points.empty()) throw PreconditionViolation("empty measure");
  double diam = mu.diameter();
  double r_lo = 10.0 * mu.spacing;
  if (!(r_lo < diam)) return kInf;  // mass cannot scale below the sampling floor
  n_centers = std::max(1, std::min<int>(n_centers, static_cast<int>(mu.size())));
  std::size_t stride = std::max<std::size_t>(1, mu.size() / static_cast<std::size_t>(n_centers));
  double worst = 1.0;
  for (std::size_t ci = 0; ci < mu.size(); ci += stride) {
    Vec2 x = mu.points[ci];
    // Sorted distances once per center, masses by prefix sums.
    std::vector<std::pair<double, double>> dw(mu.size());
    for (std::size_t j = 0; j < mu.size(); ++j)
      dw[j] = {dist(x, mu.points[j]), mu.weights[j]};
    std::sort(dw.begin(), dw.end());
    std::vector<double> cum(dw.size());
    double run = 0.0;
    for (std::size_t j = 0; j < dw.size(); ++j) {
      run += dw[j].second;
      cum[j] = run;
    }
    for (int k = 0; k < n_radii; ++k) {
      double f = n_radii == 1 ? 0.0 : static_cast<double>(k) / (n_radii - 1);
      double r = r_lo * std::pow(diam / r_lo, f);
      auto it = std::upper_bound(dw.begin(), dw.end(), std::make_pair(r, kInf));
      double mass = it == dw.begin() ? 0.0 : cum[static_cast<std::size_t>(it - dw.begin()) - 1];
      if (mass <= 0.0) return kInf;
      worst = std::max(worst, std::max(mass / r, r / mass));
    }
  }
  return worst;
}

double cone_mass(const DiscreteMeasure& mu, const Cone& cone, double exclude_apex_radius) {
  double s = sin_turn(std::min(cone.directions.halfwidth, 0.25));
  Vec2 e_perp = cone.directions.center.perp().unit();
  double m = 0.0;
  for (std::size_t i = 0; i < mu.points.size(); ++i) {
    Vec2 d = mu.points[i] - cone.apex;
    double dn = norm(d);
    if (dn <= exclude_apex_radius) continue;
    if (!cone_radial_ok(dn, cone.r_in, cone.r_out)) continue;
    if (std::fabs(dot(d, e_perp)) <= s * dn + kLengthTol) m += mu.weights[i];
  }
  return m;
}

double cone_mass(const DiscreteMeasure& mu, Vec2 apex, const DirectionSet& dirs, double r_in,
                 double r_out, double exclude_apex_radius) {
  DirectionSet lines = dirs.line_closure();
  double m = 0.0;
  for (std::size_t i = 0; i < mu.points.size(); ++i) {
    Vec2 d = mu.points[i] - apex;
    double dn = norm(d);
    if (dn <= exclude_apex_radius) continue;
    if (!cone_radial_ok(dn, r_in, r_out)) continue;
    if (lines.test(lines.cell_of(direction_of(d.x, d.y)))) m += mu.weights[i];
  }
  return m;
}

DirectionSet direction_spectrum(const DiscreteMeasure& mu, int depth) {
  DirectionSet spec(depth);
  for (std::size_t i = 0; i < mu.points.size(); ++i) {
    for (std::size_t j = i + 1; j < mu.points.size(); ++j) {
      Vec2 d = mu.points[j] - mu.points[i];
      if (d.x == 0.0 && d.y == 0.0) continue;
      double phi = direction_of(d.x, d.y);
      if (phi >= 0.5) phi -= 0.5;
      spec.set(spec.cell_of(phi));
      spec.set(spec.cell_of(phi + 0.5));
    }
  }
  return spec;
}

double global_cone_energy(const DiscreteMeasure& mu, const DirectionSet& dirs, double r_min,
                          double r_max, double nodes_per_decade) {
  if (r_min <= 0.0 || r_max <= r_min) throw PreconditionViolation("bad radius range");
  if (nodes_per_decade < 16.0)
    throw QuadratureUnderresolved("need at least 16 radial nodes per decade");
  int n = std::max(16, static_cast<int>(std::ceil(nodes_per_decade * std::log10(r_max / r_min))));
  double dlog = std::log(r_max / r_min) / n;
  std::vector<double> nodes(n);
  for (int k = 0; k < n; ++k) nodes[k] = r_min * std::exp((k + 0.5) * dlog);

  DirectionSet lines = dirs.line_closure();
  double excl = mu.spacing;
  double total = 0.0;
  std::vector<double> bucket(n + 1, 0.0);
  for (std::size_t i = 0; i < mu.points.size(); ++i) {
    std::fill(bucket.begin(), bucket.end(), 0.0);
    Vec2 x = mu.points[i];
    for (std::size_t j = 0; j < mu.points.size(); ++j) {
      if (j == i) continue;
      Vec2 d = mu.points[j] - x;
      double dn = norm(d);
      if (dn <= excl || dn > nodes[n - 1]) continue;
      if (!lines.test(lines.cell_of(direction_of(d.x, d.y)))) continue;
      auto it = std::lower_bound(nodes.begin(), nodes.end(), dn);
      bucket[static_cast<std::size_t>(it - nodes.begin())] += mu.weights[j];
    }
    double mass = 0.0, integral = 0.0;
    for (int k = 0; k < n; ++k) {
      mass += bucket[k];
      integral += mass / nodes[k] * dlog;
    }
    total += mu.weights[i] * integral;
  }
  return total;
}

ConeEnergyReport check_cone_energy_bound(const DiscreteMeasure& mu, const DirectionSet& g,
                                         double M, double r_min, double nodes_per_decade) {
  if (g.count() == 0) return {0.0, 0.0, 0.0, 0};
  double diam = mu.diameter();
  ConeEnergyReport rep;
  if (diam <= r_min) return rep;
  DirectionSet g_perp = g.rotated_quarter();
  rep.lhs = global_cone_energy(mu, g_perp, r_min, diam, nodes_per_decade);
  rep.rhs = M * g.measure() * mu.total;
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  rep.r_nodes = std::max(16, static_cast<int>(std::ceil(nodes_per_decade * std::log10(diam / r_min))));
  return rep;
}

}  // namespace favlab
