#include "favlab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "favlab/utils.hpp"

namespace favlab {

LogGrid LogGrid::over(double a, double b, double per_decade) {
  if (!(a > 0.0 && b > a)) throw PreconditionViolation("bad quadrature range");
  int n = std::max(16, static_cast<int>(std::ceil(per_decade * std::log10(b / a))));
  LogGrid g;
  g.a = a;
  g.b = b;
  g.dlog = std::log(b / a) / n;
  g.r.resize(n);
  for (int k = 0; k < n; ++k) g.r[k] = a * std::exp((k + 0.5) * g.dlog);
  return g;
}

namespace {

/// Distance and direction-membership flags of one partner point, computed
/// once per source point and reused across levels.
struct Partner {
  double d = 0.0;
  double w = 0.0;
  bool in_g = false;
  bool in_half = false;  // 0.5J
  bool in_three = false; // 3J
};

double integrate_prefix(const LogGrid& grid, const std::vector<double>& bucket) {
  double mass = 0.0, integral = 0.0;
  for (std::size_t k = 0; k < grid.r.size(); ++k) {
    mass += bucket[k];
    integral += mass / grid.r[k] * grid.dlog;
  }
  return integral;
}

}  // namespace

EnergyTable compute_energies(const CubeLattice& lat, const DiscreteMeasure& mu,
                             const DirectionSet& g, const AngleInterval& J, double A,
                             QuadratureSpec quad, int threads) {
  if (A < 1.0) throw PreconditionViolation("scale constant A must be >= 1");
  const std::size_t n = mu.size();
  const int depth = lat.depth();
  const double excl = mu.spacing;

  DirectionSet lines = g.line_closure();
  AngleInterval half = J.scaled(0.5);
  AngleInterval three = J.scaled(3.0);
  Vec2 axis_perp = J.center.perp().unit();
  double s_half = sin_turn(std::min(half.halfwidth, 0.25));
  double s_three = sin_turn(std::min(three.halfwidth, 0.25));

  // Scale data per level: radial grids shared by every cube of the level.
  std::vector<double> tall_of_level(depth);
  std::vector<LogGrid> grid_g(depth), grid_j(depth);
  for (int lv = 0; lv < depth; ++lv) {
    double tall = 4.0 * std::pow(lat.rho, lat.top_scale + lv) / lat.aspect;
    tall_of_level[lv] = tall;
    grid_g[lv] = LogGrid::over(tall / A, A * A * A * tall, quad.per_decade);
    grid_j[lv] = LogGrid::over(lat.rho * tall, tall, quad.per_decade);
  }

  // Per-point integrals for each level's radial window.
  std::vector<std::vector<double>> ig(depth), ij_int(depth), ij_ext(depth), ij_tilde(depth);
  for (int lv = 0; lv < depth; ++lv) {
    ig[lv].assign(n, 0.0);
    ij_int[lv].assign(n, 0.0);
    ij_ext[lv].assign(n, 0.0);
    ij_tilde[lv].assign(n, 0.0);
  }

  parallel_for(static_cast<int>(n), threads, [&](int xi) {
    Vec2 x = mu.points[xi];
    std::vector<Partner> partners;
    partners.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == static_cast<std::size_t>(xi)) continue;
      Vec2 d = mu.points[j] - x;
      double dn = norm(d);
      if (dn <= excl) continue;
      Partner pr;
      pr.d = dn;
      pr.w = mu.weights[j];
      pr.in_g = lines.test(lines.cell_of(direction_of(d.x, d.y)));
      double off = std::fabs(dot(d, axis_perp));
      pr.in_half = off <= s_half * dn + kLengthTol;
      pr.in_three = off <= s_three * dn + kLengthTol;
      partners.push_back(pr);
    }
    std::vector<double> bg, bi, be;
    for (int lv = 0; lv < depth; ++lv) {
      const LogGrid& gg = grid_g[lv];
      const LogGrid& gj = grid_j[lv];
      bg.assign(gg.r.size(), 0.0);
      bi.assign(gj.r.size(), 0.0);
      be.assign(gj.r.size(), 0.0);
      double tilde_mass = 0.0;
      for (const Partner& pr : partners) {
        if (pr.in_g && pr.d <= gg.b) {
          auto it = std::lower_bound(gg.r.begin(), gg.r.end(), pr.d);
          if (it != gg.r.end()) bg[static_cast<std::size_t>(it - gg.r.begin())] += pr.w;
        }
        if (pr.in_three && pr.d <= gj.b) {
          if (!pr.in_half && pr.d > gj.a) tilde_mass += pr.w;
          auto it = std::lower_bound(gj.r.begin(), gj.r.end(), pr.d);
          if (it != gj.r.end()) {
            auto k = static_cast<std::size_t>(it - gj.r.begin());
            if (pr.in_half) {
              bi[k] += pr.w;
            } else {
              be[k] += pr.w;
            }
          }
        }
      }
      ig[lv][xi] = integrate_prefix(gg, bg);
      ij_int[lv][xi] = integrate_prefix(gj, bi);
      ij_ext[lv][xi] = integrate_prefix(gj, be);
      ij_tilde[lv][xi] = tilde_mass / tall_of_level[lv];
    }
  });

  EnergyTable table;
  table.A = A;
  table.quad = quad;
  std::size_t n_cubes = lat.cubes.size();
  table.eg.assign(n_cubes, 0.0);
  table.ej.assign(n_cubes, 0.0);
  table.ej_int.assign(n_cubes, 0.0);
  table.ej_ext.assign(n_cubes, 0.0);
  table.ej_tilde.assign(n_cubes, 0.0);

  parallel_for(static_cast<int>(n_cubes), threads, [&](int qi) {
    const DyadicCube& q = lat.cubes[static_cast<std::size_t>(qi)];
    int lv = q.level;
    AnisoRect domain = cube_rect(lat, q).scaled(2.0 * A);
    double sum_g = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (domain.contains(mu.points[i])) sum_g += mu.weights[i] * ig[lv][i];
    double sum_int = 0.0, sum_ext = 0.0, sum_tilde = 0.0;
    for (int m : q.members) {
      sum_int += mu.weights[m] * ij_int[lv][m];
      sum_ext += mu.weights[m] * ij_ext[lv][m];
      sum_tilde += mu.weights[m] * ij_tilde[lv][m];
    }
    table.eg[qi] = sum_g / q.mass;
    table.ej_int[qi] = sum_int / q.mass;
    table.ej_ext[qi] = sum_ext / q.mass;
    table.ej[qi] = table.ej_int[qi] + table.ej_ext[qi];
    table.ej_tilde[qi] = sum_tilde / q.mass;
  });
  return table;
}

Corona build_corona(const CubeLattice& lat, const EnergyTable& energies, double aspect,
                    double delta) {
  if (delta < 0.0) throw PreconditionViolation("delta must be nonnegative");
  Corona corona;
  corona.delta = delta;
  corona.aspect = aspect;
  corona.root_of.assign(lat.cubes.size(), -1);
  corona.is_bce.assign(lat.cubes.size(), 0);
  double threshold = delta * aspect;

  std::deque<std::pair<int, int>> queue;  // (cube id, layer)
  for (int id : lat.levels[0]) queue.emplace_back(id, 0);
  while (!queue.empty()) {
    auto [root_id, layer] = queue.front();
    queue.pop_front();
    CoronaRoot root;
    root.cube = root_id;
    root.layer = layer;
    int root_index = static_cast<int>(corona.roots.size());

    std::vector<std::pair<int, double>> stack{{root_id, 0.0}};
    while (!stack.empty()) {
      auto [id, above] = stack.back();
      stack.pop_back();
      double acc = above + energies.eg[static_cast<std::size_t>(id)];
      root.tree.push_back(id);
      corona.root_of[static_cast<std::size_t>(id)] = root_index;
      if (acc >= threshold) {
        root.bce.push_back(id);
        corona.is_bce[static_cast<std::size_t>(id)] = 1;
        for (int ch : lat.cube(id).children) queue.emplace_back(ch, layer + 1);
      } else {
        for (int ch : lat.cube(id).children) stack.emplace_back(ch, acc);
      }
    }
    std::sort(root.tree.begin(), root.tree.end());
    std::sort(root.bce.begin(), root.bce.end());
    corona.roots.push_back(std::move(root));
  }
  return corona;
}

TreeBoundsReport check_tree_bounds(const Corona& corona, const CubeLattice& lat,
                                   const EnergyTable& energies) {
  TreeBoundsReport rep;
  double threshold = corona.delta * corona.aspect;
  for (const auto& root : corona.roots) {
    TreeBoundsRow row;
    row.root = root.cube;
    double root_mass = lat.cube(root.cube).mass;
    for (int id : root.tree) {
      double term = energies.eg[static_cast<std::size_t>(id)] * lat.cube(id).mass;
      row.tree_energy += term;
      if (!corona.is_bce[static_cast<std::size_t>(id)]) row.small_sum += term;
    }
    for (int id : root.bce) row.bce_mass_sum += lat.cube(id).mass;
    row.small_bound = threshold * root_mass;
    // Construction tautologies; the slack only absorbs float reassociation.
    double slack = 1e-9 * std::max(1.0, row.small_bound + row.tree_energy) + 1e-300;
    row.small_ok = row.small_sum <= row.small_bound + slack;
    row.lower_ok = threshold * row.bce_mass_sum <= row.tree_energy + slack;
    row.upper_ratio = row.tree_energy / (corona.aspect * root_mass);
    rep.all_ok = rep.all_ok && row.small_ok && row.lower_ok;
    rep.rows.push_back(row);
  }
  return rep;
}

PackingReport check_packing(const Corona& corona, const CubeLattice& lat,
                            const DiscreteMeasure& mu, const DirectionSet& g, double delta,
                            double nodes_per_decade) {
  PackingReport rep;
  for (const auto& root : corona.roots) rep.sum_top += lat.cube(root.cube).mass;
  rep.mass_term = mu.total;
  double diam = mu.diameter();
  double r_min = mu.spacing;
  if (g.count() > 0 && delta > 0.0 && diam > r_min) {
    double energy = global_cone_energy(mu, g, r_min, diam, nodes_per_decade);
    rep.energy_term = energy / (delta * corona.aspect);
  }
  rep.ratio = rep.sum_top / (rep.energy_term + rep.mass_term);
  return rep;
}

LittlemeasReport check_littlemeas(const DiscreteMeasure& mu, const DyadicInterval& J,
                                  const DirectionSet& g, const std::vector<GapWitness>& witnesses,
                                  double M, int centers) {
  std::vector<DyadicInterval> gaps = maximal_gaps(J, g);
  for (const auto& gap : gaps) {
    bool found = false;
    for (const auto& w : witnesses) {
      if (w.gap == gap) {
        AngleInterval dilate{Direction::of(gap.mid()), 1.5 * gap.length()};
        if (dilate.contains(w.theta)) found = true;
        break;
      }
    }
    if (!found) throw WitnessMissing("gap interval lacks a verified density direction");
  }

  DirectionSet j_bits(g.depth());
  j_bits.set_interval(J);
  DirectionSet lines = j_bits.minus(g).line_closure();

  LittlemeasReport rep;
  rep.gap_measure = j_bits.minus(g).measure();
  if (rep.gap_measure == 0.0) return rep;

  double diam = mu.diameter();
  double r_lo = 10.0 * mu.spacing;
  if (!(r_lo < diam)) return rep;
  std::size_t stride = std::max<std::size_t>(1, mu.size() / std::max(1, centers));
  for (std::size_t ci = 0; ci < mu.size(); ci += stride) {
    ++rep.centers;
    Vec2 x = mu.points[ci];
    std::vector<std::pair<double, double>> hits;  // (distance, weight)
    for (std::size_t j = 0; j < mu.size(); ++j) {
      if (j == ci) continue;
      Vec2 d = mu.points[j] - x;
      double dn = norm(d);
      if (dn <= mu.spacing || dn > diam) continue;
      if (lines.test(lines.cell_of(direction_of(d.x, d.y)))) hits.emplace_back(dn, mu.weights[j]);
    }
    std::sort(hits.begin(), hits.end());
    // sup over r in [r_lo, diam] of mass(r)/r, attained at r_lo or at jumps.
    double mass = 0.0;
    std::size_t k = 0;
    for (; k < hits.size() && hits[k].first <= r_lo; ++k) mass += hits[k].second;
    if (mass > 0.0)
      rep.max_ratio = std::max(rep.max_ratio, mass / (M * rep.gap_measure * r_lo));
    for (; k < hits.size(); ++k) {
      mass += hits[k].second;
      rep.max_ratio = std::max(rep.max_ratio, mass / (M * rep.gap_measure * hits[k].first));
    }
  }
  return rep;
}

FillingGapsReport check_filling_gaps(const DiscreteMeasure& mu, const AngleInterval& J,
                                     const DirectionSet& g, double eps, int centers) {
  DirectionSet j_bits(g.depth());
  j_bits.set_cells_touching(J.center.t - J.halfwidth, J.center.t + J.halfwidth);
  double gap_measure = j_bits.minus(g).measure();
  if (gap_measure > eps * J.measure() + kLengthTol)
    throw PreconditionViolation("direction gaps exceed eps * |J|");

  FillingGapsReport rep;
  double diam = mu.diameter();
  if (!(mu.spacing < diam / 2.0)) return rep;
  AngleInterval inner = J.scaled(0.9);
  double s_inner = sin_turn(std::min(inner.halfwidth, 0.25));
  Vec2 axis_perp = inner.center.perp().unit();
  DirectionSet lines = g.line_closure();

  struct Hit {
    double d;
    double w;
    bool in_inner;
    bool in_g;
  };
  std::size_t stride = std::max<std::size_t>(1, mu.size() / std::max(1, centers));
  for (std::size_t ci = 0; ci < mu.size(); ci += stride) {
    Vec2 x = mu.points[ci];
    std::vector<Hit> hits;
    for (std::size_t j = 0; j < mu.size(); ++j) {
      if (j == ci) continue;
      Vec2 d = mu.points[j] - x;
      double dn = norm(d);
      if (dn <= mu.spacing || dn > diam) continue;
      Hit hh;
      hh.d = dn;
      hh.w = mu.weights[j];
      hh.in_inner = std::fabs(dot(d, axis_perp)) <= s_inner * dn + kLengthTol;
      hh.in_g = lines.test(lines.cell_of(direction_of(d.x, d.y)));
      if (hh.in_inner || hh.in_g) hits.push_back(hh);
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.d < b.d; });
    std::vector<double> num_prefix(hits.size() + 1, 0.0), den_prefix(hits.size() + 1, 0.0);
    for (std::size_t k = 0; k < hits.size(); ++k) {
      num_prefix[k + 1] = num_prefix[k] + (hits[k].in_inner ? hits[k].w : 0.0);
      den_prefix[k + 1] = den_prefix[k] + (hits[k].in_g ? hits[k].w : 0.0);
    }
    auto mass_below = [&](const std::vector<double>& prefix, double r) {
      std::size_t lo = 0, hi = hits.size();
      while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (hits[mid].d <= r) {
          lo = mid + 1;
        } else {
          hi = mid;
        }
      }
      return prefix[lo];
    };
    // sup over r of num(r)/den(2r) is attained at numerator jump points.
    for (std::size_t k = 0; k < hits.size(); ++k) {
      if (!hits[k].in_inner) continue;
      double r = hits[k].d;
      if (r > diam / 2.0) break;
      double num = mass_below(num_prefix, r);
      double den = mass_below(den_prefix, 2.0 * r);
      ++rep.checked;
      if (den <= 0.0) {
        rep.violations.emplace_back(static_cast<int>(ci), r);
      } else {
        rep.max_ratio = std::max(rep.max_ratio, num / den);
      }
    }
  }
  return rep;
}

OverlapReport check_projection_overlap(const Corona& corona, const CubeLattice& lat,
                                       const std::vector<char>& tree_passes, int bound) {
  OverlapReport rep;
  for (std::size_t ri = 0; ri < corona.roots.size(); ++ri) {
    const auto& root = corona.roots[ri];
    std::vector<std::vector<std::pair<double, int>>> events(lat.depth());
    for (int id : root.tree) {
      if (corona.is_bce[static_cast<std::size_t>(id)]) continue;
      const DyadicCube& q = lat.cube(id);
      events[q.level].emplace_back(q.center.x - 0.5 * q.side, +1);
      events[q.level].emplace_back(q.center.x + 0.5 * q.side, -1);
    }
    for (int lv = 0; lv < lat.depth(); ++lv) {
      if (events[lv].empty()) continue;
      auto& ev = events[lv];
      // Closed intervals: process openings before closings at equal x.
      std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first < b.first : a.second > b.second;
      });
      int depth_count = 0, best = 0;
      for (const auto& [x, delta] : ev) {
        depth_count += delta;
        best = std::max(best, depth_count);
      }
      OverlapRow row;
      row.root = root.cube;
      row.level = lv;
      row.max_overlap = best;
      row.applicable = ri < tree_passes.size() && tree_passes[ri];
      row.ok = !row.applicable || best <= bound;
      rep.all_ok = rep.all_ok && row.ok;
      rep.rows.push_back(row);
    }
  }
  return rep;
}

double exterior_energy_ratio(const CubeLattice& lat, const EnergyTable& energies) {
  double num = 0.0, den = 0.0;
  for (const auto& q : lat.cubes) {
    num += energies.ej_ext[static_cast<std::size_t>(q.id)] * q.mass;
    den += energies.ej_tilde[static_cast<std::size_t>(q.id)] * q.mass;
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : kInf;
  return num / den;
}

}  // namespace favlab
