#include "favlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace favlab {

namespace {

/// Greedy maximal r-separated net over `order`, seeded with `seed_net`.
/// A point joins when its distance to every net point is >= r.
std::vector<int> extend_net(const DiscreteMeasure& mu, double aspect,
                            const std::vector<int>& order, const std::vector<int>& seed_net,
                            double r) {
  std::vector<int> net = seed_net;
  for (int idx : order) {
    bool ok = true;
    for (int c : net) {
      if (aniso_metric(mu.points[idx], mu.points[c], aspect) < r) {
        ok = false;
        break;
      }
    }
    if (ok) net.push_back(idx);
  }
  return net;
}

int nearest_center(const DiscreteMeasure& mu, double aspect, Vec2 p,
                   const std::vector<int>& net) {
  int best = 0;
  double best_d = kInf;
  for (std::size_t c = 0; c < net.size(); ++c) {
    double d = aniso_metric(p, mu.points[net[c]], aspect);
    if (d < best_d) {  // ties keep the smaller center id
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

CubeLattice build_lattice(const DiscreteMeasure& mu, double aspect, double rho, int depth) {
  if (!(aspect > 0.0 && aspect <= 1.0)) throw AspectError("aspect must lie in (0,1]");
  if (!(rho > 0.0 && rho <= 0.5)) throw PreconditionViolation("rho must lie in (0,1/2]");
  if (mu.points.empty()) throw EmptySample("cannot build a lattice over an empty sample");
  if (depth < 1) throw PreconditionViolation("lattice depth must be >= 1");

  CubeLattice lat;
  lat.aspect = aspect;
  lat.rho = rho;
  lat.sample_size = mu.size();

  // k(J): largest k with 4 rho^k / aspect >= 1.
  int k_top = 0;
  while (4.0 * std::pow(rho, k_top + 1) / aspect >= 1.0) ++k_top;
  lat.top_scale = k_top;

  // Deterministic candidate order: lexicographic (x, then y).
  std::vector<int> order(mu.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Vec2& pa = mu.points[a];
    const Vec2& pb = mu.points[b];
    return pa.x != pb.x ? pa.x < pb.x : pa.y < pb.y;
  });

  // Nested nets, one per level.
  std::vector<std::vector<int>> nets(depth);
  std::vector<int> empty;
  for (int lv = 0; lv < depth; ++lv) {
    double r = std::pow(rho, k_top + lv);
    nets[lv] = extend_net(mu, aspect, order, lv == 0 ? empty : nets[lv - 1], r);
  }

  // Net-parent chains: center c of level lv+1 goes to its nearest level-lv
  // center.  Centers shared between levels map to themselves.
  std::vector<std::vector<int>> net_parent(depth);
  for (int lv = 1; lv < depth; ++lv) {
    net_parent[lv].resize(nets[lv].size());
    for (std::size_t c = 0; c < nets[lv].size(); ++c)
      net_parent[lv][c] = nearest_center(mu, aspect, mu.points[nets[lv][c]], nets[lv - 1]);
  }

  // Finest-level assignment, then memberships bubble up the chains.
  int fin = depth - 1;
  std::vector<std::vector<int>> assign(depth);  // per level: point -> center index
  assign[fin].resize(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    assign[fin][i] = nearest_center(mu, aspect, mu.points[i], nets[fin]);
  for (int lv = fin; lv > 0; --lv) {
    assign[lv - 1].resize(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
      assign[lv - 1][i] = net_parent[lv][assign[lv][i]];
  }

  // Materialise cubes level by level; drop empty centers, keep id order
  // deterministic (level-major, then net order).
  lat.levels.resize(depth);
  std::vector<std::vector<int>> cube_id(depth);
  for (int lv = 0; lv < depth; ++lv) {
    cube_id[lv].assign(nets[lv].size(), -1);
    std::vector<std::vector<int>> members(nets[lv].size());
    for (std::size_t i = 0; i < mu.size(); ++i)
      members[assign[lv][i]].push_back(static_cast<int>(i));
    for (std::size_t c = 0; c < nets[lv].size(); ++c) {
      if (members[c].empty()) continue;
      DyadicCube q;
      q.id = static_cast<int>(lat.cubes.size());
      q.level = lv;
      q.scale = k_top + lv;
      q.center = mu.points[nets[lv][c]];
      q.members = std::move(members[c]);
      q.side = 4.0 * std::pow(rho, q.scale);
      q.tall = q.side / aspect;
      for (int m : q.members) q.mass += mu.weights[m];
      cube_id[lv][c] = q.id;
      lat.levels[lv].push_back(q.id);
      lat.cubes.push_back(std::move(q));
    }
  }
  for (int lv = 1; lv < depth; ++lv) {
    for (std::size_t c = 0; c < nets[lv].size(); ++c) {
      int id = cube_id[lv][c];
      if (id < 0) continue;
      int pid = cube_id[lv - 1][net_parent[lv][c]];
      lat.cubes[id].parent = pid;
      lat.cubes[pid].children.push_back(id);
    }
  }

  // Achieved sandwich constants.
  double out_c = 0.0, in_c = kInf;
  std::vector<int> stamp(mu.size(), -1);
  for (const auto& q : lat.cubes) {
    double rk = std::pow(rho, q.scale);
    for (int m : q.members) {
      stamp[m] = q.id;
      out_c = std::max(out_c, aniso_metric(mu.points[m], q.center, aspect) / rk);
    }
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (stamp[i] == q.id) continue;
      in_c = std::min(in_c, aniso_metric(mu.points[i], q.center, aspect) / rk);
    }
  }
  lat.out_constant = out_c;
  lat.in_constant = in_c;
  return lat;
}

AnisoRect cube_rect(const CubeLattice& lat, const DyadicCube& q) {
  return tall_rect(q.center, q.side, lat.aspect);
}

CubeMassReport cube_mass_bounds(const CubeLattice& lat, const DiscreteMeasure& mu, double M,
                                double density_bin) {
  CubeMassReport rep;
  bool found = false;
  for (double off : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
    Direction theta0 = Direction::of(0.25 + off * lat.aspect);
    DensityProfile prof = pushforward_density(mu, theta0.perp(), density_bin);
    if (!prof.degenerate && prof.sup_norm <= M) {
      rep.theta0 = theta0;
      rep.density_sup = prof.sup_norm;
      found = true;
      break;
    }
  }
  if (!found)
    throw HypothesisUnverified("no direction near the rect axis passes the density bound");

  rep.min_core_ratio = kInf;
  for (const auto& q : lat.cubes) {
    AnisoRect rect = cube_rect(lat, q);
    double rect_mass = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
      if (rect.contains(mu.points[i])) rect_mass += mu.weights[i];
    CubeMassRow row;
    row.cube = q.id;
    row.rect_ratio = rect_mass / q.side;
    row.core_ratio = q.mass / q.side;
    rep.max_rect_ratio = std::max(rep.max_rect_ratio, row.rect_ratio);
    rep.min_core_ratio = std::min(rep.min_core_ratio, row.core_ratio);
    rep.rows.push_back(row);
  }
  return rep;
}

std::string lattice_dump(const CubeLattice& lat) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& q : lat.cubes) {
    os << "{\"level\":" << q.level << ",\"id\":" << q.id << ",\"center\":[" << q.center.x << ","
       << q.center.y << "],\"parent\":" << q.parent << ",\"children\":[";
    for (std::size_t i = 0; i < q.children.size(); ++i) {
      if (i) os << ",";
      os << q.children[i];
    }
    os << "],\"mass\":" << q.mass << "}\n";
  }
  return os.str();
}

}  // namespace favlab
