#include "favlab/gap_lemma.hpp"

#include <algorithm>
#include <cmath>

namespace favlab {

double GapSet::total_gap_length() const {
  double t = 0.0;
  for (const auto& [a, b] : gaps) t += b - a;
  return t;
}

std::vector<std::pair<double, double>> GapSet::filtered(double r, double A) const {
  std::vector<std::pair<double, double>> out;
  for (const auto& [a, b] : gaps) {
    double len = b - a;
    if (len >= r / A && len <= A * r) out.emplace_back(a, b);
  }
  return out;
}

GapSet find_gaps(const CubeLattice& lat, const DiscreteMeasure& mu, int root_cube, double A) {
  const DyadicCube& root = lat.cube(root_cube);
  GapSet gs;
  gs.root = root_cube;
  gs.lo = root.center.x - 0.5 * A * root.side;
  gs.hi = root.center.x + 0.5 * A * root.side;

  AnisoRect domain = cube_rect(lat, root).scaled(A);
  double h = mu.spacing;
  std::vector<std::pair<double, double>> covered;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!domain.contains(mu.points[i])) continue;
    double px = mu.points[i].x;
    covered.emplace_back(px - h, px + h);
  }
  std::sort(covered.begin(), covered.end());

  double cursor = gs.lo;
  for (const auto& [a, b] : covered) {
    if (b <= cursor) continue;
    if (a > cursor && cursor < gs.hi) gs.gaps.emplace_back(cursor, std::min(a, gs.hi));
    cursor = std::max(cursor, b);
    if (cursor >= gs.hi) break;
  }
  if (cursor < gs.hi) gs.gaps.emplace_back(cursor, gs.hi);
  return gs;
}

std::vector<TreeConeCheck> check_empty_cones(const Corona& corona, const CubeLattice& lat,
                                             const DiscreteMeasure& mu, const AngleInterval& J,
                                             double A) {
  double s_half = sin_turn(std::min(0.5 * J.halfwidth, 0.25));
  Vec2 axis_perp = J.center.perp().unit();
  const std::size_t n = mu.size();

  std::vector<TreeConeCheck> out;
  std::vector<int> stamp(n, -1);
  int stamp_key = 0;
  for (std::size_t ri = 0; ri < corona.roots.size(); ++ri) {
    const auto& root = corona.roots[ri];
    TreeConeCheck check;
    check.root_index = static_cast<int>(ri);
    check.root_cube = root.cube;
    double r_out = A * A * lat.cube(root.cube).tall;

    for (int lv = 0; lv < lat.depth() && check.pass; ++lv) {
      double tall = 0.0;
      ++stamp_key;
      bool any = false;
      for (int id : root.tree) {
        if (corona.is_bce[static_cast<std::size_t>(id)]) continue;
        const DyadicCube& q = lat.cube(id);
        if (q.level != lv) continue;
        tall = q.tall;
        AnisoRect domain = cube_rect(lat, q).scaled(A);
        for (std::size_t i = 0; i < n; ++i) {
          if (stamp[i] != stamp_key && domain.contains(mu.points[i])) {
            stamp[i] = stamp_key;
            any = true;
          }
        }
      }
      if (!any) continue;
      double r_in = tall / A;
      double r_in_sq = r_in * r_in;
      double r_out_sq = r_out * r_out;
      for (std::size_t i = 0; i < n && check.pass; ++i) {
        if (stamp[i] != stamp_key) continue;
        Vec2 x = mu.points[i];
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          Vec2 d = mu.points[j] - x;
          double d_sq = norm_sq(d);
          if (d_sq <= r_in_sq || d_sq > r_out_sq) continue;
          double off = std::fabs(dot(d, axis_perp));
          if (off <= s_half * std::sqrt(d_sq) + kLengthTol) {
            check.pass = false;
            check.witness_x = static_cast<int>(i);
            check.witness_y = static_cast<int>(j);
            break;
          }
        }
      }
    }
    out.push_back(check);
  }
  return out;
}

std::vector<BadCubeWitness> find_bad_cubes(const Corona& corona, const CubeLattice& lat,
                                           const DiscreteMeasure& mu, const AngleInterval& J) {
  double s_half = sin_turn(std::min(0.5 * J.halfwidth, 0.25));
  double s_three = sin_turn(std::min(3.0 * J.halfwidth, 0.25));
  Vec2 axis_perp = J.center.perp().unit();
  const std::size_t n = mu.size();
  double rho = lat.rho;

  std::vector<BadCubeWitness> out;
  for (std::size_t ri = 0; ri < corona.roots.size(); ++ri) {
    const auto& root = corona.roots[ri];
    for (int id : root.tree) {
      const DyadicCube& q = lat.cube(id);
      double r_out = q.tall;
      double r_in = rho * q.tall;
      double r_in_sq = r_in * r_in;
      double r_out_sq = r_out * r_out;
      bool found = false;
      for (int m : q.members) {
        Vec2 x = mu.points[static_cast<std::size_t>(m)];
        for (std::size_t j = 0; j < n; ++j) {
          if (j == static_cast<std::size_t>(m)) continue;
          Vec2 d = mu.points[j] - x;
          double d_sq = norm_sq(d);
          if (d_sq <= r_in_sq || d_sq > r_out_sq) continue;
          double dn = std::sqrt(d_sq);
          double off = std::fabs(dot(d, axis_perp));
          bool in_three = off <= s_three * dn + kLengthTol;
          bool in_half = off <= s_half * dn + kLengthTol;
          if (in_three && !in_half) {
            BadCubeWitness bw;
            bw.root_index = static_cast<int>(ri);
            bw.root_cube = root.cube;
            bw.cube = id;
            bw.x = m;
            bw.y = static_cast<int>(j);
            bw.in_bce = corona.is_bce[static_cast<std::size_t>(id)] != 0;
            out.push_back(bw);
            found = true;
            break;
          }
        }
        if (found) break;
      }
    }
  }
  return out;
}

LeftistTrace leftist_search(const std::vector<Vec2>& pts, Vec2 x, Vec2 y, int N, double h) {
  if (N < 1) throw PreconditionViolation("subrect count parameter must be >= 1");
  if (!(x.x < y.x && x.y > y.y))
    throw PreconditionViolation("witness must be reduced to the lower-right frame");

  LeftistTrace tr;
  tr.x = x;
  tr.y = y;
  tr.n_stack = N;
  tr.lo_x = x.x;
  tr.hi_x = y.x;
  tr.center_y = y.y;
  double stack_height = x.y - y.y;
  tr.half_height = 0.5 * stack_height;
  tr.cell_height = stack_height / static_cast<double>(2 * N + 1);
  tr.leftmost.assign(static_cast<std::size_t>(2 * N + 1), -1);

  if (tr.cell_height < 4.0 * h) {
    tr.status = LeftistTrace::Status::kRefused;
    return tr;
  }

  // Candidates inside the closed stack rectangle; subrects are closed too,
  // so shared edges belong to both neighbours.
  std::vector<int> cand;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2& p = pts[i];
    if (p.x < tr.lo_x || p.x > tr.hi_x) continue;
    if (std::fabs(p.y - tr.center_y) > tr.half_height + kLengthTol) continue;
    cand.push_back(static_cast<int>(i));
  }
  double unit = stack_height / static_cast<double>(2 * (2 * N + 1));
  for (int i = -N; i <= N; ++i) {
    double lo = tr.center_y + (2 * i - 1) * unit;
    double hi = tr.center_y + (2 * i + 1) * unit;
    int best = -1;
    for (int ci : cand) {
      const Vec2& p = pts[static_cast<std::size_t>(ci)];
      if (p.y < lo - kLengthTol || p.y > hi + kLengthTol) continue;
      if (best < 0 || p.x < pts[static_cast<std::size_t>(best)].x) best = ci;
    }
    tr.leftmost[static_cast<std::size_t>(i + N)] = best;
  }

  auto beats = [&](int i, int j) {
    // true when no point of subrect j lies strictly left of the leftmost of i
    int zi = tr.leftmost_at(i);
    int zj = tr.leftmost_at(j);
    if (zj < 0) return true;
    return pts[static_cast<std::size_t>(zi)].x <= pts[static_cast<std::size_t>(zj)].x;
  };
  for (int d = 0; d <= N - 1; ++d) {
    for (int sign : {+1, -1}) {
      int i = sign * d;
      if (d == 0 && sign < 0) continue;
      if (tr.leftmost_at(i) < 0) continue;
      if (beats(i, i - 1) && beats(i, i + 1)) {
        tr.chosen = i;
        tr.status = LeftistTrace::Status::kFound;
        return tr;
      }
    }
  }
  tr.status = LeftistTrace::Status::kNotFound;
  return tr;
}

GapVerdict verify_gap_lemma(const CubeLattice& lat, const DiscreteMeasure& mu,
                            const BadCubeWitness& bad, const GapSet& gaps,
                            const GapLemmaParams& params, const DiscreteMeasure* recheck) {
  GapVerdict v;
  v.root = bad.root_cube;
  v.cube = bad.cube;
  const DyadicCube& q = lat.cube(bad.cube);
  const DyadicCube& root = lat.cube(bad.root_cube);
  double h = mu.spacing;
  double A = params.A;

  if (bad.in_bce) {
    v.status = GapVerdict::Status::kNotApplicable;
    v.detail = "cube is a stopping cube";
    return v;
  }
  if (h > q.side / (params.min_side_factor * A)) {
    v.status = GapVerdict::Status::kRefused;
    v.detail = "sample spacing too coarse for this cube";
    return v;
  }

  Vec2 wx = mu.points[static_cast<std::size_t>(bad.x)];
  Vec2 wy = mu.points[static_cast<std::size_t>(bad.y)];
  v.flip_x = wx.x > wy.x;
  v.flip_y = wx.y < wy.y;
  double sx = v.flip_x ? -1.0 : 1.0;
  double sy = v.flip_y ? -1.0 : 1.0;
  auto reduce = [&](Vec2 p) { return Vec2{sx * p.x, sy * p.y}; };
  std::vector<Vec2> pts(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) pts[i] = reduce(mu.points[i]);
  Vec2 rx = reduce(wx), ry = reduce(wy);

  LeftistTrace tr = leftist_search(pts, rx, ry, params.N, h);
  if (tr.status == LeftistTrace::Status::kRefused) {
    v.status = GapVerdict::Status::kRefused;
    v.detail = "stack cells below sampling resolution";
    return v;
  }
  if (tr.status == LeftistTrace::Status::kNotFound) {
    v.status = GapVerdict::Status::kNotFound;
    v.detail = "no leftist subrectangle";
    return v;
  }
  v.leftist_index = tr.chosen;
  Vec2 z = pts[static_cast<std::size_t>(tr.leftmost_at(tr.chosen))];
  v.b_length = z.x - rx.x;
  v.b_over_side = v.b_length / q.side;
  v.pivot = {sx * z.x, sy * z.y};

  // The tall empty rectangle left of the leftmost point.  The emptiness scan
  // runs against `recheck` when given (same frame reduction applied).
  double a_lo = z.x - q.side / A;
  double a_hi = z.x;
  double a_half_height = 2.0 * A * root.tall;
  v.a_interior_empty = true;
  const DiscreteMeasure& scan_mu = recheck != nullptr ? *recheck : mu;
  for (std::size_t i = 0; i < scan_mu.size(); ++i) {
    Vec2 p = reduce(scan_mu.points[i]);
    if (p.x > a_lo && p.x < a_hi && std::fabs(p.y - z.y) < a_half_height) {
      v.a_interior_empty = false;
      break;
    }
  }

  // Back to the original frame for the gap lookup.
  double lo = v.flip_x ? -a_hi : a_lo;
  double hi = v.flip_x ? -a_lo : a_hi;
  v.empty_span = {lo, hi};
  bool found = false;
  for (const auto& [ga, gb] : gaps.gaps) {
    if (ga <= lo + h + kLengthTol && hi - h - kLengthTol <= gb) {
      v.gap = {ga, gb};
      v.gap_len = gb - ga;
      double zx = v.flip_x ? -z.x : z.x;
      v.endpoint_offset = std::fabs((v.flip_x ? ga : gb) - zx);
      found = true;
      break;
    }
  }
  v.gap_found = found;
  if (found) {
    v.gap_long_enough = v.gap_len >= q.side / A;
    double center = 0.5 * (v.gap.first + v.gap.second);
    double half = 0.5 * A * A * A * v.gap_len;
    v.rect_inside_dilate = center - half <= q.center.x - 0.5 * q.side &&
                           q.center.x + 0.5 * q.side <= center + half;
  }

  bool ok = v.a_interior_empty && v.gap_found && v.gap_long_enough && v.rect_inside_dilate;
  v.status = ok ? GapVerdict::Status::kPass : GapVerdict::Status::kFail;
  if (!ok) {
    v.detail = !v.a_interior_empty  ? "sample point inside the tall empty rectangle"
               : !v.gap_found       ? "no projection gap contains the empty span"
               : !v.gap_long_enough ? "gap shorter than side/A"
                                    : "cube projection escapes the dilated gap";
  }
  return v;
}

GraphExtract extract_graph_parallel_segments(const PlanarSet& set, const DiscreteMeasure& mu,
                                             const DirectionSet& g_avoid, double s,
                                             double density_bin) {
  if (!(s > 0.0 && s < 1.0)) throw PreconditionViolation("s must lie in (0,1)");
  if (g_avoid.measure() < s)
    throw PreconditionViolation("avoided direction set smaller than s");

  // Common direction of the segments, as a line direction in [0, 1/2).
  bool have = false;
  double theta0 = 0.0;
  for (const auto& prim : set.primitives) {
    const auto* seg = std::get_if<Segment>(&prim);
    if (seg == nullptr) throw PreconditionViolation("set is not a union of segments");
    Vec2 d = seg->b - seg->a;
    double phi = direction_of(d.x, d.y);
    if (phi >= 0.5) phi -= 0.5;
    if (!have) {
      theta0 = phi;
      have = true;
    } else if (std::fabs(phi - theta0) > 1e-9 && std::fabs(phi - theta0) < 0.5 - 1e-9) {
      throw PreconditionViolation("segments are not parallel");
    }
  }
  if (!have) throw PreconditionViolation("empty segment set");

  DirectionSet g = g_avoid;
  DirectionSet window(g.depth());
  window.set_cells_touching(theta0 - 0.1 * s, theta0 + 0.1 * s);
  window.set_cells_touching(theta0 + 0.5 - 0.1 * s, theta0 + 0.5 + 0.1 * s);
  g = g.minus(window);
  if (g.count() == 0) throw PreconditionViolation("avoided set vanishes after the window cut");

  // Cell deepest inside the avoided set: max circular distance to the complement.
  auto n_cells = static_cast<std::int64_t>(g.cells());
  std::int64_t best_cell = -1, best_dist = -1;
  for (std::int64_t c = 0; c < n_cells; ++c) {
    if (!g.test(static_cast<std::uint64_t>(c))) continue;
    std::int64_t d = 0;
    for (; d < n_cells; ++d) {
      std::int64_t lo = ((c - d) % n_cells + n_cells) % n_cells;
      std::int64_t hi = (c + d) % n_cells;
      if (!g.test(static_cast<std::uint64_t>(lo)) || !g.test(static_cast<std::uint64_t>(hi)))
        break;
    }
    if (d > best_dist) {
      best_dist = d;
      best_cell = c;
    }
  }

  GraphExtract out;
  out.theta = Direction::of(g.cell_center(static_cast<std::uint64_t>(best_cell)));
  out.lip_bound = 4.0 / s;
  out.density_bound = 4.0 / s;

  // Decimate for the pairwise scan.
  std::size_t stride = std::max<std::size_t>(1, mu.size() / 1500);
  std::vector<Vec2> uv;  // (along theta, along theta-perp)
  Vec2 e = out.theta.unit();
  Vec2 ep = out.theta.perp().unit();
  std::vector<int> idx;
  for (std::size_t i = 0; i < mu.size(); i += stride) {
    uv.push_back({dot(mu.points[i], e), dot(mu.points[i], ep)});
    idx.push_back(static_cast<int>(i));
  }
  double h = mu.spacing;
  for (std::size_t i = 0; i < uv.size(); ++i) {
    for (std::size_t j = i + 1; j < uv.size(); ++j) {
      double du = std::fabs(uv[i].x - uv[j].x);
      double dv = std::fabs(uv[i].y - uv[j].y);
      if (dv < 0.25 * h && du >= 2.0 * h)
        throw NotAGraph("sample pair stacked over the graph axis", idx[i], idx[j]);
      if (dv > 0.0) out.lip = std::max(out.lip, du / dv);
    }
  }

  DensityProfile prof = pushforward_density(mu, out.theta.perp(), density_bin);
  out.density_sup = prof.sup_norm;
  out.pass = out.lip <= out.lip_bound && out.density_sup <= out.density_bound;
  return out;
}

}  // namespace favlab
