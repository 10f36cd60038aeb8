#include "favlab/generators.hpp"

#include <algorithm>
#include <cmath>

#include "favlab/direction_set.hpp"
#include "favlab/utils.hpp"

namespace favlab {

PlanarSet cantor4(int n) {
  if (n < 1 || n > 8) throw PreconditionViolation("cantor4 iterate must satisfy 1 <= n <= 8");
  std::vector<Vec2> corners = {{0.0, 0.0}};
  double side = 1.0;
  for (int level = 0; level < n; ++level) {
    double quarter = 0.75 * side;
    side *= 0.25;
    std::vector<Vec2> next;
    next.reserve(4 * corners.size());
    for (Vec2 c : corners) {
      next.push_back(c);
      next.push_back({c.x + quarter, c.y});
      next.push_back({c.x, c.y + quarter});
      next.push_back({c.x + quarter, c.y + quarter});
    }
    corners = std::move(next);
  }
  PlanarSet set;
  double mass = 1.0 / static_cast<double>(corners.size());
  set.primitives.reserve(corners.size());
  for (Vec2 c : corners)
    set.primitives.push_back(AxisBox{{c.x + 0.5 * side, c.y + 0.5 * side}, side, mass});
  return set;
}

PlanarSet parallel_segments(int k, Direction theta0, const std::vector<double>& offsets,
                            const std::vector<double>& lengths) {
  if (k < 1 || offsets.size() != static_cast<std::size_t>(k) ||
      lengths.size() != static_cast<std::size_t>(k))
    throw PreconditionViolation("parallel_segments needs k matching offsets/lengths");
  for (double len : lengths)
    if (!(len > 0.0)) throw PreconditionViolation("segment lengths must be positive");
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (offsets[i] == offsets[j])
        throw OverlapError("segments share a perpendicular offset and intersect");

  Vec2 e = theta0.unit();
  Vec2 e_perp = theta0.perp().unit();
  double total_len = 0.0;
  for (double len : lengths) total_len += len;
  PlanarSet set;
  set.primitives.reserve(k);
  for (int i = 0; i < k; ++i) {
    Vec2 a = e_perp * offsets[i];
    Vec2 b = a + e * lengths[i];
    set.primitives.push_back(Segment{a, b, lengths[i] / total_len});
  }
  return set;
}

PlanarSet lipschitz_graph(double lip, int n_nodes, std::uint64_t seed) {
  if (lip < 0.0) throw PreconditionViolation("lipschitz bound must be nonnegative");
  if (n_nodes < 2) throw PreconditionViolation("lipschitz_graph needs at least 2 nodes");
  SplitMix64 rng(seed);
  double dx = 1.0 / static_cast<double>(n_nodes - 1);
  std::vector<Vec2> nodes;
  nodes.reserve(n_nodes);
  double y = lip > 0.0 ? 0.5 : 0.0;
  nodes.push_back({0.0, y});
  for (int i = 1; i < n_nodes; ++i) {
    double slope = rng.uniform(-lip, lip);
    double ny = y + slope * dx;
    if (ny < 0.0 || ny > 1.0) {
      slope = -slope;  // reflect at the unit-square walls
      ny = y + slope * dx;
    }
    y = std::clamp(ny, 0.0, 1.0);
    nodes.push_back({static_cast<double>(i) * dx, y});
  }
  double total_len = 0.0;
  for (int i = 1; i < n_nodes; ++i) total_len += dist(nodes[i - 1], nodes[i]);
  PlanarSet set;
  set.primitives.reserve(n_nodes - 1);
  for (int i = 1; i < n_nodes; ++i)
    set.primitives.push_back(Segment{nodes[i - 1], nodes[i], dist(nodes[i - 1], nodes[i]) / total_len});
  return set;
}

}  // namespace favlab
