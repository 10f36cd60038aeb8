#pragma once

#include <cstdint>
#include <vector>

#include "favlab/lattice.hpp"

namespace favlab {

class WitnessMissing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureSpec {
  double per_decade = 16.0;  // log-midpoint nodes per decade of r
};

/// Log-midpoint quadrature grid for integrals in dr/r over [a, b].
struct LogGrid {
  double a = 0.0;
  double b = 0.0;
  double dlog = 0.0;
  std::vector<double> r;  // midpoints, ascending

  static LogGrid over(double a, double b, double per_decade);
};

/// Per-cube conical energies, all evaluated on the same quadrature grids.
/// `ej` always equals `ej_int + ej_ext` (same nodes, complementary
/// direction sets).
struct EnergyTable {
  double A = 0.0;
  QuadratureSpec quad;
  std::vector<double> eg;        // directions G, x over sample in 2A*rect(Q)
  std::vector<double> ej;        // directions 3J, x over Q
  std::vector<double> ej_int;    // directions 0.5J
  std::vector<double> ej_ext;    // directions 3J minus 0.5J
  std::vector<double> ej_tilde;  // single-scale double-truncated variant
};

/// Evaluates every energy for every cube.  G is a direction bitset, J the
/// direction interval the lattice aspect came from (measure(J) == aspect).
EnergyTable compute_energies(const CubeLattice& lat, const DiscreteMeasure& mu,
                             const DirectionSet& g, const AngleInterval& J, double A,
                             QuadratureSpec quad, int threads = 1);

struct CoronaRoot {
  int cube = -1;
  int layer = 0;
  std::vector<int> tree;  // cubes not strictly below a stopping cube
  std::vector<int> bce;   // maximal cubes whose ancestor energy sum stops
};

/// Stopping-time decomposition of the lattice into trees.
struct Corona {
  double delta = 0.0;
  double aspect = 0.0;
  std::vector<CoronaRoot> roots;
  std::vector<int> root_of;  // per cube id: index into roots
  std::vector<char> is_bce;  // per cube id
};

Corona build_corona(const CubeLattice& lat, const EnergyTable& energies, double aspect,
                    double delta);

struct TreeBoundsRow {
  int root = -1;
  double small_sum = 0.0;    // sum over Tree minus BCE of eg*mass
  double small_bound = 0.0;  // delta*|J|*mass(root)
  double bce_mass_sum = 0.0; // sum of BCE masses
  double tree_energy = 0.0;  // sum over Tree of eg*mass
  double upper_ratio = 0.0;  // tree_energy / (|J|*mass(root))
  bool small_ok = false;
  bool lower_ok = false;
};

struct TreeBoundsReport {
  std::vector<TreeBoundsRow> rows;
  bool all_ok = true;
};

/// Construction tautologies of the stopping time; violations indicate an
/// implementation bug, so both inequalities are hard checks.
TreeBoundsReport check_tree_bounds(const Corona& corona, const CubeLattice& lat,
                                   const EnergyTable& energies);

struct PackingReport {
  double sum_top = 0.0;      // total mass of the roots
  double energy_term = 0.0;  // (delta*|J|)^-1 * global cone energy over G
  double mass_term = 0.0;    // mu(E)
  double ratio = 0.0;
};

PackingReport check_packing(const Corona& corona, const CubeLattice& lat,
                            const DiscreteMeasure& mu, const DirectionSet& g, double delta,
                            double nodes_per_decade);

struct GapWitness {
  DyadicInterval gap;
  Direction theta;
};

struct LittlemeasReport {
  double max_ratio = 0.0;  // measured constant C
  double gap_measure = 0.0;
  int centers = 0;
};

/// Measures sup of mass(X(x, J\G, r)) / (M*|J\G|*r) over strided sample
/// centers; the sup over r is exact (evaluated at the mass jump points).
/// Every gap interval of J\G must carry a witness direction inside its
/// 3-dilate.
LittlemeasReport check_littlemeas(const DiscreteMeasure& mu, const DyadicInterval& J,
                                  const DirectionSet& g, const std::vector<GapWitness>& witnesses,
                                  double M, int centers);

struct FillingGapsReport {
  double max_ratio = 0.0;
  int checked = 0;
  /// (point index, r) pairs where the 0.9J cone saw mass but the G cone at 2r
  /// saw none; any entry falsifies the discrete inequality.
  std::vector<std::pair<int, double>> violations;
};

/// Measures sup of mass(X(x, 0.9J, r)) / mass(X(x, G, 2r)) over strided
/// centers, exact in r (the sup is attained at numerator jump points).
FillingGapsReport check_filling_gaps(const DiscreteMeasure& mu, const AngleInterval& J,
                                     const DirectionSet& g, double eps, int centers);

struct OverlapRow {
  int root = -1;
  int level = 0;
  int max_overlap = 0;
  bool applicable = false;  // tree passed the empty-cone check
  bool ok = true;
};

struct OverlapReport {
  std::vector<OverlapRow> rows;
  bool all_ok = true;
};

/// Max stabbing number of the horizontal projections of the non-stopping
/// tree rectangles, per root and level.
OverlapReport check_projection_overlap(const Corona& corona, const CubeLattice& lat,
                                       const std::vector<char>& tree_passes, int bound);

/// Measured constant in sum(ej_ext * mass) <= C * sum(ej_tilde * mass).
double exterior_energy_ratio(const CubeLattice& lat, const EnergyTable& energies);

}  // namespace favlab
