#pragma once

#include <optional>
#include <string>
#include <vector>

#include "favlab/measure.hpp"

namespace favlab {

class AspectError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptySample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HypothesisUnverified : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One generalized cube: a cell of the level partition, sandwiched between
/// two anisotropic-metric balls around its center.
struct DyadicCube {
  int id = -1;
  int level = 0;             // level index, 0 = coarsest built level
  int scale = 0;             // absolute scale k, side = 4*rho^k
  Vec2 center;               // a sample point (net point)
  std::vector<int> members;  // indices into the sample
  int parent = -1;           // cube id, -1 at the top level
  std::vector<int> children;
  double side = 0.0;         // ell(Q) = 4 rho^k
  double tall = 0.0;         // L(Q) = ell(Q)/aspect
  double mass = 0.0;
};

/// Nested partitions of the sample point set under the anisotropic metric.
struct CubeLattice {
  double aspect = 1.0;
  double rho = 0.5;
  int top_scale = 0;  // k(J): largest k with 4*rho^k/aspect >= 1
  std::size_t sample_size = 0;
  std::vector<DyadicCube> cubes;
  std::vector<std::vector<int>> levels;  // cube ids per level
  // Achieved sandwich constants: every member within out_constant*rho^k of
  // its center, every sample point within in_constant*rho^k belongs.
  double in_constant = 0.0;
  double out_constant = 0.0;

  int depth() const { return static_cast<int>(levels.size()); }
  const DyadicCube& cube(int id) const { return cubes[static_cast<std::size_t>(id)]; }
};

/// Hierarchical-net construction of the cube lattice.  Deterministic: nets
/// grow in lexicographic (x, y) point order and each net extends the coarser
/// one; ties in nearest-center assignment go to the smaller center id.
CubeLattice build_lattice(const DiscreteMeasure& mu, double aspect, double rho, int depth);

/// The tall rectangle of a cube: width ell(Q), height ell(Q)/aspect around
/// the cube center.  Member points always lie inside it.
AnisoRect cube_rect(const CubeLattice& lat, const DyadicCube& q);

struct CubeMassRow {
  int cube = -1;
  double rect_ratio = 0.0;  // mass(rect_Q) / ell(Q)
  double core_ratio = 0.0;  // mass(Q) / ell(Q)
};

struct CubeMassReport {
  Direction theta0;         // density witness within 2*aspect of 1/4
  double density_sup = 0.0; // measured perp-density sup at theta0
  std::vector<CubeMassRow> rows;
  double max_rect_ratio = 0.0;
  double min_core_ratio = 0.0;
};

/// Measures mass(rect_Q)/ell(Q) against the M-hypothesis; throws
/// HypothesisUnverified when no direction near 1/4 passes the density check.
CubeMassReport cube_mass_bounds(const CubeLattice& lat, const DiscreteMeasure& mu, double M,
                                double density_bin);

/// JSON-lines dump, one cube per line.
std::string lattice_dump(const CubeLattice& lat);

}  // namespace favlab
