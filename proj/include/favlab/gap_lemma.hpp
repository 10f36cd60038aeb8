#pragma once

#include <climits>
#include <string>
#include <vector>

#include "favlab/energy.hpp"

namespace favlab {

class NotAGraph : public std::runtime_error {
 public:
  NotAGraph(const std::string& what, int i, int j) : std::runtime_error(what), a(i), b(j) {}
  int a;
  int b;
};

/// Gaps in the horizontal projection of the sample near a root rectangle.
struct GapSet {
  int root = -1;
  double lo = 0.0;  // U(R) = [lo, hi]
  double hi = 0.0;
  std::vector<std::pair<double, double>> gaps;  // open, sorted, disjoint

  double total_gap_length() const;
  /// Gaps with length in [r/A, A*r].
  std::vector<std::pair<double, double>> filtered(double r, double A) const;
};

/// Connected components of U(R) minus the h-thickened projections of the
/// sample points inside the dilated root rectangle.
GapSet find_gaps(const CubeLattice& lat, const DiscreteMeasure& mu, int root_cube, double A);

struct TreeConeCheck {
  int root_index = -1;
  int root_cube = -1;
  bool pass = true;
  int witness_x = -1;  // sample indices of a violating pair, when failing
  int witness_y = -1;
};

/// Verifies, per tree, that no truncated near-axis cone anchored in a
/// non-stopping tree cube catches a sample point.
std::vector<TreeConeCheck> check_empty_cones(const Corona& corona, const CubeLattice& lat,
                                             const DiscreteMeasure& mu, const AngleInterval& J,
                                             double A);

struct BadCubeWitness {
  int root_index = -1;
  int root_cube = -1;
  int cube = -1;
  int x = -1;  // sample index inside the cube
  int y = -1;  // partner in the exterior double-truncated cone
  bool in_bce = false;
};

/// Cubes containing a point whose exterior cone at the cube scale is
/// inhabited, with one witness pair each.
std::vector<BadCubeWitness> find_bad_cubes(const Corona& corona, const CubeLattice& lat,
                                           const DiscreteMeasure& mu, const AngleInterval& J);

/// Stack of 2N+1 closed subrectangles of the witness rectangle, leftmost
/// points, and the first subrectangle beating both vertical neighbours.
struct LeftistTrace {
  Vec2 x;
  Vec2 y;
  int n_stack = 0;          // N
  double lo_x = 0.0;        // pi0 span of the stack
  double hi_x = 0.0;
  double center_y = 0.0;    // pi0-perp of the witness partner
  double half_height = 0.0; // half the stack height
  double cell_height = 0.0;
  std::vector<int> leftmost;  // per subrect (index i+N), -1 when empty
  int chosen = INT_MIN;       // leftist index in [-N+1, N-1]

  enum class Status { kFound, kNotFound, kRefused };
  Status status = Status::kNotFound;

  int leftmost_at(int i) const { return leftmost[static_cast<std::size_t>(i + n_stack)]; }
};

/// Expects the witness already reduced to the lower-right frame:
/// pi0(x) < pi0(y) and pi0_perp(x) > pi0_perp(y).  Refuses when the stack
/// cells cannot resolve the sample spacing h.
LeftistTrace leftist_search(const std::vector<Vec2>& pts, Vec2 x, Vec2 y, int N, double h);

struct GapLemmaParams {
  double A = 8.0;
  int N = 8;
  /// Cubes with side < min_side_factor * A * h are skipped (under-resolved).
  double min_side_factor = 64.0;
};

struct GapVerdict {
  enum class Status { kPass, kNotApplicable, kRefused, kNotFound, kFail };
  Status status = Status::kNotApplicable;
  std::string detail;
  int root = -1;
  int cube = -1;
  bool flip_x = false;
  bool flip_y = false;
  int leftist_index = 0;
  double b_length = 0.0;        // measured width of the blocking rectangle
  double b_over_side = 0.0;     // b_length / ell(Q), logged (no assert)
  Vec2 pivot;  // the chosen leftmost point, original frame
  std::pair<double, double> empty_span{0.0, 0.0};  // pi0 span of int(A), original frame
  std::pair<double, double> gap{0.0, 0.0};
  double gap_len = 0.0;
  double endpoint_offset = 0.0;  // distance from the mapped leftmost point to the gap edge
  bool a_interior_empty = false;
  bool gap_found = false;
  bool gap_long_enough = false;   // |K| >= ell(Q)/A
  bool rect_inside_dilate = false;  // pi0(rect_Q) inside A^3 K
};

/// Full verification of one bad cube against the extracted projection gaps.
/// When `recheck` is given, the search runs on `mu` but the emptiness scan of
/// the tall rectangle runs against `recheck` (mutation-testing hook: freeze
/// the trace, corrupt the sample, re-verify).
GapVerdict verify_gap_lemma(const CubeLattice& lat, const DiscreteMeasure& mu,
                            const BadCubeWitness& bad, const GapSet& gaps,
                            const GapLemmaParams& params,
                            const DiscreteMeasure* recheck = nullptr);

struct GraphExtract {
  Direction theta;
  double lip = 0.0;
  double lip_bound = 0.0;      // 4 / s
  double density_sup = 0.0;
  double density_bound = 0.0;  // 4 / s
  bool pass = false;
};

/// For a union of parallel segments avoiding a large direction set: picks a
/// direction deep inside the avoided set, checks the graph property over the
/// perpendicular line, and measures the Lipschitz constant and density.
/// Throws NotAGraph with a violating pair when the graph property fails.
GraphExtract extract_graph_parallel_segments(const PlanarSet& set, const DiscreteMeasure& mu,
                                             const DirectionSet& g_avoid, double s,
                                             double density_bin = 0.01);

}  // namespace favlab
