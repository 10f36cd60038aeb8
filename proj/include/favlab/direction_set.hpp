#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace favlab {

struct Direction;

/// Error raised when an operation's stated precondition does not hold.
class PreconditionViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Error raised when a construction cannot be resolved at the bitset depth.
class DepthExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Half-open dyadic interval [j*2^-k, (j+1)*2^-k) on the circle [0,1).
struct DyadicInterval {
  int depth = 0;
  std::uint64_t index = 0;

  double lo() const { return static_cast<double>(index) / static_cast<double>(1ull << depth); }
  double hi() const { return static_cast<double>(index + 1) / static_cast<double>(1ull << depth); }
  double length() const { return 1.0 / static_cast<double>(1ull << depth); }
  double mid() const { return (static_cast<double>(index) + 0.5) / static_cast<double>(1ull << depth); }

  DyadicInterval parent() const { return {depth - 1, index >> 1}; }
  DyadicInterval sibling() const { return {depth, index ^ 1ull}; }
  DyadicInterval child(int side) const { return {depth + 1, (index << 1) | static_cast<std::uint64_t>(side)}; }

  bool contains(const DyadicInterval& other) const {
    if (other.depth < depth) return false;
    return (other.index >> (other.depth - depth)) == index;
  }
  bool operator==(const DyadicInterval&) const = default;
};

/// Finite union of depth-D dyadic cells on T = R/Z, stored as a bitset.
/// Measures are exact: measure() = popcount * 2^-D.
class DirectionSet {
 public:
  DirectionSet() : DirectionSet(2) {}
  explicit DirectionSet(int depth);

  int depth() const { return depth_; }
  std::uint64_t cells() const { return 1ull << depth_; }

  bool test(std::uint64_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::uint64_t i) { w_[i >> 6] |= 1ull << (i & 63); }
  void reset(std::uint64_t i) { w_[i >> 6] &= ~(1ull << (i & 63)); }

  std::uint64_t count() const;
  std::uint64_t count_range(std::uint64_t lo, std::uint64_t hi) const;  // cells in [lo, hi)
  std::uint64_t count_interval(const DyadicInterval& iv) const;
  bool empty() const { return count() == 0; }
  double measure() const;

  void set_range(std::uint64_t lo, std::uint64_t hi);
  void reset_range(std::uint64_t lo, std::uint64_t hi);
  void set_interval(const DyadicInterval& iv);

  /// Cells fully contained in the circular arc [lo, hi) (turn coordinates).
  void set_cells_inside(double lo, double hi);
  /// Cells whose interior meets the circular arc (lo, hi).
  void set_cells_touching(double lo, double hi);

  DirectionSet operator|(const DirectionSet& o) const;
  DirectionSet operator&(const DirectionSet& o) const;
  DirectionSet minus(const DirectionSet& o) const;
  DirectionSet complement() const;
  bool contains(const DirectionSet& o) const;  // o subset of *this
  bool operator==(const DirectionSet& o) const { return depth_ == o.depth_ && w_ == o.w_; }

  /// Cyclic rotation by `shift` cells: result[(i+shift) mod 2^D] = this[i].
  DirectionSet rotated(std::int64_t shift) const;
  /// Rotation by a quarter turn (+1/4); requires depth >= 2.
  DirectionSet rotated_quarter() const;
  /// Rotation by a half turn (+1/2); requires depth >= 1.
  DirectionSet rotated_half() const;
  /// Union with the half-turn rotation: the set of *line* directions.
  DirectionSet line_closure() const;

  std::uint64_t cell_of(double turn) const;
  double cell_center(std::uint64_t i) const {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(cells());
  }
  DyadicInterval cell_interval(std::uint64_t i) const { return {depth_, i}; }

  /// Text form "depth=D;hex=..." with 2^D/4 hex chars, leftmost char = cells 0..3.
  std::string serialize() const;
  static DirectionSet deserialize(const std::string& line);

  static DirectionSet from_interval(int depth, const DyadicInterval& iv);

 private:
  int depth_;
  std::vector<std::uint64_t> w_;
};

/// True iff a direction cell of the line through `a` and `b` is set, i.e. the
/// chord direction (in either orientation) lands in the set.
bool line_direction_in(const DirectionSet& g, double dx, double dy);

/// Turn-valued argument of (dx, dy), in [0,1).
double direction_of(double dx, double dy);

/// One application of the enlargement construction on (J, G, eps).
struct EnlargementTrace {
  DyadicInterval interval;                     // J
  DirectionSet input;                          // G
  DirectionSet output;                         // G*
  std::vector<DyadicInterval> dense;           // maximal intervals with density >= 1-eps
  std::vector<DyadicInterval> dense_parents;   // maximal parents of the dense family
  std::vector<DyadicInterval> gaps_before;     // maximal dyadic intervals in J \ G
  std::vector<DyadicInterval> gaps_after;      // maximal dyadic intervals in J \ G*
};

/// Grows G inside J in one step.  Preconditions: G is supported inside J and
/// 0 < |G| < (1-eps)|J|.  Postconditions (verified in exact integer
/// arithmetic, violations throw): G subset G*, |G*| >= (1+eps)|G|, and every
/// maximal gap of G* is a maximal gap of G.
EnlargementTrace enlarge(const DyadicInterval& J, const DirectionSet& g, double eps);

struct EnlargementRun {
  std::vector<EnlargementTrace> traces;
  DirectionSet final;
  int steps = 0;        // number of enlarge applications
  int step_bound = 0;   // ceil(log((1-eps)*4/s) / log(1+eps))
};

/// Applies enlarge until |G_k| >= (1-eps)|J0|.  Requires |G0| >= (s/4)|J0|.
/// Throws if the closed-form step bound is ever exceeded.
EnlargementRun iterate_enlargement(const DyadicInterval& J0, const DirectionSet& g0,
                                   double eps, double s);

/// Maximal dyadic intervals contained in J \ G (disjoint, exact cover).
std::vector<DyadicInterval> maximal_gaps(const DyadicInterval& J, const DirectionSet& g);

}  // namespace favlab
