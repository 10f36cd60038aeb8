#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "favlab/planar_set.hpp"

namespace favlab {

class OverlapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterate n of the four-corner construction: 4^n boxes of side 4^-n at the
/// corner positions of the iterated function system, each of mass 4^-n.
/// Requires 1 <= n <= 8.
PlanarSet cantor4(int n);

/// k parallel segments with direction theta0; `offsets` are perpendicular
/// offsets from the origin, `lengths` the segment lengths.  Masses are
/// proportional to lengths and normalised to total 1.
PlanarSet parallel_segments(int k, Direction theta0, const std::vector<double>& offsets,
                            const std::vector<double>& lengths);

/// Piecewise-linear graph over [0,1] whose node slopes are drawn
/// deterministically from `seed`, all of magnitude <= lip, reflected to stay
/// inside the unit square.  Requires n_nodes >= 2.
PlanarSet lipschitz_graph(double lip, int n_nodes, std::uint64_t seed);

}  // namespace favlab
