#pragma once

#include <optional>
#include <vector>

#include "favlab/direction_set.hpp"
#include "favlab/geometry.hpp"
#include "favlab/planar_set.hpp"

namespace favlab {

class QuadratureUnderresolved : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weighted point sample of a PlanarSet.  `total` equals the sampled set's
/// total mass by construction (weights come from equal subdivision);
/// `spacing` is the resolution parameter h the sample was built with.
struct DiscreteMeasure {
  std::vector<Vec2> points;
  std::vector<double> weights;
  double total = 0.0;
  double spacing = 0.0;

  std::size_t size() const { return points.size(); }
  double diameter() const;
};

/// Deterministic sampling: a segment of mass m becomes ceil(m/h) midpoint
/// samples of weight m/ceil(m/h); a box of mass m becomes a k-by-k midpoint
/// grid with k = ceil(sqrt(m/h)) and weight m/k^2.
DiscreteMeasure sample_measure(const PlanarSet& set, double h);

/// Histogram density of the projected measure along e_theta.
struct DensityProfile {
  Direction theta;
  double bin_width = 0.0;
  double lo = 0.0;  // left edge of bin 0
  std::vector<double> bins;  // mass per unit length
  double sup_norm = 0.0;
  double l2_norm_sq = 0.0;
  /// Set when one bin holds more than half the mass (atom-like projection).
  bool degenerate = false;
};

DensityProfile pushforward_density(const DiscreteMeasure& mu, Direction theta, double bin_width);

/// Smallest C with C^-1 r <= mass(B(x,r)) <= C r over the tested centers and
/// radii; infinity when no radius range survives the sampling floor.
double ad_constant(const DiscreteMeasure& mu, int n_centers, int n_radii);

/// Total weight of sample points inside the cone, excluding points within
/// `exclude_apex_radius` of the apex.
double cone_mass(const DiscreteMeasure& mu, const Cone& cone, double exclude_apex_radius);

/// Cone over an arbitrary direction bitset (union of lines through apex whose
/// direction cell is set), same annulus conventions as Cone.
double cone_mass(const DiscreteMeasure& mu, Vec2 apex, const DirectionSet& dirs, double r_in,
                 double r_out, double exclude_apex_radius);

/// Bitset marking every depth-`depth` cell hit by the direction of a sample
/// pair, antipodally closed.  Complement under-approximates the avoided set.
DirectionSet direction_spectrum(const DiscreteMeasure& mu, int depth);

struct ConeEnergyReport {
  double lhs = 0.0;   // double integral of cone mass over scales and points
  double rhs = 0.0;   // M * |G| * mu(E)
  double ratio = 0.0; // lhs / rhs (0 when rhs == 0)
  int r_nodes = 0;
};

/// Quadrature check of the global cone-energy budget for directions G^perp.
/// No hard assert: the comparison constant is absolute but unspecified.
ConeEnergyReport check_cone_energy_bound(const DiscreteMeasure& mu, const DirectionSet& g,
                                         double M, double r_min, double nodes_per_decade);

/// The same double integral for a direction bitset used directly (no perp).
double global_cone_energy(const DiscreteMeasure& mu, const DirectionSet& dirs, double r_min,
                          double r_max, double nodes_per_decade);

}  // namespace favlab
