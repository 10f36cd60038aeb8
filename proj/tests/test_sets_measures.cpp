#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "favlab/generators.hpp"
#include "favlab/measure.hpp"
#include "test_support.hpp"

using namespace favlab;
using favlab::testing::measure_of_points;
using favlab::testing::segment_set;

namespace {

PlanarSet unit_segment() { return segment_set({Segment{{0, 0}, {1, 0}, 1.0}}); }

PlanarSet polygon_circle(int edges, double diameter) {
  PlanarSet set;
  double r = 0.5 * diameter;
  for (int i = 0; i < edges; ++i) {
    double t0 = static_cast<double>(i) / edges;
    double t1 = static_cast<double>(i + 1) / edges;
    Vec2 a{r * cos_turn(t0), r * sin_turn(t0)};
    Vec2 b{r * cos_turn(t1), r * sin_turn(t1)};
    set.primitives.push_back(Segment{a, b, 1.0 / edges});
  }
  return set;
}

PlanarSet rotated_translated(const PlanarSet& set, double rot, Vec2 shift) {
  double c = cos_turn(rot), s = sin_turn(rot);
  auto move = [&](Vec2 p) { return Vec2{c * p.x - s * p.y + shift.x, s * p.x + c * p.y + shift.y}; };
  PlanarSet out;
  for (const auto& prim : set.primitives) {
    const auto& seg = std::get<Segment>(prim);
    out.primitives.push_back(Segment{move(seg.a), move(seg.b), seg.mass});
  }
  return out;
}

}  // namespace

TEST_CASE("projection lengths of simple sets") {
  CHECK(projection_length(unit_segment(), Direction{0.0}) == 1.0);
  CHECK(projection_length(cantor4(1), Direction{0.0}) == 0.5);
  CHECK(projection_length(unit_segment(), Direction::of(0.125)) ==
        doctest::Approx(0.7071067811865476).epsilon(1e-9));
}

TEST_CASE("projection length never exceeds the diameter") {
  SplitMix64 rng(7);
  PlanarSet sets[] = {cantor4(2), unit_segment(), lipschitz_graph(1.0, 32, 3)};
  for (const auto& set : sets) {
    double diam = set.diameter();
    for (int t = 0; t < 200; ++t) {
      Direction th = Direction::of(rng.uniform());
      CHECK(projection_length(set, th) <= diam + 1e-12);
    }
  }
}

TEST_CASE("mean projection length of canonical sets") {
  PlanarSet point = segment_set({Segment{{0.3, 0.4}, {0.3, 0.4}, 1.0}});
  CHECK(favard(point, 64) == 0.0);
  CHECK(favard(unit_segment(), 4096) == doctest::Approx(2.0 / M_PI).epsilon(2e-3));
  CHECK(favard(polygon_circle(4096, 1.0), 256) == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("mean projection length is rigid-motion invariant") {
  PlanarSet base =
      segment_set({Segment{{0, 0}, {0.7, 0.2}, 0.6}, Segment{{0.1, 0.5}, {0.6, 0.9}, 0.4}});
  int n = 512;
  double f0 = favard(base, n);
  double tol = 2.0 / n * base.diameter();
  SplitMix64 rng(17);
  for (int t = 0; t < 10; ++t) {
    PlanarSet moved =
        rotated_translated(base, rng.uniform(), {rng.uniform(-3, 3), rng.uniform(-3, 3)});
    CHECK(std::fabs(favard(moved, n) - f0) <= tol);
  }
}

TEST_CASE("sampling preserves total mass and spacing semantics") {
  DiscreteMeasure mu = sample_measure(unit_segment(), 1e-3);
  CHECK(mu.size() == 1000);
  CHECK(mu.total == 1.0);
  double sum = 0.0;
  for (double w : mu.weights) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  DiscreteMeasure boxes = sample_measure(cantor4(2), 1e-3);
  CHECK(boxes.total == doctest::Approx(cantor4(2).total_mass()).epsilon(1e-15));
}

TEST_CASE("pushforward density of a unit segment") {
  DiscreteMeasure mu = sample_measure(unit_segment(), 1e-5);
  DensityProfile flat = pushforward_density(mu, Direction{0.0}, 1e-2);
  CHECK(flat.sup_norm == doctest::Approx(1.0).epsilon(0.05));
  CHECK_FALSE(flat.degenerate);

  DensityProfile slanted = pushforward_density(mu, Direction::of(0.125), 1e-2);
  CHECK(slanted.sup_norm == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));

  DensityProfile atom = pushforward_density(mu, Direction{0.25}, 1e-2);
  CHECK(atom.degenerate);
}

TEST_CASE("pushforward density conserves mass") {
  DiscreteMeasure mu = sample_measure(cantor4(3), 1e-3);
  for (double theta : {0.0, 0.1, 0.33, 0.71}) {
    DensityProfile prof = pushforward_density(mu, Direction::of(theta), 0.003);
    double mass = 0.0;
    for (double d : prof.bins) mass += d * prof.bin_width;
    CHECK(mass == doctest::Approx(mu.total).epsilon(1e-9));
  }
}

TEST_CASE("regularity constant of a unit segment is about two") {
  DiscreteMeasure mu = sample_measure(unit_segment(), 2e-4);
  CHECK(ad_constant(mu, 32, 16) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("regularity constant of an atom is the infinity sentinel") {
  DiscreteMeasure atom = measure_of_points({{0.5, 0.5}}, 1.0, 1e-3);
  CHECK(std::isinf(ad_constant(atom, 4, 4)));
}

TEST_CASE("regularity constant of a cantor iterate is finite") {
  DiscreteMeasure mu = sample_measure(cantor4(3), 1e-3);
  double c = ad_constant(mu, 16, 8);
  CHECK(std::isfinite(c));
  CHECK(c >= 1.0);
}

TEST_CASE("cone mass counts the expected points") {
  DiscreteMeasure mu = measure_of_points({{0, 0}, {0, 1}}, 1.0, 1e-6);
  Cone vertical{{0, 0}, AngleInterval{Direction{0.25}, 1.0 / 16.0}, 0.0, 2.0};
  CHECK(cone_mass(mu, vertical, 1e-6) == 1.0);
  Cone short_cone{{0, 0}, AngleInterval{Direction{0.25}, 1.0 / 16.0}, 0.0, 0.5};
  CHECK(cone_mass(mu, short_cone, 1e-6) == 0.0);

  DirectionSet empty(8);
  CHECK(cone_mass(mu, {0, 0}, empty, 0.0, 10.0, 1e-6) == 0.0);
}

TEST_CASE("cone mass is monotone in radius and direction set") {
  SplitMix64 rng(23);
  std::vector<Vec2> pts;
  for (int i = 0; i < 300; ++i) pts.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
  DiscreteMeasure mu = measure_of_points(pts, 1.0 / 300, 1e-4);
  for (int t = 0; t < 50; ++t) {
    Vec2 apex = mu.points[rng.below(mu.size())];
    DirectionSet g(8);
    for (std::uint64_t c = 0; c < g.cells(); ++c)
      if (rng.below(4) == 0) g.set(c);
    DirectionSet g2 = g;
    for (std::uint64_t c = 0; c < g2.cells(); ++c)
      if (rng.below(6) == 0) g2.set(c);
    double r1 = rng.uniform(0.1, 1.0);
    double r2 = r1 + rng.uniform(0.0, 1.0);
    CHECK(cone_mass(mu, apex, g, 0.0, r1, mu.spacing) <=
          cone_mass(mu, apex, g, 0.0, r2, mu.spacing));
    CHECK(cone_mass(mu, apex, g, 0.0, r1, mu.spacing) <=
          cone_mass(mu, apex, g2, 0.0, r1, mu.spacing));
  }
}

TEST_CASE("direction spectrum of horizontal and stacked segments") {
  DiscreteMeasure hseg = sample_measure(unit_segment(), 1e-2);
  DirectionSet spec = direction_spectrum(hseg, 8);
  CHECK(spec.count() == 2);
  CHECK(spec.test(spec.cell_of(0.0)));
  CHECK(spec.test(spec.cell_of(0.5)));

  DiscreteMeasure single = measure_of_points({{0.2, 0.2}}, 1.0, 1e-2);
  CHECK(direction_spectrum(single, 8).count() == 0);

  PlanarSet two = segment_set({Segment{{0, 0}, {1, 0}, 0.5}, Segment{{0, 0.5}, {1, 0.5}, 0.5}});
  DiscreteMeasure mu2 = sample_measure(two, 1e-2);
  DirectionSet spec2 = direction_spectrum(mu2, 8);
  DirectionSet oracle(8);
  for (std::size_t i = 0; i < mu2.size(); ++i)
    for (std::size_t j = i + 1; j < mu2.size(); ++j) {
      Vec2 d = mu2.points[j] - mu2.points[i];
      double phi = direction_of(d.x, d.y);
      if (phi >= 0.5) phi -= 0.5;
      oracle.set(oracle.cell_of(phi));
      oracle.set(oracle.cell_of(phi + 0.5));
    }
  CHECK(spec2 == oracle);
  CHECK(spec2.count() > spec.count());
}

TEST_CASE("direction spectrum is antipodally symmetric") {
  DiscreteMeasure mu = sample_measure(lipschitz_graph(1.0, 24, 9), 2e-3);
  DirectionSet spec = direction_spectrum(mu, 9);
  CHECK(spec == spec.rotated_half());
}

TEST_CASE("cone energy budget report") {
  // Vertical segment measured against near-zero direction cells: the perp
  // cones run along the segment and capture every partner.
  PlanarSet vseg = segment_set({Segment{{0, 0}, {0, 1}, 1.0}});
  DiscreteMeasure mu = sample_measure(vseg, 1e-3);
  DirectionSet g(10);
  g.set_cells_touching(-0.01, 0.01);
  ConeEnergyReport rep = check_cone_energy_bound(mu, g, 2.0, 1e-2, 16.0);
  CHECK(rep.lhs > 0.0);
  CHECK(rep.rhs > 0.0);
  CHECK(std::isfinite(rep.ratio));

  // Horizontal segment with the same G: the perp cones are empty.
  DiscreteMeasure hmu = sample_measure(unit_segment(), 1e-3);
  ConeEnergyReport hrep = check_cone_energy_bound(hmu, g, 2.0, 1e-2, 16.0);
  CHECK(hrep.lhs == 0.0);

  DirectionSet empty(10);
  ConeEnergyReport erep = check_cone_energy_bound(hmu, empty, 2.0, 1e-2, 16.0);
  CHECK(erep.lhs == 0.0);
  CHECK(erep.rhs == 0.0);
}

TEST_CASE("under-resolved quadrature is rejected") {
  DiscreteMeasure mu = sample_measure(unit_segment(), 1e-2);
  DirectionSet g(8);
  g.set_range(0, 4);
  CHECK_THROWS_AS(global_cone_energy(mu, g, 1e-2, 1.0, 8.0), QuadratureUnderresolved);
}
