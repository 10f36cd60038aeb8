#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "favlab/generators.hpp"
#include "favlab/lattice.hpp"
#include "test_support.hpp"

using namespace favlab;
using favlab::testing::measure_of_points;
using favlab::testing::segment_set;

namespace {

void check_partition_and_nesting(const CubeLattice& lat, const DiscreteMeasure& mu) {
  for (int lv = 0; lv < lat.depth(); ++lv) {
    std::vector<int> seen(mu.size(), 0);
    for (int id : lat.levels[static_cast<std::size_t>(lv)])
      for (int m : lat.cube(id).members) ++seen[static_cast<std::size_t>(m)];
    CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
  }
  for (const auto& q : lat.cubes) {
    if (q.parent < 0) continue;
    const auto& parent = lat.cube(q.parent);
    for (int m : q.members)
      CHECK(std::binary_search(parent.members.begin(), parent.members.end(), m));
  }
  // children partition the parent
  for (const auto& q : lat.cubes) {
    if (q.children.empty()) continue;
    std::size_t total = 0;
    for (int ch : q.children) total += lat.cube(ch).members.size();
    CHECK(total == q.members.size());
  }
}

}  // namespace

TEST_CASE("single point gives one cube per level") {
  DiscreteMeasure mu = measure_of_points({{0.3, 0.7}}, 1.0, 1e-3);
  CubeLattice lat = build_lattice(mu, 0.25, 0.5, 4);
  CHECK(lat.depth() == 4);
  for (int lv = 0; lv < 4; ++lv) {
    REQUIRE(lat.levels[static_cast<std::size_t>(lv)].size() == 1);
    const auto& q = lat.cube(lat.levels[static_cast<std::size_t>(lv)][0]);
    CHECK(q.center == Vec2{0.3, 0.7});
    CHECK(q.members.size() == 1);
    CHECK(q.mass == 1.0);
  }
}

TEST_CASE("two separated points force two cubes") {
  DiscreteMeasure mu = measure_of_points({{0.0, 0.0}, {1.0, 0.0}}, 0.5, 1e-3);
  CubeLattice lat = build_lattice(mu, 1.0, 0.5, 1);
  // aniso distance exactly 1 >= every net separation: both stay net points
  CHECK(lat.levels[0].size() == 2);
  for (int id : lat.levels[0]) CHECK(lat.cube(id).members.size() == 1);
}

TEST_CASE("unit segment lattice partitions and nests at every level") {
  DiscreteMeasure mu = sample_measure(segment_set({Segment{{0, 0}, {1, 0}, 1.0}}), 1e-3);
  CubeLattice lat = build_lattice(mu, 0.25, 0.5, 6);
  check_partition_and_nesting(lat, mu);
  CHECK(lat.in_constant > 0.0);
  CHECK(std::isfinite(lat.out_constant));
}

TEST_CASE("lattice invariants hold across sets and aspects") {
  PlanarSet sets[] = {cantor4(2), lipschitz_graph(0.8, 40, 5),
                      segment_set({Segment{{0, 0}, {0.5, 0.3}, 1.0}})};
  for (const auto& set : sets) {
    DiscreteMeasure mu = sample_measure(set, 2e-3);
    for (double aspect : {1.0, 0.25, 0.0625}) {
      CubeLattice lat = build_lattice(mu, aspect, 0.5, 4);
      check_partition_and_nesting(lat, mu);
    }
  }
}

TEST_CASE("paper-scale separation constants on a two-level build") {
  DiscreteMeasure mu = sample_measure(segment_set({Segment{{0, 0}, {1, 0}, 1.0}}), 1e-3);
  CubeLattice lat = build_lattice(mu, 0.25, 1.0 / 1000.0, 2);
  CHECK(lat.in_constant >= 0.4);
  CHECK(lat.out_constant <= 2.0);
  check_partition_and_nesting(lat, mu);
}

TEST_CASE("deterministic rebuild yields identical ids and centers") {
  DiscreteMeasure mu = sample_measure(cantor4(3), 1e-3);
  CubeLattice a = build_lattice(mu, 0.25, 0.5, 4);
  CubeLattice b = build_lattice(mu, 0.25, 0.5, 4);
  REQUIRE(a.cubes.size() == b.cubes.size());
  for (std::size_t i = 0; i < a.cubes.size(); ++i) {
    CHECK(a.cubes[i].id == b.cubes[i].id);
    CHECK(a.cubes[i].center == b.cubes[i].center);
    CHECK(a.cubes[i].members == b.cubes[i].members);
  }
}

TEST_CASE("cube rectangles contain their members and separate when shrunk") {
  DiscreteMeasure mu = sample_measure(cantor4(2), 1e-3);
  CubeLattice lat = build_lattice(mu, 0.25, 0.5, 3);
  for (const auto& q : lat.cubes) {
    AnisoRect rect = cube_rect(lat, q);
    CHECK(rect.short_side == doctest::Approx(q.side));
    CHECK(rect.long_side == doctest::Approx(q.side / lat.aspect));
    for (int m : q.members) CHECK(rect.contains(mu.points[static_cast<std::size_t>(m)]));
    AnisoRect small = rect.scaled(0.1);
    CHECK(small.center == rect.center);
  }
  // shrunk rectangles of disjoint same-level cubes are disjoint: check via
  // center separation in the anisotropic metric
  for (int lv = 0; lv < lat.depth(); ++lv) {
    const auto& ids = lat.levels[static_cast<std::size_t>(lv)];
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        const auto& p = lat.cube(ids[i]);
        const auto& q = lat.cube(ids[j]);
        double d = aniso_metric(p.center, q.center, lat.aspect);
        CHECK(d >= 0.1 * (0.5 * p.side + 0.5 * q.side) - 1e-12);
      }
  }
}

TEST_CASE("k(J) is the largest scale whose tall side reaches one") {
  DiscreteMeasure mu = measure_of_points({{0, 0}}, 1.0, 1e-3);
  CubeLattice lat = build_lattice(mu, 0.25, 0.5, 1);
  double tall_at_top = 4.0 * std::pow(lat.rho, lat.top_scale) / lat.aspect;
  double tall_below = 4.0 * std::pow(lat.rho, lat.top_scale + 1) / lat.aspect;
  CHECK(tall_at_top >= 1.0);
  CHECK(tall_below < 1.0);
}

TEST_CASE("mass bounds report against the density hypothesis") {
  DiscreteMeasure mu = sample_measure(segment_set({Segment{{0, 0}, {1, 0}, 1.0}}), 1e-4);
  CubeLattice lat = build_lattice(mu, 0.25, 0.5, 4);
  CubeMassReport rep = cube_mass_bounds(lat, mu, 1.5, 0.01);
  CHECK(rep.density_sup <= 1.5);
  CHECK(rep.max_rect_ratio <= 1.6);  // density of projected arclength, plus binning
  CHECK(rep.min_core_ratio > 0.0);

  DiscreteMeasure atom = measure_of_points({{0.5, 0.5}}, 1.0, 1e-3);
  CubeLattice alat = build_lattice(atom, 0.25, 0.5, 2);
  CHECK_THROWS_AS(cube_mass_bounds(alat, atom, 1.5, 0.01), HypothesisUnverified);
}

TEST_CASE("lattice rejects bad inputs") {
  DiscreteMeasure mu = measure_of_points({{0, 0}}, 1.0, 1e-3);
  CHECK_THROWS_AS(build_lattice(mu, 1.5, 0.5, 2), AspectError);
  CHECK_THROWS_AS(build_lattice(mu, 0.5, 0.4, 2), PreconditionViolation);
  DiscreteMeasure empty;
  CHECK_THROWS_AS(build_lattice(empty, 0.5, 0.25, 2), EmptySample);
}

TEST_CASE("lattice dump is one json object per cube") {
  DiscreteMeasure mu = sample_measure(cantor4(1), 1e-2);
  CubeLattice lat = build_lattice(mu, 0.5, 0.5, 2);
  std::string dump = lattice_dump(lat);
  std::size_t lines = static_cast<std::size_t>(std::count(dump.begin(), dump.end(), '\n'));
  CHECK(lines == lat.cubes.size());
}
