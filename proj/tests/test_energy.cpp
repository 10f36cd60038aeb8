#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "favlab/energy.hpp"
#include "favlab/generators.hpp"
#include "test_support.hpp"

using namespace favlab;
using favlab::testing::measure_of_points;
using favlab::testing::segment_set;

namespace {

constexpr double kAspect = 0.125;

AngleInterval j_interval() { return {Direction{0.25}, 0.5 * kAspect}; }

DirectionSet vertical_cells(int depth = 12) {
  DirectionSet g(depth);
  g.set_cells_touching(0.25 - 0.5 * kAspect, 0.25 + 0.5 * kAspect);
  return g;
}

DiscreteMeasure random_cloud(std::uint64_t seed, int n) {
  SplitMix64 rng(seed);
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pts.push_back({rng.uniform(0, 1), rng.uniform(0, 1)});
  return measure_of_points(std::move(pts), 1.0 / n, 1e-4);
}

}  // namespace

TEST_CASE("energies vanish for an empty direction set and empty cones") {
  DiscreteMeasure mu = sample_measure(segment_set({Segment{{0, 0}, {1, 0}, 1.0}}), 1e-3);
  CubeLattice lat = build_lattice(mu, kAspect, 0.5, 2);
  DirectionSet empty(12);
  EnergyTable en = compute_energies(lat, mu, empty, j_interval(), 4.0, {16.0});
  for (double v : en.eg) CHECK(v == 0.0);
  // horizontal segment: no pair is near-vertical, every variant vanishes
  EnergyTable en2 = compute_energies(lat, mu, vertical_cells(), j_interval(), 4.0, {16.0});
  for (std::size_t i = 0; i < en2.eg.size(); ++i) {
    CHECK(en2.eg[i] == 0.0);
    CHECK(en2.ej[i] == 0.0);
    CHECK(en2.ej_tilde[i] == 0.0);
  }
}

TEST_CASE("two aligned atoms produce the closed-form energy") {
  // Points stacked vertically: the partner enters the cone for every node
  // radius >= the separation, so the integral telescopes to a known value.
  DiscreteMeasure mu = measure_of_points({{0.5, 0.2}, {0.5, 0.8}}, 0.5, 1e-6);
  CubeLattice lat = build_lattice(mu, kAspect, 0.5, 1);
  EnergyTable en = compute_energies(lat, mu, vertical_cells(), j_interval(), 4.0, {16.0});
  // brute-force the same quadrature independently
  for (const auto& q : lat.cubes) {
    double oracle =
        testing::brute_energy_bitset(lat, mu, q, vertical_cells(), 4.0, 16.0);
    CHECK(en.eg[static_cast<std::size_t>(q.id)] ==
          doctest::Approx(oracle).epsilon(1e-9));
    CHECK(en.eg[static_cast<std::size_t>(q.id)] > 0.0);
  }
}

TEST_CASE("fast energies match the direct-summation oracle on random clouds") {
  for (int cfg = 0; cfg < 50; ++cfg) {
    SplitMix64 seeder(1000 + static_cast<std::uint64_t>(cfg));
    int n = 40 + static_cast<int>(seeder.below(160));  // <= 200 points
    DiscreteMeasure mu = random_cloud(7000 + static_cast<std::uint64_t>(cfg), n);
    CubeLattice lat = build_lattice(mu, kAspect, 0.5, 2);
    DirectionSet g(10);
    SplitMix64 rng(2000 + static_cast<std::uint64_t>(cfg));
    for (std::uint64_t c = 0; c < g.cells(); ++c)
      if (rng.below(5) == 0) g.set(c);
    EnergyTable en = compute_energies(lat, mu, g, j_interval(), 4.0, {16.0});
    for (const auto& q : lat.cubes) {
      auto qi = static_cast<std::size_t>(q.id);
      double eg_oracle = testing::brute_energy_bitset(lat, mu, q, g, 4.0, 16.0);
      auto var = testing::brute_energy_interval(lat, mu, q, j_interval(), 16.0);
      CHECK(en.eg[qi] == doctest::Approx(eg_oracle).epsilon(1e-9));
      CHECK(en.ej[qi] == doctest::Approx(var.full).epsilon(1e-9));
      CHECK(en.ej_int[qi] == doctest::Approx(var.interior).epsilon(1e-9));
      CHECK(en.ej_ext[qi] == doctest::Approx(var.exterior).epsilon(1e-9));
      CHECK(en.ej_tilde[qi] == doctest::Approx(var.tilde).epsilon(1e-9));
    }
  }
}

TEST_CASE("interval energy splits into interior and exterior parts") {
  DiscreteMeasure mu = random_cloud(31337, 150);
  CubeLattice lat = build_lattice(mu, kAspect, 0.5, 3);
  EnergyTable en = compute_energies(lat, mu, vertical_cells(), j_interval(), 4.0, {16.0});
  for (std::size_t i = 0; i < en.ej.size(); ++i)
    CHECK(std::fabs(en.ej[i] - (en.ej_int[i] + en.ej_ext[i])) <=
          1e-12 * std::max(1.0, std::fabs(en.ej[i])));
}

TEST_CASE("huge threshold leaves only the top layer") {
  DiscreteMeasure mu = random_cloud(11, 120);
  CubeLattice lat = build_lattice(mu, kAspect, 0.5, 3);
  EnergyTable en = compute_energies(lat, mu, vertical_cells(), j_interval(), 4.0, {16.0});
  Corona corona = build_corona(lat, en, kAspect, 1e6);
  CHECK(corona.roots.size() == lat.levels[0].size());
  std::size_t covered = 0;
  for (const auto& r : corona.roots) {
    CHECK(r.bce.empty());
    covered += r.tree.size();
  }
  CHECK(covered == lat.cubes.size());
}

TEST_CASE("zero threshold stops at every cube") {
  DiscreteMeasure mu = random_cloud(12, 120);
  CubeLattice lat = build_lattice(mu, kAspect, 0.5, 3);
  EnergyTable en = compute_energies(lat, mu, vertical_cells(), j_interval(), 4.0, {16.0});
  Corona corona = build_corona(lat, en, kAspect, 0.0);
  CHECK(corona.roots.size() == lat.cubes.size());
  for (const auto& r : corona.roots) {
    CHECK(r.tree.size() == 1);
    REQUIRE(r.bce.size() == 1);
    CHECK(r.bce[0] == r.cube);
  }
}

TEST_CASE("stopping cubes match the chain-walk oracle") {
  // Two vertical clusters create genuinely nonzero energies at some cubes.
  std::vector<Vec2> pts;
  SplitMix64 rng(99);
  for (int i = 0; i < 60; ++i) pts.push_back({0.2 + 1e-3 * rng.uniform(), 0.01 * i});
  for (int i = 0; i < 60; ++i) pts.push_back({0.8 + 1e-3 * rng.uniform(), 0.01 * i});
  DiscreteMeasure mu = measure_of_points(pts, 1.0 / 120, 1e-4);
  CubeLattice lat = build_lattice(mu, kAspect, 0.5, 3);
  EnergyTable en = compute_energies(lat, mu, vertical_cells(), j_interval(), 4.0, {16.0});
  double max_eg = *std::max_element(en.eg.begin(), en.eg.end());
  REQUIRE(max_eg > 0.0);
  double delta = 0.4 * max_eg / kAspect;  // stops part of the lattice only
  Corona corona = build_corona(lat, en, kAspect, delta);

  bool some_stop = false, some_empty = false;
  for (const auto& root : corona.roots) {
    auto oracle = testing::brute_stopping_cubes(lat, en, root.cube, delta * kAspect);
    std::sort(oracle.begin(), oracle.end());
    CHECK(oracle == root.bce);
    some_stop = some_stop || !root.bce.empty();
    some_empty = some_empty || root.bce.empty();
  }
  CHECK(some_stop);

  TreeBoundsReport tb = check_tree_bounds(corona, lat, en);
  CHECK(tb.all_ok);
}

TEST_CASE("tree bounds hold for trivial coronas") {
  DiscreteMeasure mu = random_cloud(13, 100);
  CubeLattice lat = build_lattice(mu, kAspect, 0.5, 3);
  EnergyTable en = compute_energies(lat, mu, vertical_cells(), j_interval(), 4.0, {16.0});
  for (double delta : {0.0, 1e6}) {
    Corona corona = build_corona(lat, en, kAspect, delta);
    TreeBoundsReport tb = check_tree_bounds(corona, lat, en);
    CHECK(tb.all_ok);
  }
}

TEST_CASE("packing equals the total mass when only the top layer exists") {
  DiscreteMeasure mu = random_cloud(14, 100);
  CubeLattice lat = build_lattice(mu, kAspect, 0.5, 3);
  EnergyTable en = compute_energies(lat, mu, vertical_cells(), j_interval(), 4.0, {16.0});
  Corona corona = build_corona(lat, en, kAspect, 1e6);
  PackingReport rep = check_packing(corona, lat, mu, vertical_cells(), 1e6, 16.0);
  CHECK(rep.sum_top == doctest::Approx(mu.total).epsilon(1e-12));

  DirectionSet empty(12);
  Corona corona2 = build_corona(lat, en, kAspect, 0.5);
  PackingReport rep2 = check_packing(corona2, lat, mu, empty, 0.5, 16.0);
  CHECK(rep2.energy_term == 0.0);
  CHECK(rep2.ratio > 0.0);
}

TEST_CASE("gap-direction mass check demands witnesses and stays finite") {
  DiscreteMeasure mu = sample_measure(segment_set({Segment{{0, 0}, {1, 0}, 1.0}}), 1e-3);
  DyadicInterval J{3, 2};  // [1/4, 3/8)
  DirectionSet g(12);
  g.set_interval(J);
  // full set: no gaps, zero ratio
  LittlemeasReport full = check_littlemeas(mu, J, g, {}, 2.0, 16);
  CHECK(full.max_ratio == 0.0);

  DyadicInterval gap{8, (J.index << 5) + 7};
  DirectionSet carved = g.minus(DirectionSet::from_interval(12, gap));
  CHECK_THROWS_AS(check_littlemeas(mu, J, carved, {}, 2.0, 16), WitnessMissing);

  GapWitness w{gap, Direction::of(gap.mid())};
  LittlemeasReport rep = check_littlemeas(mu, J, carved, {w}, 2.0, 16);
  CHECK(std::isfinite(rep.max_ratio));

  GapWitness far_witness{gap, Direction::of(gap.mid() + 0.3)};
  CHECK_THROWS_AS(check_littlemeas(mu, J, carved, {far_witness}, 2.0, 16), WitnessMissing);
}

TEST_CASE("gap filling ratio stays below one when nothing is carved") {
  DiscreteMeasure mu = sample_measure(cantor4(2), 1e-3);
  DirectionSet g = vertical_cells();
  FillingGapsReport rep = check_filling_gaps(mu, j_interval(), g, 0.01, 16);
  CHECK(rep.violations.empty());
  // 0.9J cones against full-J cells at doubled radius: monotone, ratio <= 1
  CHECK(rep.max_ratio <= 1.0 + 1e-12);
}

TEST_CASE("gap filling rejects an oversized direction gap") {
  DiscreteMeasure mu = sample_measure(cantor4(1), 1e-2);
  DirectionSet g = vertical_cells();
  DyadicInterval big_gap{6, 16};  // [16/64, 17/64): 1/64 wide, far above eps|J|
  g = g.minus(DirectionSet::from_interval(12, big_gap));
  CHECK_THROWS_AS(check_filling_gaps(mu, j_interval(), g, 1e-4, 8), PreconditionViolation);
}

TEST_CASE("projection overlap of a single-cube tree is one") {
  DiscreteMeasure mu = measure_of_points({{0.5, 0.5}}, 1.0, 1e-3);
  CubeLattice lat = build_lattice(mu, kAspect, 0.5, 1);
  DirectionSet empty(12);
  EnergyTable en = compute_energies(lat, mu, empty, j_interval(), 4.0, {16.0});
  Corona corona = build_corona(lat, en, kAspect, 1.0);
  OverlapReport rep = check_projection_overlap(corona, lat, {1}, 8);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].max_overlap == 1);
  CHECK(rep.all_ok);
}

TEST_CASE("horizontal segment trees have small projection overlap") {
  DiscreteMeasure mu = sample_measure(segment_set({Segment{{0, 0}, {1, 0}, 1.0}}), 5e-4);
  CubeLattice lat = build_lattice(mu, kAspect, 0.5, 3);
  DirectionSet g = vertical_cells();
  EnergyTable en = compute_energies(lat, mu, g, j_interval(), 4.0, {16.0});
  Corona corona = build_corona(lat, en, kAspect, 0.01);
  std::vector<char> passes(corona.roots.size(), 1);
  OverlapReport rep = check_projection_overlap(corona, lat, passes, 8);
  CHECK(rep.all_ok);
  for (const auto& row : rep.rows) CHECK(row.max_overlap <= 2);

  // trees marked as failing the cone precheck are reported, not asserted
  std::vector<char> none(corona.roots.size(), 0);
  OverlapReport rep2 = check_projection_overlap(corona, lat, none, 0);
  CHECK(rep2.all_ok);
}

TEST_CASE("exterior energy ratio is finite on a cross-pair cloud") {
  std::vector<Vec2> pts;
  SplitMix64 rng(5);
  for (int i = 0; i < 100; ++i) pts.push_back({rng.uniform(0, 1), rng.uniform(0, 1)});
  DiscreteMeasure mu = measure_of_points(pts, 0.01, 1e-4);
  CubeLattice lat = build_lattice(mu, kAspect, 0.5, 3);
  EnergyTable en = compute_energies(lat, mu, vertical_cells(), j_interval(), 4.0, {16.0});
  double ratio = exterior_energy_ratio(lat, en);
  CHECK(ratio >= 0.0);
}
