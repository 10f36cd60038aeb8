#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "favlab/direction_set.hpp"
#include "favlab/utils.hpp"
#include "test_support.hpp"

using namespace favlab;

namespace {

DirectionSet from_cells(int depth, std::initializer_list<std::uint64_t> cells) {
  DirectionSet g(depth);
  for (auto c : cells) g.set(c);
  return g;
}

}  // namespace

TEST_CASE("dyadic interval structure") {
  DyadicInterval iv{3, 5};  // [5/8, 6/8)
  CHECK(iv.parent() == DyadicInterval{2, 2});
  CHECK(iv.sibling() == DyadicInterval{3, 4});
  CHECK(iv.parent().contains(iv));
  CHECK(iv.parent().contains(iv.sibling()));
  CHECK_FALSE(iv.contains(iv.parent()));
  CHECK(iv.child(0) == DyadicInterval{4, 10});
  CHECK(iv.child(1) == DyadicInterval{4, 11});
}

TEST_CASE("bitset measure is exact popcount arithmetic") {
  DirectionSet g(6);
  g.set_interval({2, 1});  // [1/4, 1/2): 16 of 64 cells
  CHECK(g.count() == 16);
  CHECK(g.measure() == 0.25);
  CHECK(g.count_range(0, 16) == 0);
  CHECK(g.count_range(16, 32) == 16);
  DirectionSet c = g.complement();
  CHECK(c.count() == 48);
  CHECK((g & c).count() == 0);
  CHECK((g | c).count() == 64);
}

TEST_CASE("quarter rotation shifts cells and preserves measure") {
  DirectionSet g = from_cells(4, {0, 1, 5});
  DirectionSet q = g.rotated_quarter();
  CHECK(q.count() == 3);
  CHECK(q.test(4));
  CHECK(q.test(5));
  CHECK(q.test(9));
  CHECK(g.rotated(16) == g);  // full turn
  CHECK(g.rotated_half().rotated_half() == g);
}

TEST_CASE("serialization round-trips") {
  SplitMix64 rng(5);
  for (int depth : {2, 5, 9}) {
    DirectionSet g(depth);
    for (std::uint64_t c = 0; c < g.cells(); ++c)
      if (rng.below(3) == 0) g.set(c);
    DirectionSet back = DirectionSet::deserialize(g.serialize());
    CHECK(back == g);
    CHECK(back.serialize() == g.serialize());
  }
}

TEST_CASE("enlarge on half-full interval reaches the whole interval") {
  DirectionSet g(8);
  g.set_interval({1, 0});  // [0, 1/2)
  EnlargementTrace tr = enlarge({0, 0}, g, 0.1);
  CHECK(tr.dense.size() == 1);
  CHECK(tr.dense[0] == DyadicInterval{1, 0});
  REQUIRE(tr.dense_parents.size() == 1);
  CHECK(tr.dense_parents[0] == DyadicInterval{0, 0});
  CHECK(tr.output.count() == tr.output.cells());
  CHECK(tr.output.measure() >= 1.1 * g.measure());
}

TEST_CASE("enlarge merges two quarter blocks into their parents") {
  DirectionSet g(8);
  g.set_interval({2, 0});  // [0, 1/4)
  g.set_interval({2, 2});  // [1/2, 3/4)
  EnlargementTrace tr = enlarge({0, 0}, g, 0.1);
  REQUIRE(tr.dense_parents.size() == 2);
  CHECK(tr.dense_parents[0] == DyadicInterval{1, 0});
  CHECK(tr.dense_parents[1] == DyadicInterval{1, 1});
  CHECK(tr.output.count() == tr.output.cells());
}

TEST_CASE("enlarge rejects a direction set outside the measure window") {
  DirectionSet g(8);
  g.set_range(0, 240);  // measure 0.9375 >= 1 - 0.1
  CHECK_THROWS_AS(enlarge({0, 0}, g, 0.1), PreconditionViolation);
  DirectionSet empty(8);
  CHECK_THROWS_AS(enlarge({0, 0}, empty, 0.1), PreconditionViolation);
}

TEST_CASE("maximal gap families") {
  DirectionSet full(4);
  full.set_interval({0, 0});
  CHECK(maximal_gaps({0, 0}, full).empty());

  DirectionSet half(4);
  half.set_interval({1, 0});
  auto gaps = maximal_gaps({0, 0}, half);
  REQUIRE(gaps.size() == 1);
  CHECK(gaps[0] == DyadicInterval{1, 1});

  DirectionSet quarters(4);
  quarters.set_interval({2, 0});
  quarters.set_interval({2, 2});
  auto gaps2 = maximal_gaps({0, 0}, quarters);
  REQUIRE(gaps2.size() == 2);
  CHECK(gaps2[0] == DyadicInterval{2, 1});
  CHECK(gaps2[1] == DyadicInterval{2, 3});
}

TEST_CASE("iterate stops immediately when the set is already dense") {
  DirectionSet g(8);
  g.set_range(0, 232);  // measure 232/256 > 1 - 0.1
  EnlargementRun run = iterate_enlargement({0, 0}, g, 0.1, 0.5);
  CHECK(run.steps == 0);
  CHECK(run.traces.empty());
}

TEST_CASE("iterate bound matches the closed form") {
  DirectionSet g(8);
  g.set_interval({1, 0});
  EnlargementRun run = iterate_enlargement({0, 0}, g, 0.1, 0.5);
  CHECK(run.steps == 1);
  // s=0.5, eps=0.1: ceil(log(7.2)/log(1.1)) = 21
  CHECK(run.step_bound == 21);
}

TEST_CASE("randomized enlargement matches the exhaustive oracle") {
  SplitMix64 rng(101);
  int executed = 0;
  for (int t = 0; t < 400; ++t) {
    int j_depth = static_cast<int>(rng.below(4));
    int depth = j_depth + 4 + static_cast<int>(rng.below(5));  // depth <= 12
    DyadicInterval J{j_depth, rng.below(1ull << j_depth)};
    DirectionSet g(depth);
    int shift = depth - j_depth;
    std::uint64_t lo = J.index << shift, hi = (J.index + 1) << shift;
    for (std::uint64_t c = lo; c < hi; ++c)
      if (rng.below(3) == 0) g.set(c);
    double eps = rng.uniform(0.05, 0.6);
    std::uint64_t cnt = g.count();
    auto size = static_cast<double>(1ull << shift);
    if (cnt == 0 || static_cast<double>(cnt) >= (1.0 - eps) * size) continue;

    EnlargementTrace tr = enlarge(J, g, eps);
    ++executed;
    // Postconditions are asserted inside enlarge; cross-check the dense
    // family against exhaustive enumeration.
    auto oracle = testing::brute_dense_maximal(g, J, eps);
    std::sort(oracle.begin(), oracle.end(), [](auto a, auto b) {
      return a.lo() != b.lo() ? a.lo() < b.lo() : a.depth < b.depth;
    });
    auto mine = tr.dense;
    std::sort(mine.begin(), mine.end(), [](auto a, auto b) {
      return a.lo() != b.lo() ? a.lo() < b.lo() : a.depth < b.depth;
    });
    REQUIRE(mine.size() == oracle.size());
    for (std::size_t i = 0; i < mine.size(); ++i) CHECK(mine[i] == oracle[i]);
  }
  CHECK(executed > 150);
}

TEST_CASE("enlargement is monotone in the direction set") {
  SplitMix64 rng(202);
  for (int t = 0; t < 200; ++t) {
    int depth = 6 + static_cast<int>(rng.below(5));
    DyadicInterval J{0, 0};
    DirectionSet g(depth);
    for (std::uint64_t c = 0; c < g.cells(); ++c)
      if (rng.below(4) == 0) g.set(c);
    DirectionSet g2 = g;
    for (std::uint64_t c = 0; c < g2.cells(); ++c)
      if (rng.below(8) == 0) g2.set(c);
    double eps = rng.uniform(0.1, 0.5);
    auto cells = static_cast<double>(g.cells());
    if (g.count() == 0 || static_cast<double>(g2.count()) >= (1.0 - eps) * cells) continue;

    EnlargementTrace small = enlarge(J, g, eps);
    EnlargementTrace large = enlarge(J, g2, eps);
    for (const auto& iv : small.dense) {
      bool covered = false;
      for (const auto& big : large.dense)
        if (big.contains(iv)) {
          covered = true;
          break;
        }
      CHECK(covered);
    }
  }
}

TEST_CASE("iteration terminates within the bound on random inputs") {
  SplitMix64 rng(303);
  int executed = 0;
  for (int t = 0; t < 1000; ++t) {
    int depth = 6 + static_cast<int>(rng.below(6));
    DyadicInterval J{0, 0};
    DirectionSet g(depth);
    for (std::uint64_t c = 0; c < g.cells(); ++c)
      if (rng.below(4) == 0) g.set(c);
    if (g.count() == 0) continue;
    double eps = rng.uniform(0.05, 0.4);
    double s = std::min(1.0, 4.0 * g.measure()) * rng.uniform(0.5, 1.0);
    if (s <= 0.0) continue;
    EnlargementRun run = iterate_enlargement(J, g, eps, s);  // throws past the bound
    CHECK(run.steps <= run.step_bound);
    ++executed;
  }
  CHECK(executed > 600);
}
