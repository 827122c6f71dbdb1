#include <gtest/gtest.h>

#include "modalcheck/modalcheck.hpp"

using namespace modalcheck;

namespace {

ModalityPath power(int n) { return ModalityPath{0, 0, Word(static_cast<std::size_t>(n), 0)}; }

// A found witness must have exactly the requested boundary.
void expect_witness(const ModeTheory& mt, const CellQueryResult& r, int n, int m) {
  ASSERT_TRUE(r.found());
  ASSERT_TRUE(r.witness);
  CellBoundary b = cell_boundary(mt, *r.witness);
  EXPECT_TRUE(mt.hom_equal(resolve_identity(b.from, 0), power(n))) << n << "=>" << m;
  EXPECT_TRUE(mt.hom_equal(resolve_identity(b.to, 0), power(m))) << n << "=>" << m;
}

}  // namespace

TEST(CellSearch, FreeTheoryHasOnlyIdentities) {
  ModeTheory mt = builtin("k");
  for (int n = 0; n <= 3; ++n)
    for (int m = 0; m <= 3; ++m) {
      auto r = cell_exists(mt, power(n), power(m));
      if (n == m) {
        expect_witness(mt, r, n, m);
      } else {
        EXPECT_EQ(r.status, CellQueryResult::Status::NotFound) << n << "=>" << m;
      }
    }
}

TEST(CellSearch, TFreeDeletesBoxes) {
  // T : box => 1 can only delete boxes: box^n => box^m iff m <= n.
  ModeTheory mt = builtin("t-free");
  for (int n = 0; n <= 4; ++n)
    for (int m = 0; m <= 4; ++m) {
      auto r = cell_exists(mt, power(n), power(m));
      if (m <= n) expect_witness(mt, r, n, m);
      else EXPECT_FALSE(r.found()) << n << "=>" << m;
    }
}

TEST(CellSearch, FourDuplicatesBoxes) {
  // 4 : box => box^2 only duplicates: box^n => box^m iff n = m = 0 or 1 <= n <= m.
  ModeTheory mt = builtin("k4-free");
  for (int n = 0; n <= 3; ++n)
    for (int m = 0; m <= 5; ++m) {
      auto r = cell_exists(mt, power(n), power(m));
      bool expected = (n == 0 && m == 0) || (n >= 1 && n <= m);
      if (expected) expect_witness(mt, r, n, m);
      else EXPECT_FALSE(r.found()) << n << "=>" << m;
    }
}

TEST(CellSearch, DepthBudgetGivesUnknown) {
  ModeTheory mt = builtin("k4-free");
  auto shallow = cell_exists(mt, power(1), power(3), {1, 8});
  EXPECT_EQ(shallow.status, CellQueryResult::Status::Unknown);
  EXPECT_GT(shallow.frontier, 0u);
  auto deep = cell_exists(mt, power(1), power(3), {2, 8});
  expect_witness(mt, deep, 1, 3);
}

TEST(CellSearch, IdempotentTheoryUsesNormalForms) {
  // box.box = box and eps : box => 1; normal forms are 1 and box.
  ModeTheory mt = builtin("s4-idem");
  for (int n = 0; n <= 4; ++n)
    for (int m = 0; m <= 4; ++m) {
      auto r = cell_exists(mt, power(n), power(m));
      bool expected = n > 0 || m == 0;
      EXPECT_NE(r.status, CellQueryResult::Status::Unknown);
      if (expected) expect_witness(mt, r, n, m);
      else EXPECT_EQ(r.status, CellQueryResult::Status::NotFound) << n << "=>" << m;
    }
}

TEST(CellSearch, WalkingComonadWitnessesAreMonotoneMaps) {
  ModeTheory mt = builtin("s4-comonad");
  for (int n = 0; n <= 4; ++n)
    for (int m = 0; m <= 4; ++m) {
      auto r = cell_exists(mt, power(n), power(m));
      if (!(n > 0 || m == 0)) {
        EXPECT_EQ(r.status, CellQueryResult::Status::NotFound);
        continue;
      }
      expect_witness(mt, r, n, m);
      MonotoneMap f = walking_comonad::evaluate(mt, *r.witness);
      EXPECT_EQ(f.domain, m);
      EXPECT_EQ(f.codomain, n);
      EXPECT_TRUE(f.is_monotone());
    }
}

TEST(CellSearch, MonotoneMapComposition) {
  MonotoneMap f{3, 2, {0, 0, 1}};
  MonotoneMap g{2, 1, {0, 0}};
  EXPECT_EQ(compose_maps(g, f), (MonotoneMap{3, 1, {0, 0, 0}}));
  EXPECT_EQ(compose_maps(f, MonotoneMap::identity(3)), f);
  EXPECT_EQ(to_string(f), "[3]->[2] {0->0, 1->0, 2->1}");
}

TEST(CellSearch, MultiModeQueries) {
  ModeTheory mt = builtin("doxastic", 1);
  ModalityPath k = mt.generator(*mt.find_modality("K1"));
  ModalityPath b = mt.generator(*mt.find_modality("B1"));
  EXPECT_TRUE(cell_exists(mt, k, b).found());   // Aristotle
  EXPECT_FALSE(cell_exists(mt, b, k).found());  // beliefs are not knowledge
  EXPECT_TRUE(cell_exists(mt, b, mt.compose(k, b)).found());
}

TEST(CellSearch, RejectsNonParallelQueries) {
  ModeTheory mt = builtin("int-cl");
  EXPECT_THROW(cell_exists(mt, mt.identity(0), mt.identity(1)), ModeTheoryError);
}
