#include <gtest/gtest.h>

#include "modalcheck/modalcheck.hpp"

using namespace modalcheck;

namespace {

struct General : ::testing::Test {
  ModeTheory mt = parse_mode_theory("mode m. mode n. modality mu : n -> m. modality nu : m -> n.");
  ModeId m = *mt.find_mode("m");
  ModeId n = *mt.find_mode("n");
  ModalityPath mu = mt.generator(*mt.find_modality("mu"));
  ModalityPath nu = mt.generator(*mt.find_modality("nu"));

  WfError::Kind wf_kind(const TypeExpr& a, ModeId at, WfOptions opt = {}) {
    try {
      wf_type(mt, a, at, opt);
    } catch (const WfError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "well formed";
    return WfError::Kind::UnknownMode;
  }
};

}  // namespace

TEST_F(General, ModalTypesChangeMode) {
  TypeExpr p = TypeExpr::atom(0);
  EXPECT_TRUE(is_wf_type(mt, TypeExpr::modal(mu, p), m));
  EXPECT_EQ(wf_kind(TypeExpr::modal(mu, p), n), WfError::Kind::ModalityBoundary);
  EXPECT_TRUE(is_wf_type(mt, TypeExpr::modal(mu, TypeExpr::modal(nu, p)), m));
  EXPECT_TRUE(is_wf_type(mt, TypeExpr::modal(ModalityPath{}, p), n));
  EXPECT_EQ(wf_kind(TypeExpr::modal(mt.identity(m), p), n), WfError::Kind::ModalityBoundary);
}

TEST_F(General, ImplicationAntecedentLivesAtTheSource) {
  // <nu|p0> is a formula at n, so it can be the antecedent of ->{mu} at m.
  TypeExpr ok = TypeExpr::impl(mu, TypeExpr::modal(nu, TypeExpr::atom(0)), TypeExpr::atom(1));
  EXPECT_TRUE(is_wf_type(mt, ok, m));
  // <mu|p0> lives at m, not n.
  TypeExpr bad = TypeExpr::impl(mu, TypeExpr::modal(mu, TypeExpr::atom(0)), TypeExpr::atom(1));
  EXPECT_EQ(wf_kind(bad, m), WfError::Kind::AntecedentMode);
}

TEST_F(General, StrictAtoms) {
  mt.declare_atom(0, n);
  WfOptions strict{true};
  EXPECT_TRUE(is_wf_type(mt, TypeExpr::atom(0), m));
  EXPECT_TRUE(is_wf_type(mt, TypeExpr::atom(0), n, strict));
  EXPECT_EQ(wf_kind(TypeExpr::atom(0), m, strict), WfError::Kind::AtomMode);
  EXPECT_EQ(wf_kind(TypeExpr::atom(1), n, strict), WfError::Kind::AtomMode);
  EXPECT_TRUE(is_wf_type(mt, TypeExpr::modal(mu, TypeExpr::atom(0)), m, strict));
}

TEST_F(General, LocksComposeRightToLeft) {
  // Γ = x :1 p0, lock mu, y :nu p1, lock nu   at mode m
  Context g;
  g.mode = m;
  g.entries = {Binding{"x", ModalityPath{}, TypeExpr::atom(0)}, LockEntry{mu},
               Binding{"y", nu, TypeExpr::atom(1)}, LockEntry{nu}};
  // reading right to left: the judgement is at m, nu : m -> n turns it into n,
  // y sits at n with tag nu : m -> n, mu : n -> m brings us back to m.
  EXPECT_EQ(entry_mode(mt, g, 3), m);
  EXPECT_EQ(entry_mode(mt, g, 2), n);
  EXPECT_EQ(entry_mode(mt, g, 1), n);
  EXPECT_EQ(entry_mode(mt, g, 0), m);
  EXPECT_TRUE(is_wf_context(mt, g));
  // Locks(Γ) = mu ∘ nu
  ModalityPath l = locks_of(mt, g.entries);
  EXPECT_EQ(l, mt.chain(mu, nu));
  EXPECT_EQ(l.source, m);
  EXPECT_EQ(l.target, m);
}

TEST_F(General, IllFormedContexts) {
  Context g;
  g.mode = m;
  g.entries = {LockEntry{mu}};  // mu produces a context at n, not m
  try {
    wf_context(mt, g);
    FAIL();
  } catch (const WfError& e) {
    EXPECT_EQ(e.kind(), WfError::Kind::ModeMismatch);
  }
  g.entries = {Binding{"x", mu, TypeExpr::atom(0)}};
  g.mode = n;
  EXPECT_FALSE(is_wf_context(mt, g));
  g.mode = m;
  EXPECT_TRUE(is_wf_context(mt, g));
  g.entries.push_back(Binding{"x", ModalityPath{}, TypeExpr::top()});
  try {
    wf_context(mt, g);
    FAIL();
  } catch (const WfError& e) {
    EXPECT_EQ(e.kind(), WfError::Kind::DuplicateVariable);
  }
  EXPECT_FALSE(is_wf_context(mt, Context{}));
}

TEST_F(General, LockContextFusesAdjacentLocks) {
  Context g;
  g.mode = m;
  Context once = lock_context(mt, g, mu);
  EXPECT_EQ(once.mode, n);
  Context twice = lock_context(mt, once, nu);
  EXPECT_EQ(twice.mode, m);
  ASSERT_EQ(twice.entries.size(), 1u);
  EXPECT_EQ(std::get<LockEntry>(twice.entries[0]).modality, mt.chain(mu, nu));
  // locking by the identity changes nothing
  EXPECT_EQ(lock_context(mt, g, ModalityPath{}).entries.size(), 0u);
}

TEST(Judgements, LocksNormalizeInTheTheory) {
  ModeTheory mt = builtin("s4-idem");
  ModalityPath box = mt.generator(0);
  Context g;
  g.mode = 0;
  Context l = lock_context(mt, lock_context(mt, g, box), box);
  ASSERT_EQ(l.entries.size(), 1u);
  EXPECT_EQ(std::get<LockEntry>(l.entries[0]).modality, box);
}
