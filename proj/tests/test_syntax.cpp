#include <gtest/gtest.h>

#include <filesystem>

#include "modalcheck/modalcheck.hpp"

using namespace modalcheck;

namespace {

const std::string kCorpus = MODALCHECK_CORPUS_DIR;

template <class F>
ParseError parse_error(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a parse error";
  return ParseError("", {});
}

}  // namespace

TEST(Syntax, TypePrecedence) {
  ModeTheory mt = builtin("k");
  // -> is right associative and binds loosest; * binds tighter than +.
  TypeExpr t = parse_type(mt, "p0 * p1 + p2 -> p3 -> p4");
  ASSERT_EQ(t.kind(), TypeExpr::Kind::ModalImpl);
  EXPECT_EQ(t.lhs().kind(), TypeExpr::Kind::Sum);
  EXPECT_EQ(t.lhs().lhs().kind(), TypeExpr::Kind::Prod);
  EXPECT_EQ(t.rhs().kind(), TypeExpr::Kind::ModalImpl);
  EXPECT_EQ(parse_type(mt, "~p0"), TypeExpr::negation(TypeExpr::atom(0)));
  EXPECT_EQ(parse_type(mt, "<box.box|p0>"),
            TypeExpr::modal(ModalityPath{0, 0, {0, 0}}, TypeExpr::atom(0)));
}

TEST(Syntax, TypesRoundTripThroughPrinter) {
  ModeTheory mt = builtin("doxastic", 2);
  for (const char* s : {"<K1|p0> -> <B1|p0>", "p0 ->{K1 . B2} p1", "(p0 -> p1) -> p2", "~~<K2|p0 + top>",
                        "<1|bot> * (p0 + p1 * p2)", "<K1|p0 -> p1> -> <K1|p0> -> <K1|p1>"}) {
    TypeExpr t = parse_type(mt, s);
    std::string printed = print_type(mt, t);
    EXPECT_EQ(parse_type(mt, printed), t) << s << " printed as " << printed;
  }
}

TEST(Syntax, UnicodeSpellingsAgreeWithAscii) {
  ModeTheory mt = builtin("s4-comonad");
  EXPECT_EQ(parse_type(mt, "⟨box|p0⟩ → ¬(p1 × ⊤) ∨ ⊥"), parse_type(mt, "<box|p0> -> ~(p1 * top) + bot"));
  EXPECT_EQ(parse_term(mt, "λx. x"), parse_term(mt, "\\x. x"));
  EXPECT_EQ(parse_cell(mt, "(T ∗ id{box}) ∘ 4"), parse_cell(mt, "(T * id{box}) o 4"));
}

TEST(Syntax, CellsParse) {
  ModeTheory mt = builtin("s4-comonad");
  Cell2 c = parse_cell(mt, "(T * id{box}) o 4");
  ASSERT_EQ(c.kind(), Cell2::Kind::Vertical);
  EXPECT_EQ(c.second(), Cell2::generator(*mt.find_cell("4")));
  EXPECT_EQ(c.first().kind(), Cell2::Kind::Horizontal);
  EXPECT_EQ(parse_cell(mt, print_cell(mt, c)), c);
  EXPECT_TRUE(parse_cell(mt, "id").is_contextual_identity());
}

TEST(Syntax, TermsRoundTripThroughPrinter) {
  ModeTheory mt = builtin("s4-comonad");
  for (const char* s : {"\\b. let box{1;box} y = b in y[T]", "\\x : {box} <box|p0>. box{box} x[id{box}]",
                        "case z of {a. inl a | b. inr b}", "(fst p, snd p)", "f @{box} x", "f x y",
                        "abort m", "unit"}) {
    Term t = parse_term(mt, s);
    std::string printed = print_term(mt, t);
    EXPECT_EQ(parse_term(mt, printed), t) << s << " printed as " << printed;
  }
}

TEST(Syntax, BareVariableIsContextualIdentity) {
  ModeTheory mt = builtin("k");
  Term t = parse_term(mt, "x");
  ASSERT_EQ(t.kind, Term::Kind::Var);
  ASSERT_TRUE(t.cell);
  EXPECT_TRUE(t.cell->is_contextual_identity());
  // juxtaposition is application at the identity
  Term a = parse_term(mt, "f x");
  ASSERT_EQ(a.kind, Term::Kind::App);
  EXPECT_TRUE(a.path.is_polymorphic());
}

TEST(Syntax, CorpusModulesRoundTrip) {
  for (const auto& entry : std::filesystem::directory_iterator(kCorpus)) {
    if (entry.path().extension() != ".mml") continue;
    Module mod = load_module(entry.path().string());
    std::string printed = print_module(mod);
    Module again = parse_module(printed, file_loader(kCorpus));
    EXPECT_TRUE(same_module(mod, again)) << entry.path() << "\n" << printed;
  }
}

TEST(Syntax, ErrorSpansPointAtTheOffendingToken) {
  ParseError e = parse_error([] { parse_module("import builtin k\nthm t : p0 -> p0 := \\x. y.\n"); });
  EXPECT_EQ(e.span().line, 2);
  EXPECT_EQ(e.span().column, 25);
  EXPECT_NE(std::string(e.what()).find("unbound variable 'y'"), std::string::npos);

  e = parse_error([] { parse_module("import builtin k\nthm t : <box|p0 -> p0 := \\x. x.\n"); });
  EXPECT_EQ(e.span().line, 2);

  e = parse_error([] { parse_module("import builtin k\nthm t : p0 := #nope.\n"); });
  EXPECT_NE(std::string(e.what()).find("unknown postulate"), std::string::npos);
}

TEST(Syntax, UnclosedDelimiterReportsTheOpener) {
  ModeTheory mt = builtin("k");
  ParseError e = parse_error([&] { parse_term(mt, "(a,\n b"); });
  EXPECT_EQ(e.span().line, 1);
  EXPECT_EQ(e.span().column, 1);
  EXPECT_NE(std::string(e.what()).find("unclosed"), std::string::npos) << e.what();
}

TEST(Syntax, DuplicateNamesAreRejected) {
  EXPECT_THROW(parse_module("import builtin k\nthm a : top := unit.\nthm a : top := unit.\n"), DuplicateName);
  EXPECT_THROW(parse_module("import builtin k\npostulate a : p0 at bullet.\nthm a : top := unit.\n"),
               DuplicateName);
  EXPECT_THROW(parse_module("import builtin int-cl\npostulate lem : p0 at cl.\n"), DuplicateName);
}

TEST(Syntax, ModuleStructure) {
  Module mod = parse_module(
      "import builtin int-cl\npostulate ax : p2 -> p0 at int.\nthm t : p0 at cl := #lem[p0].\n");
  ASSERT_EQ(mod.postulates.size(), 1u);
  EXPECT_EQ(mod.postulates[0].mode, *mod.theory.find_mode("int"));
  ASSERT_EQ(mod.declarations.size(), 1u);
  EXPECT_TRUE(mod.declarations[0].mode_explicit);
  // several modes need an explicit one
  EXPECT_THROW(parse_module("import builtin int-cl\nthm t : top := unit.\n"), ParseError);
  EXPECT_THROW(parse_module("thm t : top := unit.\n"), ParseError);
}

TEST(Syntax, AlphaEquivalence) {
  ModeTheory mt = builtin("k");
  EXPECT_TRUE(alpha_equal(parse_term(mt, "\\x. \\y. x y"), parse_term(mt, "\\a. \\b. a b")));
  EXPECT_FALSE(alpha_equal(parse_term(mt, "\\x. \\y. x y"), parse_term(mt, "\\a. \\b. b a")));
  EXPECT_FALSE(alpha_equal(parse_term(mt, "\\x. z"), parse_term(mt, "\\x. w")));
}

TEST(Syntax, FreshNamesAvoid) {
  EXPECT_EQ(fresh_name("x", {}), "x");
  std::string n = fresh_name("x", {"x", "x1"});
  EXPECT_NE(n, "x");
  EXPECT_NE(n, "x1");
}
