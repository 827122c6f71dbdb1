#include <gtest/gtest.h>

#include <functional>

#include "modalcheck/modalcheck.hpp"

using namespace modalcheck;

namespace {

const std::string kCorpus = MODALCHECK_CORPUS_DIR;

struct S4 : ::testing::Test {
  Module mod = load_module(kCorpus + "/s4.mml");
  Checker checker = make_checker(mod);
  DerivationValidator validator{mod.theory, checker};

  Derivation get(const std::string& name) {
    for (const auto& d : mod.declarations)
      if (d.name == name) return checker.check_declaration(d);
    throw std::runtime_error("no declaration " + name);
  }
};

// First node (pre-order) satisfying `p`.
Derivation* find_node(Derivation& d, const std::function<bool(const Derivation&)>& p) {
  if (p(d)) return &d;
  for (auto& q : d.premises)
    if (auto* r = find_node(q, p)) return r;
  return nullptr;
}

ProofTree* find_tree(ProofTree& t, const std::function<bool(const ProofTree&)>& p) {
  if (p(t)) return &t;
  for (auto& q : t.premises)
    if (auto* r = find_tree(q, p)) return r;
  return nullptr;
}

void collect_rules(const ProofTree& t, std::set<std::string>& out) {
  out.insert(t.rule);
  for (const auto& p : t.premises) collect_rules(p, out);
}

}  // namespace

TEST_F(S4, ValidatorAcceptsCheckerOutput) {
  for (const char* n : {"t", "four", "detour", "search"}) EXPECT_EQ(validator.validate(get(n)), "") << n;
}

TEST_F(S4, ValidatorRejectsTampering) {
  {
    Derivation d = get("four");
    d.type = TypeExpr::atom(0);
    EXPECT_NE(validator.validate(d), "");
  }
  {
    Derivation d = get("four");
    Derivation* var = find_node(d, [](const Derivation& n) { return n.rule == "var" && n.cell; });
    ASSERT_TRUE(var);
    // swap the axiom-4 cell for the counit
    var->cell = Cell2::generator(*mod.theory.find_cell("T"));
    var->subject.cell = var->cell;
    EXPECT_NE(validator.validate(d), "");
  }
  {
    Derivation d = get("t");
    Derivation* let = find_node(d, [](const Derivation& n) { return n.rule == "let"; });
    ASSERT_TRUE(let);
    // the continuation must see the new binding
    let->premises[1].context = let->context;
    EXPECT_NE(validator.validate(d), "");
  }
  {
    Derivation d = get("t");
    d.rule = "pair";
    EXPECT_NE(validator.validate(d), "");
  }
  {
    Derivation d = get("detour");
    d.premises.clear();
    EXPECT_NE(validator.validate(d), "");
  }
}

TEST_F(S4, ErasureUsesLogicRuleNames) {
  ProofTree t = erase(get("four"));
  EXPECT_EQ(t.rule, "impl-intro");
  std::set<std::string> rules;
  collect_rules(t, rules);
  EXPECT_EQ(rules, (std::set<std::string>{"impl-intro", "mod-elim", "mod-intro", "assumption"}));
  EXPECT_EQ(validate_proof_tree(mod.theory, t), "");

  ProofTree* leaf = find_tree(t, [](const ProofTree& n) { return n.rule == "assumption"; });
  ASSERT_TRUE(leaf);
  ASSERT_TRUE(leaf->assumption);
  EXPECT_FALSE(leaf->hypotheses[*leaf->assumption].lock);
}

TEST(Erasure, NamesCoverEveryRule) {
  for (const char* r : {"var", "pair", "proj", "lam", "app", "inj", "case", "mod", "let", "unit", "abort", "postulate"})
    EXPECT_STRNE(logic_rule(r), "?") << r;
  EXPECT_STREQ(logic_rule("postulate"), "axiom");
  EXPECT_STREQ(logic_rule("abort"), "bot-elim");
  EXPECT_STREQ(logic_rule("nope"), "?");
}

TEST_F(S4, ProofTreeValidatorRejectsTampering) {
  ProofTree base = erase(get("four"));
  {
    ProofTree t = base;
    ProofTree* leaf = find_tree(t, [](const ProofTree& n) { return n.rule == "assumption"; });
    leaf->formula = TypeExpr::atom(7);
    EXPECT_NE(validate_proof_tree(mod.theory, t), "");
  }
  {
    ProofTree t = base;
    ProofTree* leaf = find_tree(t, [](const ProofTree& n) { return n.rule == "assumption"; });
    leaf->assumption = leaf->hypotheses.size();
    EXPECT_NE(validate_proof_tree(mod.theory, t), "");
  }
  {
    ProofTree t = base;
    ProofTree* elim = find_tree(t, [](const ProofTree& n) { return n.rule == "mod-elim"; });
    ASSERT_TRUE(elim);
    elim->premises[0].hypotheses.pop_back();
    EXPECT_NE(validate_proof_tree(mod.theory, t), "");
  }
  {
    ProofTree t = base;
    t.premises[0].hypotheses.clear();
    EXPECT_NE(validate_proof_tree(mod.theory, t), "");
  }
}

TEST(Erasure, AllCorpusTreesValidate) {
  for (const char* f : {"basics.mml", "k4.mml", "s4idem.mml", "t.mml", "s4.mml", "intcl.mml", "epistemic.mml",
                        "doxastic.mml", "beta.mml"}) {
    Module mod = load_module(kCorpus + "/" + f);
    Checker c = make_checker(mod);
    for (const auto& d : mod.declarations)
      EXPECT_EQ(validate_proof_tree(mod.theory, erase(c.check_declaration(d))), "") << f << " " << d.name;
  }
}

TEST_F(S4, JsonRoundTrip) {
  for (const char* n : {"t", "four", "detour", "search"}) {
    Derivation d = get(n);
    nlohmann::json j = derivation_to_json(mod.theory, d);
    Derivation back = derivation_from_json(mod.theory, j);
    EXPECT_EQ(derivation_to_json(mod.theory, back), j) << n;
    EXPECT_EQ(validator.validate(back), "") << n;
    Term a = d.subject, b = back.subject;
    clear_spans(a);
    clear_spans(b);
    EXPECT_EQ(a, b) << n;
  }
}

TEST(DerivationJson, ContextsRoundTrip) {
  ModeTheory mt = builtin("int-cl");
  Context g;
  g.mode = *mt.find_mode("cl");
  g.entries = {Binding{"x", mt.generator(0), TypeExpr::atom(0)}, Binding{"y", ModalityPath{}, TypeExpr::top()}};
  nlohmann::json j = context_to_json(mt, g);
  Context back = context_from_json(mt, j);
  EXPECT_EQ(context_to_json(mt, back), j);
  EXPECT_EQ(back.entries.size(), 2u);
  j["mode"] = "nowhere";
  EXPECT_THROW(context_from_json(mt, j), std::runtime_error);
}
