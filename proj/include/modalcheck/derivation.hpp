#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "modalcheck/checker.hpp"
#include "modalcheck/judgements.hpp"
#include "modalcheck/parser.hpp"
#include "modalcheck/printer.hpp"

namespace modalcheck {

// ------------------------------------------------------------ replay

/// Re-validates every node of a derivation against the shape of its rule,
/// without consulting the checker. Returns an empty string on success, else a
/// description of the first bad node.
class DerivationValidator {
 public:
  DerivationValidator(const ModeTheory& mt, const Checker& ctx) : mt_(mt), env_(ctx) {}

  std::string validate(const Derivation& d) const {
    try {
      walk(d, "");
      return {};
    } catch (const std::exception& e) {
      return e.what();
    }
  }

 private:
  struct Bad : std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  void need(bool ok, const std::string& where, const std::string& what) const {
    if (!ok) throw Bad(where + ": " + what);
  }

  bool same_ctx(const Context& a, const Context& b) const {
    if (a.mode != b.mode || a.entries.size() != b.entries.size()) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
      const auto& x = a.entries[i];
      const auto& y = b.entries[i];
      if (x.index() != y.index()) return false;
      if (const auto* bx = std::get_if<Binding>(&x)) {
        const auto& by = std::get<Binding>(y);
        if (bx->name != by.name || !types_equal(mt_, bx->type, by.type)) return false;
        ModeId m = entry_mode(mt_, a, i);
        if (!same_modality(mt_, bx->tag, by.tag, m)) return false;
      } else if (!mt_.hom_equal(std::get<LockEntry>(x).modality, std::get<LockEntry>(y).modality)) {
        return false;
      }
    }
    return true;
  }

  void walk(const Derivation& d, const std::string& at) const {
    const std::string here = at.empty() ? d.rule : at + "/" + d.rule;
    const Context& g = d.context;
    const auto& p = d.premises;
    const Term& t = d.subject;
    need(d.mode == g.mode, here, "judgement mode differs from the context mode");
    try {
      wf_context(mt_, g, env_.options().wf);
      wf_type(mt_, d.type, d.mode, env_.options().wf);
    } catch (const WfError& e) {
      need(false, here, e.what());
    }
    auto arity = [&](std::size_t n) { need(p.size() == n, here, "expected " + std::to_string(n) + " premises"); };
    auto ty = [&](const TypeExpr& a, const TypeExpr& b, const char* what) {
      need(types_equal(mt_, a, b), here, std::string(what) + ": " + print_type(mt_, a) + " vs " + print_type(mt_, b));
    };
    auto sub = [&](std::size_t i, const Term& expect) {
      need(p[i].subject == expect, here, "premise " + std::to_string(i) + " is not about the right subterm");
    };
    auto ctx = [&](std::size_t i, const Context& expect) {
      need(same_ctx(p[i].context, expect), here, "premise " + std::to_string(i) + " has the wrong context");
    };

    if (d.rule == "var") {
      arity(0);
      need(t.kind == Term::Kind::Var && t.cell && d.cell && *t.cell == *d.cell, here, "subject is not x[alpha]");
      auto idx = g.find(t.name);
      need(idx.has_value(), here, "variable not in context");
      const auto& b = std::get<Binding>(g.entries[*idx]);
      ty(b.type, d.type, "variable type");
      ModalityPath tag = resolve_identity(b.tag, entry_mode(mt_, g, *idx));
      ModalityPath locks = resolve_identity(locks_of(mt_, g.entries, *idx + 1), g.mode);
      CellBoundary bd = cell_boundary(mt_, *d.cell);
      need(mt_.hom_equal(resolve_identity(bd.from, tag.source), tag) &&
               mt_.hom_equal(resolve_identity(bd.to, g.mode), locks),
           here, "cell boundary is not tag => Locks(suffix)");
    } else if (d.rule == "pair") {
      arity(2);
      need(t.kind == Term::Kind::Pair, here, "subject is not a pair");
      ctx(0, g), ctx(1, g), sub(0, t.children[0]), sub(1, t.children[1]);
      ty(d.type, TypeExpr::prod(p[0].type, p[1].type), "pair type");
    } else if (d.rule == "proj") {
      arity(1);
      need(t.kind == Term::Kind::Proj, here, "subject is not a projection");
      ctx(0, g), sub(0, t.children[0]);
      need(p[0].type.kind() == TypeExpr::Kind::Prod, here, "projection from a non-product");
      ty(d.type, t.index == 1 ? p[0].type.lhs() : p[0].type.rhs(), "projection type");
    } else if (d.rule == "lam") {
      arity(1);
      need(t.kind == Term::Kind::Lam && t.type, here, "subject is not an annotated lambda");
      need(d.type.kind() == TypeExpr::Kind::ModalImpl, here, "lambda type is not an implication");
      need(same_modality(mt_, t.path, d.type.path(), g.mode), here, "lambda tag differs from the implication");
      ty(*t.type, d.type.lhs(), "binder type");
      ty(p[0].type, d.type.rhs(), "body type");
      ctx(0, g.extended(Binding{t.name, resolve_identity(t.path, g.mode), *t.type}));
      sub(0, t.children[0]);
    } else if (d.rule == "app") {
      arity(2);
      need(t.kind == Term::Kind::App, here, "subject is not an application");
      ModalityPath mu = resolve_identity(t.path, g.mode);
      ctx(0, g), ctx(1, lock_context(mt_, g, mu));
      sub(0, t.children[0]), sub(1, t.children[1]);
      need(p[0].type.kind() == TypeExpr::Kind::ModalImpl, here, "function premise is not an implication");
      need(same_modality(mt_, mu, p[0].type.path(), g.mode), here, "application modality mismatch");
      ty(p[1].type, p[0].type.lhs(), "argument type");
      ty(d.type, p[0].type.rhs(), "result type");
    } else if (d.rule == "inj") {
      arity(1);
      need(t.kind == Term::Kind::Inj, here, "subject is not an injection");
      ctx(0, g), sub(0, t.children[0]);
      need(d.type.kind() == TypeExpr::Kind::Sum, here, "injection type is not a sum");
      ty(p[0].type, t.index == 1 ? d.type.lhs() : d.type.rhs(), "injected type");
    } else if (d.rule == "case") {
      arity(3);
      need(t.kind == Term::Kind::Case, here, "subject is not a case");
      need(p[0].type.kind() == TypeExpr::Kind::Sum, here, "scrutinee is not a sum");
      ModalityPath one = mt_.identity(g.mode);
      ctx(0, g);
      ctx(1, g.extended(Binding{t.name, one, p[0].type.lhs()}));
      ctx(2, g.extended(Binding{t.name2, one, p[0].type.rhs()}));
      sub(0, t.children[0]), sub(1, t.children[1]), sub(2, t.children[2]);
      ty(p[1].type, d.type, "left arm"), ty(p[2].type, d.type, "right arm");
    } else if (d.rule == "mod") {
      arity(1);
      need(t.kind == Term::Kind::Box, here, "subject is not a box");
      ModalityPath mu = resolve_identity(t.path, g.mode);
      ctx(0, lock_context(mt_, g, mu)), sub(0, t.children[0]);
      ty(d.type, TypeExpr::modal(t.path, p[0].type), "modal type");
    } else if (d.rule == "let") {
      arity(2);
      need(t.kind == Term::Kind::LetBox, here, "subject is not a let box");
      ModalityPath mu = resolve_identity(t.path, g.mode);
      Context major = lock_context(mt_, g, mu);
      ModalityPath nu = resolve_identity(t.path2, major.mode);
      ctx(0, major), sub(0, t.children[0]), sub(1, t.children[1]);
      need(p[0].type.kind() == TypeExpr::Kind::Modal, here, "major premise is not modal");
      need(same_modality(mt_, nu, p[0].type.path(), major.mode), here, "let modality mismatch");
      ctx(1, g.extended(Binding{t.name, mt_.compose(mu, nu), p[0].type.body()}));
      ty(d.type, p[1].type, "body type");
    } else if (d.rule == "unit") {
      arity(0);
      need(t.kind == Term::Kind::Unit && d.type.kind() == TypeExpr::Kind::Top, here, "unit must have type top");
    } else if (d.rule == "abort") {
      arity(1);
      need(t.kind == Term::Kind::Abort, here, "subject is not abort");
      ctx(0, g), sub(0, t.children[0]);
      ty(p[0].type, TypeExpr::bot(), "aborted premise");
    } else if (d.rule == "postulate") {
      arity(0);
      need(t.kind == Term::Kind::Const && t.name == d.postulate, here, "subject is not the postulate");
      auto post = env_.postulate_at(d.postulate, g.mode);
      need(post.has_value(), here, "postulate unavailable at this mode");
      need(t.type_args.empty() || t.type_args.size() == post->parameters.size(), here,
           "wrong number of type arguments");
      std::map<int, TypeExpr> args;
      for (std::size_t i = 0; i < t.type_args.size(); ++i) args[post->parameters[i]] = t.type_args[i];
      ty(d.type, instantiate(post->scheme, args), "instantiated scheme");
    } else {
      need(false, here, "unknown rule '" + d.rule + "'");
    }
    for (std::size_t i = 0; i < p.size(); ++i) walk(p[i], here + "#" + std::to_string(i));
  }

  const ModeTheory& mt_;
  const Checker& env_;
};

// ------------------------------------------------------------ erasure

struct Hypothesis {
  bool lock = false;
  ModalityPath modality;  // tag of a formula, or the lock
  TypeExpr formula;
};

/// A natural-deduction proof tree: terms and variable names are gone; an
/// assumption records which hypothesis (by position) it uses.
struct ProofTree {
  std::string rule;
  std::vector<Hypothesis> hypotheses;
  TypeExpr formula;
  ModeId mode = kAnyMode;
  std::vector<ProofTree> premises;
  std::optional<Cell2> cell;
  std::optional<std::size_t> assumption;
  int side = 0;  // which conjunct/disjunct for and-elim/or-intro
  std::string axiom;
  std::optional<ModalityPath> lock;  // mod-elim: the lock over the major premise
};

inline const char* logic_rule(const std::string& term_rule) {
  static const std::map<std::string, const char*> names{
      {"var", "assumption"}, {"pair", "and-intro"}, {"proj", "and-elim"},  {"lam", "impl-intro"},
      {"app", "impl-elim"},  {"inj", "or-intro"},   {"case", "or-elim"},   {"mod", "mod-intro"},
      {"let", "mod-elim"},   {"unit", "top-intro"}, {"abort", "bot-elim"}, {"postulate", "axiom"}};
  auto it = names.find(term_rule);
  return it == names.end() ? "?" : it->second;
}

inline ProofTree erase(const Derivation& d) {
  ProofTree out;
  out.rule = logic_rule(d.rule);
  for (const auto& e : d.context.entries) {
    if (const auto* b = std::get_if<Binding>(&e))
      out.hypotheses.push_back({false, b->tag, b->type});
    else
      out.hypotheses.push_back({true, std::get<LockEntry>(e).modality, TypeExpr::top()});
  }
  out.formula = d.type;
  out.mode = d.mode;
  out.cell = d.cell;
  out.axiom = d.postulate;
  if (d.rule == "var") out.assumption = d.context.find(d.subject.name);
  if (d.rule == "proj" || d.rule == "inj") out.side = d.subject.index;
  if (d.rule == "let") out.lock = d.subject.path;
  for (const auto& p : d.premises) out.premises.push_back(erase(p));
  return out;
}

/// Checks every node of an erased tree against the logic's rule shapes.
/// Contexts are compared as formula telescopes.
inline std::string validate_proof_tree(const ModeTheory& mt, const ProofTree& t) {
  auto same_hyps = [&](const std::vector<Hypothesis>& a, const std::vector<Hypothesis>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].lock != b[i].lock) return false;
      if (!a[i].modality.is_polymorphic() && !b[i].modality.is_polymorphic() &&
          !mt.hom_equal(a[i].modality, b[i].modality))
        return false;
      if (!a[i].lock && !types_equal(mt, a[i].formula, b[i].formula)) return false;
    }
    return true;
  };
  auto locked = [&](std::vector<Hypothesis> h, const ModalityPath& mu, ModeId m) {
    Context c;
    c.mode = m;
    for (const auto& x : h) {
      if (x.lock)
        c.entries.push_back(LockEntry{x.modality});
      else
        c.entries.push_back(Binding{"_", x.modality, x.formula});
    }
    c = lock_context(mt, c, mu);
    std::vector<Hypothesis> out;
    for (const auto& e : c.entries) {
      if (const auto* b = std::get_if<Binding>(&e))
        out.push_back({false, b->tag, b->type});
      else
        out.push_back({true, std::get<LockEntry>(e).modality, TypeExpr::top()});
    }
    return out;
  };
  auto extended = [](std::vector<Hypothesis> h, ModalityPath tag, TypeExpr a) {
    h.push_back({false, std::move(tag), std::move(a)});
    return h;
  };
  auto fail = [&](const std::string& what) { return t.rule + ": " + what; };
  const auto& p = t.premises;
  auto eq = [&](const TypeExpr& a, const TypeExpr& b) { return types_equal(mt, a, b); };

  if (t.rule == "assumption") {
    if (!p.empty() || !t.assumption || *t.assumption >= t.hypotheses.size()) return fail("bad assumption");
    const auto& h = t.hypotheses[*t.assumption];
    if (h.lock || !eq(h.formula, t.formula)) return fail("assumption does not match the conclusion");
    ModalityPath locks;
    for (std::size_t i = *t.assumption + 1; i < t.hypotheses.size(); ++i)
      if (t.hypotheses[i].lock) locks = mt.compose(locks, t.hypotheses[i].modality);
    locks = resolve_identity(locks, t.mode);
    if (!t.cell) return fail("missing cell");
    CellBoundary bd = cell_boundary(mt, *t.cell);
    ModalityPath tag = resolve_identity(h.modality, locks.target);
    if (!mt.hom_equal(resolve_identity(bd.from, tag.source), tag) ||
        !mt.hom_equal(resolve_identity(bd.to, t.mode), locks))
      return fail("cell is not tag => Locks");
  } else if (t.rule == "top-intro") {
    if (!p.empty() || t.formula.kind() != TypeExpr::Kind::Top) return fail("shape");
  } else if (t.rule == "bot-elim") {
    if (p.size() != 1 || !same_hyps(p[0].hypotheses, t.hypotheses) || p[0].formula.kind() != TypeExpr::Kind::Bot ||
        p[0].mode != t.mode)
      return fail("shape");
  } else if (t.rule == "and-intro") {
    if (p.size() != 2 || !same_hyps(p[0].hypotheses, t.hypotheses) || !same_hyps(p[1].hypotheses, t.hypotheses) ||
        !eq(t.formula, TypeExpr::prod(p[0].formula, p[1].formula)))
      return fail("shape");
  } else if (t.rule == "and-elim") {
    if (p.size() != 1 || !same_hyps(p[0].hypotheses, t.hypotheses) || p[0].formula.kind() != TypeExpr::Kind::Prod ||
        !eq(t.formula, t.side == 1 ? p[0].formula.lhs() : p[0].formula.rhs()))
      return fail("shape");
  } else if (t.rule == "or-intro") {
    if (p.size() != 1 || !same_hyps(p[0].hypotheses, t.hypotheses) || t.formula.kind() != TypeExpr::Kind::Sum ||
        !eq(p[0].formula, t.side == 1 ? t.formula.lhs() : t.formula.rhs()))
      return fail("shape");
  } else if (t.rule == "or-elim") {
    if (p.size() != 3 || !same_hyps(p[0].hypotheses, t.hypotheses) || p[0].formula.kind() != TypeExpr::Kind::Sum)
      return fail("shape");
    ModalityPath one = mt.identity(t.mode);
    if (!same_hyps(p[1].hypotheses, extended(t.hypotheses, one, p[0].formula.lhs())) ||
        !same_hyps(p[2].hypotheses, extended(t.hypotheses, one, p[0].formula.rhs())) ||
        !eq(p[1].formula, t.formula) || !eq(p[2].formula, t.formula))
      return fail("arms");
  } else if (t.rule == "impl-intro") {
    if (p.size() != 1 || t.formula.kind() != TypeExpr::Kind::ModalImpl) return fail("shape");
    ModalityPath mu = resolve_identity(t.formula.path(), t.mode);
    if (!same_hyps(p[0].hypotheses, extended(t.hypotheses, mu, t.formula.lhs())) ||
        !eq(p[0].formula, t.formula.rhs()))
      return fail("discharged hypothesis");
  } else if (t.rule == "impl-elim") {
    if (p.size() != 2 || p[0].formula.kind() != TypeExpr::Kind::ModalImpl) return fail("shape");
    ModalityPath mu = resolve_identity(p[0].formula.path(), t.mode);
    if (!same_hyps(p[0].hypotheses, t.hypotheses) || !same_hyps(p[1].hypotheses, locked(t.hypotheses, mu, t.mode)) ||
        !eq(p[1].formula, p[0].formula.lhs()) || !eq(t.formula, p[0].formula.rhs()) || p[1].mode != mu.source)
      return fail("modus ponens");
  } else if (t.rule == "mod-intro") {
    if (p.size() != 1 || t.formula.kind() != TypeExpr::Kind::Modal) return fail("shape");
    ModalityPath mu = resolve_identity(t.formula.path(), t.mode);
    if (!same_hyps(p[0].hypotheses, locked(t.hypotheses, mu, t.mode)) || !eq(p[0].formula, t.formula.body()) ||
        p[0].mode != mu.source)
      return fail("introduction");
  } else if (t.rule == "mod-elim") {
    if (p.size() != 2 || p[0].formula.kind() != TypeExpr::Kind::Modal) return fail("shape");
    if (!t.lock) return fail("missing lock modality");
    ModalityPath mu = resolve_identity(*t.lock, t.mode);
    if (!same_hyps(p[0].hypotheses, locked(t.hypotheses, mu, t.mode))) return fail("major premise context");
    ModalityPath nu = resolve_identity(p[0].formula.path(), p[0].mode);
    ModalityPath tag = mt.compose(mu, nu);
    if (!same_hyps(p[1].hypotheses, extended(t.hypotheses, tag, p[0].formula.body())) ||
        !eq(p[1].formula, t.formula))
      return fail("minor premise");
  } else if (t.rule == "axiom") {
    if (!p.empty() || t.axiom.empty()) return fail("shape");
  } else {
    return fail("unknown rule");
  }
  for (const auto& q : p) {
    std::string e = validate_proof_tree(mt, q);
    if (!e.empty()) return e;
  }
  return {};
}

// ------------------------------------------------------------ JSON

inline constexpr const char* kDerivationSchema = "modalcheck/derivation/v1";

inline nlohmann::json context_to_json(const ModeTheory& mt, const Context& g) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : g.entries) {
    if (const auto* b = std::get_if<Binding>(&e))
      entries.push_back({{"bind", b->name}, {"tag", mt.show(b->tag)}, {"type", print_type(mt, b->type)}});
    else
      entries.push_back({{"lock", mt.show(std::get<LockEntry>(e).modality)}});
  }
  return {{"mode", mt.mode_name(g.mode)}, {"entries", entries}};
}

inline nlohmann::json derivation_to_json(const ModeTheory& mt, const Derivation& d) {
  nlohmann::json j;
  j["rule"] = d.rule;
  j["mode"] = mt.mode_name(d.mode);
  j["context"] = context_to_json(mt, d.context);
  j["subject"] = print_term(mt, d.subject);
  j["type"] = print_type(mt, d.type);
  if (d.cell) j["cell"] = print_cell(mt, *d.cell);
  if (!d.postulate.empty()) j["postulate"] = d.postulate;
  j["premises"] = nlohmann::json::array();
  for (const auto& p : d.premises) j["premises"].push_back(derivation_to_json(mt, p));
  return j;
}

inline Context context_from_json(const ModeTheory& mt, const nlohmann::json& j) {
  Context g;
  auto m = mt.find_mode(j.at("mode").get<std::string>());
  if (!m) throw std::runtime_error("unknown mode in derivation JSON");
  g.mode = *m;
  for (const auto& e : j.at("entries")) {
    if (e.contains("lock"))
      g.entries.push_back(LockEntry{parse_path(mt, e.at("lock").get<std::string>())});
    else
      g.entries.push_back(Binding{e.at("bind").get<std::string>(), parse_path(mt, e.at("tag").get<std::string>()),
                                  parse_type(mt, e.at("type").get<std::string>())});
  }
  return g;
}

inline Derivation derivation_from_json(const ModeTheory& mt, const nlohmann::json& j) {
  Derivation d;
  d.rule = j.at("rule").get<std::string>();
  d.context = context_from_json(mt, j.at("context"));
  auto m = mt.find_mode(j.at("mode").get<std::string>());
  if (!m) throw std::runtime_error("unknown mode in derivation JSON");
  d.mode = *m;
  d.subject = parse_term(mt, j.at("subject").get<std::string>());
  d.type = parse_type(mt, j.at("type").get<std::string>());
  if (j.contains("cell")) d.cell = parse_cell(mt, j.at("cell").get<std::string>());
  if (j.contains("postulate")) d.postulate = j.at("postulate").get<std::string>();
  for (const auto& p : j.at("premises")) d.premises.push_back(derivation_from_json(mt, p));
  return d;
}

/// Strips source spans so that derivations read back from JSON compare equal.
inline void clear_spans(Term& t) {
  t.span = {};
  for (auto& c : t.children) clear_spans(c);
}

}  // namespace modalcheck
