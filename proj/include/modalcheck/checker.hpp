#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "modalcheck/cell_search.hpp"
#include "modalcheck/judgements.hpp"
#include "modalcheck/parser.hpp"
#include "modalcheck/printer.hpp"
#include "modalcheck/syntax.hpp"

namespace modalcheck {

/// A typing derivation. `subject` is the elaborated term: cells are explicit,
/// binders carry their types and injections/aborts their target types.
struct Derivation {
  std::string rule;  // var pair proj lam app inj case mod let unit abort postulate
  Context context;
  Term subject;
  TypeExpr type;
  ModeId mode = kAnyMode;
  std::vector<Derivation> premises;
  std::optional<Cell2> cell;  // var
  std::string postulate;      // postulate
};

class TypeError : public std::runtime_error {
 public:
  enum class Kind {
    UnboundVariable,
    CellMissing,
    TypeMismatch,
    ModeMismatch,
    NotAFunction,
    NotAModal,
    BoundaryMismatch,
    CannotInfer,
    PostulateUnavailable,
    IllFormed,
  };

  TypeError(Kind kind, const std::string& message, Span span) : std::runtime_error(message), kind_(kind), span_(span) {}

  Kind kind() const { return kind_; }
  const Span& span() const { return span_; }

  // CellMissing details
  std::optional<ModalityPath> from, to;
  std::optional<CellQueryResult> search;

 private:
  Kind kind_;
  Span span_;
};

inline const char* kind_name(TypeError::Kind k) {
  switch (k) {
    case TypeError::Kind::UnboundVariable: return "UnboundVariable";
    case TypeError::Kind::CellMissing: return "CellMissing";
    case TypeError::Kind::TypeMismatch: return "TypeMismatch";
    case TypeError::Kind::ModeMismatch: return "ModeMismatch";
    case TypeError::Kind::NotAFunction: return "NotAFunction";
    case TypeError::Kind::NotAModal: return "NotAModal";
    case TypeError::Kind::BoundaryMismatch: return "BoundaryMismatch";
    case TypeError::Kind::CannotInfer: return "CannotInfer";
    case TypeError::Kind::PostulateUnavailable: return "PostulateUnavailable";
    case TypeError::Kind::IllFormed: return "IllFormed";
  }
  return "TypeError";
}

struct CheckOptions {
  SearchBudget budget;
  WfOptions wf;
};

/// Modality annotations agree: hom_equal after pinning polymorphic identities at `m`.
inline bool same_modality(const ModeTheory& mt, const ModalityPath& a, const ModalityPath& b, ModeId m) {
  return mt.hom_equal(resolve_identity(a, m), resolve_identity(b, m));
}

/// Bidirectional checker for the term calculus. Stateless apart from its
/// configuration; safe to share between threads.
class Checker {
 public:
  Checker(const ModeTheory& mt, std::vector<Postulate> postulates = {}, CheckOptions options = {})
      : mt_(mt), options_(options) {
    for (auto& p : postulates) postulates_.emplace(p.name, std::move(p));
  }

  const ModeTheory& theory() const { return mt_; }
  const CheckOptions& options() const { return options_; }
  const std::map<std::string, Postulate>& postulates() const { return postulates_; }

  /// Looks up a postulate as usable at mode m (`lem` only at classical modes).
  std::optional<Postulate> postulate_at(const std::string& name, ModeId m) const {
    if (name == "lem") {
      if (!mt_.is_classical(m)) return std::nullopt;
      return lem_postulate(m);
    }
    auto it = postulates_.find(name);
    if (it == postulates_.end() || it->second.mode != m) return std::nullopt;
    return it->second;
  }

  Derivation check(const Context& g, const Term& t, const TypeExpr& a) const {
    switch (t.kind) {
      case Term::Kind::Pair: {
        if (a.kind() != TypeExpr::Kind::Prod) mismatch(t, a, "a pair");
        Derivation l = check(g, t.children[0], a.lhs());
        Derivation r = check(g, t.children[1], a.rhs());
        Term s = Term::pair(l.subject, r.subject);
        return node("pair", g, std::move(s), a, {std::move(l), std::move(r)}, t.span);
      }
      case Term::Kind::Lam: return lam(g, t, &a);
      case Term::Kind::Inj: {
        if (a.kind() != TypeExpr::Kind::Sum) mismatch(t, a, "an injection");
        if (t.type && !types_equal(mt_, *t.type, a)) mismatch(t, a, print_type(mt_, *t.type));
        Derivation m = check(g, t.children[0], t.index == 1 ? a.lhs() : a.rhs());
        Term s = Term::inj(t.index, m.subject, a);
        return node("inj", g, std::move(s), a, {std::move(m)}, t.span);
      }
      case Term::Kind::Case: return case_of(g, t, &a);
      case Term::Kind::Box: {
        if (a.kind() != TypeExpr::Kind::Modal) mismatch(t, a, "a box");
        ModalityPath mu = modality_at(t.path, g.mode, t.span, "box");
        if (!same_modality(mt_, mu, a.path(), g.mode))
          throw TypeError(TypeError::Kind::TypeMismatch,
                          "box{" + mt_.show(t.path) + "} cannot have type " + print_type(mt_, a), t.span);
        Context inner = locked(g, mu, t.span);
        Derivation m = check(inner, t.children[0], a.body());
        Term s = with_span(Term::box(t.path, m.subject), t.span);
        return node("mod", g, std::move(s), a, {std::move(m)}, t.span);
      }
      case Term::Kind::LetBox: return let_box(g, t, &a);
      case Term::Kind::Unit:
        if (a.kind() != TypeExpr::Kind::Top) mismatch(t, a, "unit");
        return node("unit", g, t, a, {}, t.span);
      case Term::Kind::Abort: {
        if (t.type && !types_equal(mt_, *t.type, a)) mismatch(t, a, print_type(mt_, *t.type));
        wf(a, g.mode, t.span);
        Derivation m = check(g, t.children[0], TypeExpr::bot());
        Term s = with_span(Term::abort(m.subject, a), t.span);
        return node("abort", g, std::move(s), a, {std::move(m)}, t.span);
      }
      default: {
        Derivation d = infer(g, t);
        if (!types_equal(mt_, d.type, a))
          throw TypeError(TypeError::Kind::TypeMismatch,
                          "expected " + print_type(mt_, a) + " but found " + print_type(mt_, d.type), t.span);
        return d;
      }
    }
  }

  Derivation infer(const Context& g, const Term& t) const {
    switch (t.kind) {
      case Term::Kind::Var: return var(g, t);
      case Term::Kind::Pair: {
        Derivation l = infer(g, t.children[0]);
        Derivation r = infer(g, t.children[1]);
        TypeExpr a = TypeExpr::prod(l.type, r.type);
        Term s = Term::pair(l.subject, r.subject);
        return node("pair", g, std::move(s), a, {std::move(l), std::move(r)}, t.span);
      }
      case Term::Kind::Proj: {
        Derivation p = infer(g, t.children[0]);
        if (p.type.kind() != TypeExpr::Kind::Prod)
          throw TypeError(TypeError::Kind::TypeMismatch,
                          "projection from non-product " + print_type(mt_, p.type), t.span);
        TypeExpr a = t.index == 1 ? p.type.lhs() : p.type.rhs();
        Term s = with_span(Term::proj(t.index, p.subject), t.span);
        return node("proj", g, std::move(s), a, {std::move(p)}, t.span);
      }
      case Term::Kind::Lam: return lam(g, t, nullptr);
      case Term::Kind::App: {
        Derivation f = infer(g, t.children[0]);
        if (f.type.kind() != TypeExpr::Kind::ModalImpl)
          throw TypeError(TypeError::Kind::NotAFunction, "applying a term of type " + print_type(mt_, f.type),
                          t.span);
        ModalityPath mu = modality_at(t.path, g.mode, t.span, "application");
        if (!same_modality(mt_, mu, f.type.path(), g.mode))
          throw TypeError(TypeError::Kind::TypeMismatch,
                          "application at " + mt_.show(t.path) + " of a function expecting " +
                              mt_.show(f.type.path()),
                          t.span);
        Derivation arg = check(locked(g, mu, t.span), t.children[1], f.type.lhs());
        TypeExpr b = f.type.rhs();
        Term s = with_span(Term::app(f.subject, t.path, arg.subject), t.span);
        return node("app", g, std::move(s), b, {std::move(f), std::move(arg)}, t.span);
      }
      case Term::Kind::Inj:
        if (!t.type) throw TypeError(TypeError::Kind::CannotInfer, "injection needs a type annotation here", t.span);
        wf(*t.type, g.mode, t.span);
        return check(g, t, *t.type);
      case Term::Kind::Case: return case_of(g, t, nullptr);
      case Term::Kind::Box: {
        ModalityPath mu = modality_at(t.path, g.mode, t.span, "box");
        Derivation m = infer(locked(g, mu, t.span), t.children[0]);
        TypeExpr a = TypeExpr::modal(t.path, m.type);
        Term s = with_span(Term::box(t.path, m.subject), t.span);
        return node("mod", g, std::move(s), a, {std::move(m)}, t.span);
      }
      case Term::Kind::LetBox: return let_box(g, t, nullptr);
      case Term::Kind::Unit: return node("unit", g, t, TypeExpr::top(), {}, t.span);
      case Term::Kind::Abort:
        if (!t.type) throw TypeError(TypeError::Kind::CannotInfer, "abort needs a target type here", t.span);
        return check(g, t, *t.type);
      case Term::Kind::Const: return constant(g, t);
    }
    throw TypeError(TypeError::Kind::CannotInfer, "unsupported term", t.span);
  }

  /// Checks a closed declaration at its mode.
  Derivation check_declaration(const Declaration& d) const {
    Context empty;
    empty.mode = d.mode;
    if (d.type) {
      wf_type(mt_, *d.type, d.mode, options_.wf);
      return check(empty, d.term, *d.type);
    }
    return infer(empty, d.term);
  }

 private:
  static Term with_span(Term t, Span s) {
    t.span = s;
    return t;
  }

  Derivation node(std::string rule, const Context& g, Term subject, TypeExpr type, std::vector<Derivation> premises,
                  Span span) const {
    subject.span = span;
    Derivation d;
    d.rule = std::move(rule);
    d.context = g;
    d.subject = std::move(subject);
    d.type = std::move(type);
    d.mode = g.mode;
    d.premises = std::move(premises);
    return d;
  }

  [[noreturn]] void mismatch(const Term& t, const TypeExpr& expected, const std::string& what) const {
    throw TypeError(TypeError::Kind::TypeMismatch, "expected " + print_type(mt_, expected) + " but found " + what,
                    t.span);
  }

  void wf(const TypeExpr& a, ModeId m, Span span) const {
    try {
      wf_type(mt_, a, m, options_.wf);
    } catch (const WfError& e) {
      throw TypeError(TypeError::Kind::IllFormed, print_type(mt_, a) + " is not a formula at " + mt_.mode_name(m) +
                                                      ": " + e.what(),
                      span);
    }
  }

  // A modality annotation used at judgement mode m must land in m.
  ModalityPath modality_at(const ModalityPath& mu, ModeId m, Span span, const char* where) const {
    ModalityPath r = resolve_identity(mu, m);
    if (r.target != m)
      throw TypeError(TypeError::Kind::ModeMismatch,
                      std::string(where) + " modality " + mt_.show(mu) + " lands in " + mt_.mode_name(r.target) +
                          " but the judgement is at " + mt_.mode_name(m),
                      span);
    return r;
  }

  Context locked(const Context& g, const ModalityPath& mu, Span span) const {
    try {
      return lock_context(mt_, g, mu);
    } catch (const WfError& e) {
      throw TypeError(TypeError::Kind::ModeMismatch, e.what(), span);
    }
  }

  // Picks a binder name not already in the context and renames the body.
  std::pair<std::string, Term> fresh_binder(const Context& g, const std::string& x, const Term& body) const {
    auto names = g.names();
    if (!names.count(x)) return {x, body};
    all_names(body, names);
    std::string y = fresh_name(x, names);
    return {y, rename_free(body, x, y)};
  }

  Derivation var(const Context& g, const Term& t) const {
    auto idx = g.find(t.name);
    if (!idx) throw TypeError(TypeError::Kind::UnboundVariable, "unbound variable '" + t.name + "'", t.span);
    const auto& b = std::get<Binding>(g.entries[*idx]);
    ModeId site = entry_mode(mt_, g, *idx);
    ModalityPath tag = resolve_identity(b.tag, site);
    ModalityPath locks = resolve_identity(locks_of(mt_, g.entries, *idx + 1), g.mode);
    if (!mt_.parallel(tag, locks))
      throw TypeError(TypeError::Kind::ModeMismatch,
                      "variable '" + t.name + "' is tagged " + mt_.show(tag) + ", which cannot unlock " +
                          mt_.show(locks) + " at mode " + mt_.mode_name(g.mode),
                      t.span);

    Cell2 alpha;
    if (!t.cell) {
      CellQueryResult r = cell_exists(mt_, tag, locks, options_.budget);
      if (!r.found()) cell_missing(t, tag, locks, r);
      alpha = *r.witness;
    } else if (t.cell->is_contextual_identity()) {
      alpha = Cell2::identity(tag);
      if (!mt_.hom_equal(tag, locks))
        throw TypeError(TypeError::Kind::BoundaryMismatch,
                        "variable '" + t.name + "' is tagged " + mt_.show(tag) + " but its locks are " +
                            mt_.show(locks) + "; `id` does not fit (write a cell or `?`)",
                        t.span);
    } else {
      alpha = *t.cell;
      CellBoundary bd;
      try {
        bd = cell_boundary(mt_, alpha);
      } catch (const ModeTheoryError& e) {
        throw TypeError(TypeError::Kind::BoundaryMismatch, e.what(), t.span);
      }
      if (!mt_.hom_equal(resolve_identity(bd.from, site), tag) ||
          !mt_.hom_equal(resolve_identity(bd.to, g.mode), locks))
        throw TypeError(TypeError::Kind::BoundaryMismatch,
                        "cell " + print_cell(mt_, alpha) + " : " + mt_.show(bd.from) + " => " + mt_.show(bd.to) +
                            " does not fit variable '" + t.name + "', which needs " + mt_.show(tag) + " => " +
                            mt_.show(locks),
                        t.span);
    }
    Derivation d = node("var", g, with_span(Term::var(t.name, alpha), t.span), b.type, {}, t.span);
    d.cell = alpha;
    return d;
  }

  [[noreturn]] void cell_missing(const Term& t, const ModalityPath& from, const ModalityPath& to,
                                 const CellQueryResult& r) const {
    std::string why = r.status == CellQueryResult::Status::NotFound
                          ? "no cell exists"
                          : "search budget exhausted (depth " + std::to_string(options_.budget.max_steps) +
                                ", word length " + std::to_string(options_.budget.max_word_length) + ")";
    TypeError e(TypeError::Kind::CellMissing,
                "no cell " + mt_.show(from) + " => " + mt_.show(to) + " for variable '" + t.name + "': " + why,
                t.span);
    e.from = from;
    e.to = to;
    e.search = r;
    throw e;
  }

  Derivation lam(const Context& g, const Term& t, const TypeExpr* expected) const {
    ModalityPath tag_written = t.path;
    std::optional<TypeExpr> a = t.type;
    if (expected) {
      if (expected->kind() != TypeExpr::Kind::ModalImpl) mismatch(t, *expected, "a function");
      if (!a) {
        tag_written = expected->path();
        a = expected->lhs();
      } else if (!same_modality(mt_, tag_written, expected->path(), g.mode) ||
                 !types_equal(mt_, *a, expected->lhs())) {
        throw TypeError(TypeError::Kind::TypeMismatch,
                        "function binds " + mt_.show(tag_written) + " " + print_type(mt_, *a) + " but " +
                            print_type(mt_, *expected) + " was expected",
                        t.span);
      }
    } else if (!a) {
      throw TypeError(TypeError::Kind::CannotInfer, "cannot infer the type of unannotated binder '" + t.name + "'",
                      t.span);
    }
    ModalityPath tag = modality_at(tag_written, g.mode, t.span, "binder");
    wf(*a, tag.source, t.span);
    auto [x, body] = fresh_binder(g, t.name, t.children[0]);
    Context inner = g.extended(Binding{x, tag, *a});
    Derivation b = expected ? check(inner, body, expected->rhs()) : infer(inner, body);
    TypeExpr ty = expected ? *expected : TypeExpr::impl(tag_written, *a, b.type);
    Term s = with_span(Term::lam(x, tag_written, *a, b.subject), t.span);
    return node("lam", g, std::move(s), ty, {std::move(b)}, t.span);
  }

  Derivation case_of(const Context& g, const Term& t, const TypeExpr* expected) const {
    Derivation m = infer(g, t.children[0]);
    if (m.type.kind() != TypeExpr::Kind::Sum)
      throw TypeError(TypeError::Kind::TypeMismatch, "case on non-sum " + print_type(mt_, m.type), t.span);
    ModalityPath one = mt_.identity(g.mode);
    auto [x, p] = fresh_binder(g, t.name, t.children[1]);
    auto [y, q] = fresh_binder(g, t.name2, t.children[2]);
    Context gl = g.extended(Binding{x, one, m.type.lhs()});
    Context gr = g.extended(Binding{y, one, m.type.rhs()});
    Derivation dl = expected ? check(gl, p, *expected) : infer(gl, p);
    Derivation dr = check(gr, q, dl.type);
    TypeExpr c = dl.type;
    Term s = with_span(Term::case_of(m.subject, x, dl.subject, y, dr.subject), t.span);
    return node("case", g, std::move(s), c, {std::move(m), std::move(dl), std::move(dr)}, t.span);
  }

  Derivation let_box(const Context& g, const Term& t, const TypeExpr* expected) const {
    ModalityPath mu = modality_at(t.path, g.mode, t.span, "let");
    Context major_ctx = locked(g, mu, t.span);
    Derivation major = infer(major_ctx, t.children[0]);
    if (major.type.kind() != TypeExpr::Kind::Modal)
      throw TypeError(TypeError::Kind::NotAModal,
                      "let box eliminates a modal type, found " + print_type(mt_, major.type), t.span);
    ModalityPath nu = modality_at(t.path2, major_ctx.mode, t.span, "let");
    if (!same_modality(mt_, nu, major.type.path(), major_ctx.mode))
      throw TypeError(TypeError::Kind::TypeMismatch,
                      "let box{" + mt_.show(t.path) + ";" + mt_.show(t.path2) + "} expects <" + mt_.show(t.path2) +
                          "|...> but the scrutinee has type " + print_type(mt_, major.type),
                      t.span);
    ModalityPath tag = mt_.compose(mu, nu);
    auto [x, body] = fresh_binder(g, t.name, t.children[1]);
    Context inner = g.extended(Binding{x, tag, major.type.body()});
    Derivation n = expected ? check(inner, body, *expected) : infer(inner, body);
    TypeExpr b = n.type;
    Term s = with_span(Term::let_box(t.path, t.path2, x, major.subject, n.subject), t.span);
    return node("let", g, std::move(s), b, {std::move(major), std::move(n)}, t.span);
  }

  Derivation constant(const Context& g, const Term& t) const {
    auto p = postulate_at(t.name, g.mode);
    if (!p) {
      std::string why = t.name == "lem" ? "excluded middle is only available at classical modes"
                        : postulates_.count(t.name) ? "postulate '" + t.name + "' lives at " +
                                                          mt_.mode_name(postulates_.at(t.name).mode)
                                                    : "unknown postulate '" + t.name + "'";
      throw TypeError(TypeError::Kind::PostulateUnavailable, why + " (used at " + mt_.mode_name(g.mode) + ")",
                      t.span);
    }
    // No arguments means the scheme as written.
    if (!t.type_args.empty() && t.type_args.size() != p->parameters.size())
      throw TypeError(TypeError::Kind::IllFormed,
                      "postulate '" + t.name + "' takes " + std::to_string(p->parameters.size()) + " type argument(s)",
                      t.span);
    std::map<int, TypeExpr> args;
    for (std::size_t i = 0; i < t.type_args.size(); ++i) args[p->parameters[i]] = t.type_args[i];
    TypeExpr a = instantiate(p->scheme, args);
    wf(a, g.mode, t.span);
    Derivation d = node("postulate", g, t, a, {}, t.span);
    d.postulate = t.name;
    return d;
  }

  const ModeTheory& mt_;
  std::map<std::string, Postulate> postulates_;
  CheckOptions options_;
};

inline Checker make_checker(const Module& mod, CheckOptions options = {}) {
  return Checker(mod.theory, mod.postulates, options);
}

}  // namespace modalcheck
