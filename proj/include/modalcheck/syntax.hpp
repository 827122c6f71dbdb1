#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "modalcheck/cell.hpp"
#include "modalcheck/errors.hpp"
#include "modalcheck/mode_theory.hpp"

namespace modalcheck {

// ---------------------------------------------------------------- types

/// Types (formulas) at a mode. Immutable and cheap to copy.
class TypeExpr {
 public:
  enum class Kind { Atom, Top, Bot, Prod, Sum, ModalImpl, Modal };

  TypeExpr() : TypeExpr(Kind::Top) {}

  static TypeExpr atom(int index) {
    TypeExpr t(Kind::Atom);
    t.node_ = std::make_shared<const Node>(Node{Kind::Atom, index, {}, {}});
    return t;
  }
  static TypeExpr top() { return TypeExpr(Kind::Top); }
  static TypeExpr bot() { return TypeExpr(Kind::Bot); }
  static TypeExpr prod(TypeExpr a, TypeExpr b) { return binary(Kind::Prod, {}, std::move(a), std::move(b)); }
  static TypeExpr sum(TypeExpr a, TypeExpr b) { return binary(Kind::Sum, {}, std::move(a), std::move(b)); }
  static TypeExpr impl(ModalityPath mu, TypeExpr a, TypeExpr b) {
    return binary(Kind::ModalImpl, std::move(mu), std::move(a), std::move(b));
  }
  static TypeExpr modal(ModalityPath mu, TypeExpr a) {
    TypeExpr t(Kind::Modal);
    t.node_ = std::make_shared<const Node>(Node{Kind::Modal, 0, std::move(mu), {std::move(a)}});
    return t;
  }
  /// A -> B, the identity-tagged implication.
  static TypeExpr implies(TypeExpr a, TypeExpr b) { return impl(ModalityPath{}, std::move(a), std::move(b)); }
  static TypeExpr negation(TypeExpr a) { return implies(std::move(a), bot()); }

  Kind kind() const { return node_->kind; }
  int index() const { return node_->index; }
  const ModalityPath& path() const { return node_->path; }
  /// Antecedent / left factor / modal body.
  const TypeExpr& lhs() const { return node_->children.at(0); }
  const TypeExpr& rhs() const { return node_->children.at(1); }
  const TypeExpr& body() const { return lhs(); }

  friend bool operator==(const TypeExpr& a, const TypeExpr& b) {
    if (a.node_ == b.node_) return true;
    return a.kind() == b.kind() && a.node_->index == b.node_->index && a.node_->path == b.node_->path &&
           a.node_->children == b.node_->children;
  }

 private:
  struct Node {
    Kind kind;
    int index;
    ModalityPath path;
    std::vector<TypeExpr> children;
  };

  explicit TypeExpr(Kind k) : node_(std::make_shared<const Node>(Node{k, 0, {}, {}})) {}

  static TypeExpr binary(Kind k, ModalityPath mu, TypeExpr a, TypeExpr b) {
    TypeExpr t(k);
    t.node_ = std::make_shared<const Node>(Node{k, 0, std::move(mu), {std::move(a), std::move(b)}});
    return t;
  }

  std::shared_ptr<const Node> node_;
};

/// Structural equality, comparing modality annotations with hom_equal. A
/// polymorphic `1` matches an identity at any mode.
inline bool types_equal(const ModeTheory& mt, const TypeExpr& a, const TypeExpr& b) {
  if (a.kind() != b.kind()) return false;
  auto paths = [&](const ModalityPath& p, const ModalityPath& q) {
    if (p.is_polymorphic() || q.is_polymorphic()) return p.is_identity() && q.is_identity();
    return mt.hom_equal(p, q);
  };
  switch (a.kind()) {
    case TypeExpr::Kind::Atom: return a.index() == b.index();
    case TypeExpr::Kind::Top:
    case TypeExpr::Kind::Bot: return true;
    case TypeExpr::Kind::Prod:
    case TypeExpr::Kind::Sum: return types_equal(mt, a.lhs(), b.lhs()) && types_equal(mt, a.rhs(), b.rhs());
    case TypeExpr::Kind::ModalImpl:
      return paths(a.path(), b.path()) && types_equal(mt, a.lhs(), b.lhs()) && types_equal(mt, a.rhs(), b.rhs());
    case TypeExpr::Kind::Modal: return paths(a.path(), b.path()) && types_equal(mt, a.body(), b.body());
  }
  return false;
}

/// Replaces atom p_i by args[i] wherever a mapping is given.
inline TypeExpr instantiate(const TypeExpr& t, const std::map<int, TypeExpr>& args) {
  switch (t.kind()) {
    case TypeExpr::Kind::Atom: {
      auto it = args.find(t.index());
      return it == args.end() ? t : it->second;
    }
    case TypeExpr::Kind::Top:
    case TypeExpr::Kind::Bot: return t;
    case TypeExpr::Kind::Prod: return TypeExpr::prod(instantiate(t.lhs(), args), instantiate(t.rhs(), args));
    case TypeExpr::Kind::Sum: return TypeExpr::sum(instantiate(t.lhs(), args), instantiate(t.rhs(), args));
    case TypeExpr::Kind::ModalImpl:
      return TypeExpr::impl(t.path(), instantiate(t.lhs(), args), instantiate(t.rhs(), args));
    case TypeExpr::Kind::Modal: return TypeExpr::modal(t.path(), instantiate(t.body(), args));
  }
  return t;
}

inline void collect_atoms(const TypeExpr& t, std::set<int>& out) {
  switch (t.kind()) {
    case TypeExpr::Kind::Atom: out.insert(t.index()); return;
    case TypeExpr::Kind::Top:
    case TypeExpr::Kind::Bot: return;
    case TypeExpr::Kind::Modal: collect_atoms(t.body(), out); return;
    default:
      collect_atoms(t.lhs(), out);
      collect_atoms(t.rhs(), out);
  }
}

// ---------------------------------------------------------------- terms

/// Proof terms. Field use by kind:
///
///   Var     name, cell (nullopt for `x[?]`)
///   Pair    children {M, N}
///   Proj    index 1|2, children {P}
///   Lam     name, path (tag), type (binder type; absent when unannotated), children {body}
///   App     path, children {M, N}
///   Inj     index 1|2, type (the whole sum, optional), children {M}
///   Case    name, name2, children {M, P, Q}
///   Box     path, children {M}
///   LetBox  name, path (mu), path2 (nu), children {M, N}
///   Unit    -
///   Abort   type (target, optional), children {M}
///   Const   name (postulate), type_args
struct Term {
  enum class Kind { Var, Pair, Proj, Lam, App, Inj, Case, Box, LetBox, Unit, Abort, Const };

  Kind kind = Kind::Unit;
  std::string name;
  std::string name2;
  int index = 0;
  ModalityPath path;
  ModalityPath path2;
  std::optional<TypeExpr> type;
  std::optional<Cell2> cell;
  std::vector<TypeExpr> type_args;
  std::vector<Term> children;
  Span span;

  static Term var(std::string x, std::optional<Cell2> alpha = Cell2::contextual_identity()) {
    Term t;
    t.kind = Kind::Var;
    t.name = std::move(x);
    t.cell = std::move(alpha);
    return t;
  }
  static Term pair(Term a, Term b) { return make(Kind::Pair, {std::move(a), std::move(b)}); }
  static Term proj(int i, Term p) {
    Term t = make(Kind::Proj, {std::move(p)});
    t.index = i;
    return t;
  }
  static Term lam(std::string x, ModalityPath mu, std::optional<TypeExpr> a, Term body) {
    Term t = make(Kind::Lam, {std::move(body)});
    t.name = std::move(x);
    t.path = std::move(mu);
    t.type = std::move(a);
    return t;
  }
  static Term app(Term f, ModalityPath mu, Term arg) {
    Term t = make(Kind::App, {std::move(f), std::move(arg)});
    t.path = std::move(mu);
    return t;
  }
  static Term inj(int i, Term m, std::optional<TypeExpr> sum = std::nullopt) {
    Term t = make(Kind::Inj, {std::move(m)});
    t.index = i;
    t.type = std::move(sum);
    return t;
  }
  static Term case_of(Term m, std::string x, Term p, std::string y, Term q) {
    Term t = make(Kind::Case, {std::move(m), std::move(p), std::move(q)});
    t.name = std::move(x);
    t.name2 = std::move(y);
    return t;
  }
  static Term box(ModalityPath mu, Term m) {
    Term t = make(Kind::Box, {std::move(m)});
    t.path = std::move(mu);
    return t;
  }
  static Term let_box(ModalityPath mu, ModalityPath nu, std::string x, Term m, Term n) {
    Term t = make(Kind::LetBox, {std::move(m), std::move(n)});
    t.name = std::move(x);
    t.path = std::move(mu);
    t.path2 = std::move(nu);
    return t;
  }
  static Term unit() { return Term{}; }
  static Term abort(Term m, std::optional<TypeExpr> target = std::nullopt) {
    Term t = make(Kind::Abort, {std::move(m)});
    t.type = std::move(target);
    return t;
  }
  static Term constant(std::string name, std::vector<TypeExpr> args) {
    Term t;
    t.kind = Kind::Const;
    t.name = std::move(name);
    t.type_args = std::move(args);
    return t;
  }

  /// Syntactic equality; spans are ignored, binder names are not.
  friend bool operator==(const Term& a, const Term& b) {
    return a.kind == b.kind && a.name == b.name && a.name2 == b.name2 && a.index == b.index && a.path == b.path &&
           a.path2 == b.path2 && a.type == b.type && a.cell == b.cell && a.type_args == b.type_args &&
           a.children == b.children;
  }

 private:
  static Term make(Kind k, std::vector<Term> children) {
    Term t;
    t.kind = k;
    t.children = std::move(children);
    return t;
  }
};

/// Names bound by child `i` of `t` (empty when the child is not under a binder).
inline std::vector<std::string> binders_of(const Term& t, std::size_t i) {
  switch (t.kind) {
    case Term::Kind::Lam: return {t.name};
    case Term::Kind::Case:
      if (i == 1) return {t.name};
      if (i == 2) return {t.name2};
      return {};
    case Term::Kind::LetBox:
      if (i == 1) return {t.name};
      return {};
    default: return {};
  }
}

inline void free_vars(const Term& t, std::set<std::string>& out, std::set<std::string> bound = {}) {
  if (t.kind == Term::Kind::Var) {
    if (!bound.count(t.name)) out.insert(t.name);
    return;
  }
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    auto extra = binders_of(t, i);
    if (extra.empty()) {
      free_vars(t.children[i], out, bound);
    } else {
      auto inner = bound;
      inner.insert(extra.begin(), extra.end());
      free_vars(t.children[i], out, inner);
    }
  }
}

inline std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> out;
  free_vars(t, out);
  return out;
}

inline void all_names(const Term& t, std::set<std::string>& out) {
  if (!t.name.empty()) out.insert(t.name);
  if (!t.name2.empty()) out.insert(t.name2);
  for (const Term& c : t.children) all_names(c, out);
}

/// `base` if unused, else base1, base2, ...
inline std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  std::string stem = base;
  while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
  if (stem.empty()) stem = "x";
  for (int i = 1;; ++i) {
    std::string candidate = stem + std::to_string(i);
    if (!avoid.count(candidate)) return candidate;
  }
}

/// Renames free occurrences of `from` to `to`. `to` must not be captured;
/// callers pick it fresh for the whole term.
inline Term rename_free(const Term& t, const std::string& from, const std::string& to) {
  if (t.kind == Term::Kind::Var) {
    if (t.name != from) return t;
    Term r = t;
    r.name = to;
    return r;
  }
  Term r = t;
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    auto b = binders_of(t, i);
    if (std::find(b.begin(), b.end(), from) != b.end()) continue;
    r.children[i] = rename_free(t.children[i], from, to);
  }
  return r;
}

namespace detail {

inline bool alpha_equal(const Term& a, const Term& b, std::vector<std::pair<std::string, std::string>>& env) {
  if (a.kind != b.kind || a.index != b.index || a.path != b.path || a.path2 != b.path2 || a.type != b.type ||
      a.cell != b.cell || a.type_args != b.type_args || a.children.size() != b.children.size())
    return false;
  if (a.kind == Term::Kind::Var) {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      if (it->first == a.name || it->second == b.name) return it->first == a.name && it->second == b.name;
    }
    return a.name == b.name;
  }
  if (a.kind == Term::Kind::Const && a.name != b.name) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    auto ba = binders_of(a, i), bb = binders_of(b, i);
    for (std::size_t k = 0; k < ba.size(); ++k) env.emplace_back(ba[k], bb[k]);
    bool ok = alpha_equal(a.children[i], b.children[i], env);
    env.resize(env.size() - ba.size());
    if (!ok) return false;
  }
  return true;
}

}  // namespace detail

/// Equality up to renaming of bound variables.
inline bool alpha_equal(const Term& a, const Term& b) {
  std::vector<std::pair<std::string, std::string>> env;
  return detail::alpha_equal(a, b, env);
}

inline std::size_t term_size(const Term& t) {
  std::size_t n = 1;
  for (const Term& c : t.children) n += term_size(c);
  return n;
}

// ---------------------------------------------------------------- contexts

struct Binding {
  std::string name;
  ModalityPath tag;
  TypeExpr type;
  friend bool operator==(const Binding&, const Binding&) = default;
};

struct LockEntry {
  ModalityPath modality;
  friend bool operator==(const LockEntry&, const LockEntry&) = default;
};

using ContextEntry = std::variant<Binding, LockEntry>;

/// A telescope of tagged bindings and locks, read left to right. `mode` is the
/// mode the judgement lives at, i.e. after the last lock.
struct Context {
  std::vector<ContextEntry> entries;
  ModeId mode = kAnyMode;

  friend bool operator==(const Context&, const Context&) = default;

  Context extended(ContextEntry e) const {
    Context c = *this;
    c.entries.push_back(std::move(e));
    return c;
  }

  std::optional<std::size_t> find(const std::string& x) const {
    for (std::size_t i = entries.size(); i-- > 0;) {
      if (const auto* b = std::get_if<Binding>(&entries[i]); b && b->name == x) return i;
    }
    return std::nullopt;
  }

  std::set<std::string> names() const {
    std::set<std::string> out;
    for (const auto& e : entries)
      if (const auto* b = std::get_if<Binding>(&e)) out.insert(b->name);
    return out;
  }
};

/// Locks(e) = 1, Locks(G, x) = Locks(G), Locks(G lock mu) = Locks(G) . mu.
/// The result is a polymorphic `1` when there are no locks.
inline ModalityPath locks_of(const ModeTheory& mt, const std::vector<ContextEntry>& entries, std::size_t begin = 0,
                             std::size_t end = static_cast<std::size_t>(-1)) {
  ModalityPath acc;
  end = std::min(end, entries.size());
  for (std::size_t i = begin; i < end; ++i) {
    if (const auto* l = std::get_if<LockEntry>(&entries[i])) {
      try {
        acc = mt.compose(acc, l->modality);
      } catch (const ModeTheoryError& e) {
        throw WfError(WfError::Kind::ModeMismatch, std::string("locks do not chain: ") + e.what());
      }
    }
  }
  return acc;
}

/// Drops identity locks and fuses adjacent ones.
inline Context normalize_context(const ModeTheory& mt, const Context& g) {
  Context out;
  out.mode = g.mode;
  for (const auto& e : g.entries) {
    if (const auto* l = std::get_if<LockEntry>(&e)) {
      ModalityPath mu = l->modality;
      if (!out.entries.empty()) {
        if (auto* prev = std::get_if<LockEntry>(&out.entries.back())) {
          try {
            mu = mt.compose(prev->modality, mu);
          } catch (const ModeTheoryError& err) {
            throw WfError(WfError::Kind::ModeMismatch, std::string("locks do not chain: ") + err.what());
          }
          out.entries.pop_back();
        }
      }
      mu = mt.normalize(mu);
      if (!mu.is_identity()) out.entries.push_back(LockEntry{mu});
    } else {
      out.entries.push_back(e);
    }
  }
  return out;
}

/// normalize_context(G, lock mu) with the judgement mode moved to mu's source.
inline Context lock_context(const ModeTheory& mt, const Context& g, const ModalityPath& mu) {
  Context c = g;
  ModalityPath m = resolve_identity(mu, g.mode);
  c.entries.push_back(LockEntry{m});
  c.mode = m.source;
  return normalize_context(mt, c);
}

}  // namespace modalcheck
