#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "modalcheck/checker.hpp"
#include "modalcheck/judgements.hpp"
#include "modalcheck/printer.hpp"
#include "modalcheck/syntax.hpp"

namespace modalcheck {

class MetatheoryError : public std::runtime_error {
 public:
  enum class Kind { Undefined, BoundaryMismatch, IllFormedTarget };
  MetatheoryError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline const char* kind_name(MetatheoryError::Kind k) {
  switch (k) {
    case MetatheoryError::Kind::Undefined: return "Undefined";
    case MetatheoryError::Kind::BoundaryMismatch: return "BoundaryMismatch";
    case MetatheoryError::Kind::IllFormedTarget: return "IllFormedTarget";
  }
  return "MetatheoryError";
}

using Entries = std::vector<ContextEntry>;

namespace detail {

inline std::optional<std::size_t> find_binding(const Entries& es, const std::string& x) {
  for (std::size_t i = es.size(); i-- > 0;)
    if (const auto* b = std::get_if<Binding>(&es[i]); b && b->name == x) return i;
  return std::nullopt;
}

inline Entries with(Entries es, ContextEntry e) {
  es.push_back(std::move(e));
  return es;
}

inline Binding dummy(const std::string& x, ModalityPath tag) { return Binding{x, std::move(tag), TypeExpr::top()}; }

inline CellBoundary boundary(const ModeTheory& mt, const Cell2& c) {
  try {
    return cell_boundary(mt, c);
  } catch (const ModeTheoryError& e) {
    throw MetatheoryError(MetatheoryError::Kind::BoundaryMismatch, e.what());
  }
}

struct KeyWalker {
  const ModeTheory& mt;
  const Entries& gamma;
  const Cell2& alpha;
  ModalityPath mu;  // source of alpha

  Term go(const Term& t, const Entries& delta) const {
    Term out = t;
    auto& ch = out.children;
    switch (t.kind) {
      case Term::Kind::Var: {
        if (find_binding(delta, t.name)) return out;
        auto idx = find_binding(gamma, t.name);
        if (!idx) throw MetatheoryError(MetatheoryError::Kind::Undefined, "free variable '" + t.name + "'");
        if (!t.cell) throw MetatheoryError(MetatheoryError::Kind::Undefined, "variable '" + t.name + "' has no cell");
        ModalityPath outer = locks_of(mt, gamma, *idx + 1);
        ModalityPath inner = locks_of(mt, delta);
        Cell2 old = *t.cell;
        if (old.is_contextual_identity()) old = Cell2::identity(mt.compose(mt.compose(outer, mu), inner));
        out.cell = compose_vertical(whisker(outer, alpha, inner), old);
        return out;
      }
      case Term::Kind::Lam: ch[0] = go(t.children[0], with(delta, dummy(t.name, t.path))); return out;
      case Term::Kind::App:
        ch[0] = go(t.children[0], delta);
        ch[1] = go(t.children[1], with(delta, LockEntry{t.path}));
        return out;
      case Term::Kind::Box: ch[0] = go(t.children[0], with(delta, LockEntry{t.path})); return out;
      case Term::Kind::LetBox:
        ch[0] = go(t.children[0], with(delta, LockEntry{t.path}));
        ch[1] = go(t.children[1], with(delta, dummy(t.name, mt.chain(t.path, t.path2))));
        return out;
      case Term::Kind::Case:
        ch[0] = go(t.children[0], delta);
        ch[1] = go(t.children[1], with(delta, dummy(t.name, {})));
        ch[2] = go(t.children[2], with(delta, dummy(t.name2, {})));
        return out;
      default:
        for (auto& c : ch) c = go(c, delta);
        return out;
    }
  }
};

}  // namespace detail

/// Given Γ lock mu, Δ ⊢ M and alpha : mu => nu, produces the term with
/// Γ lock nu, Δ ⊢ M' : A. Only the cells on variables bound in Γ change.
/// M should be elaborated (explicit cells), as produced by the checker.
inline Term lock_weaken(const ModeTheory& mt, const Term& m, const Entries& gamma, const Cell2& alpha,
                        const Entries& delta = {}) {
  if (alpha.is_contextual_identity()) return m;
  CellBoundary bd = detail::boundary(mt, alpha);
  return detail::KeyWalker{mt, gamma, alpha, bd.from}.go(m, delta);
}

namespace detail {

struct SubstWalker {
  const ModeTheory& mt;
  const Entries& gamma;
  const std::string& x;
  const Term& m;
  std::set<std::string> fv;     // free in m
  std::set<std::string> avoid;  // names a fresh binder must not take

  // Renames binder `y` in `body` when it would capture a free variable of m.
  std::pair<std::string, Term> open(const std::string& y, const Term& body) {
    if (!fv.count(y)) return {y, body};
    std::string z = fresh_name(y, avoid);
    avoid.insert(z);
    return {z, rename_free(body, y, z)};
  }

  Term go(const Term& t, const Entries& delta) {
    Term out = t;
    auto& ch = out.children;
    switch (t.kind) {
      case Term::Kind::Var: {
        if (t.name != x) return out;
        if (!t.cell) throw MetatheoryError(MetatheoryError::Kind::Undefined, "variable '" + x + "' has no cell");
        // Sb{x[alpha]} = TmKey{M}[Γ][alpha][ε]: M moves from Γ lock mu to Γ lock Locks(Δ).
        return lock_weaken(mt, m, gamma, *t.cell);
      }
      case Term::Kind::Lam: {
        if (t.name == x) return out;
        auto [y, body] = open(t.name, t.children[0]);
        out.name = y;
        ch[0] = go(body, with(delta, dummy(y, t.path)));
        return out;
      }
      case Term::Kind::App:
        ch[0] = go(t.children[0], delta);
        ch[1] = go(t.children[1], with(delta, LockEntry{t.path}));
        return out;
      case Term::Kind::Box: ch[0] = go(t.children[0], with(delta, LockEntry{t.path})); return out;
      case Term::Kind::LetBox: {
        ch[0] = go(t.children[0], with(delta, LockEntry{t.path}));
        if (t.name == x) return out;
        auto [y, body] = open(t.name, t.children[1]);
        out.name = y;
        ch[1] = go(body, with(delta, dummy(y, mt.chain(t.path, t.path2))));
        return out;
      }
      case Term::Kind::Case: {
        ch[0] = go(t.children[0], delta);
        if (t.name != x) {
          auto [y, p] = open(t.name, t.children[1]);
          out.name = y;
          ch[1] = go(p, with(delta, dummy(y, {})));
        }
        if (t.name2 != x) {
          auto [z, q] = open(t.name2, t.children[2]);
          out.name2 = z;
          ch[2] = go(q, with(delta, dummy(z, {})));
        }
        return out;
      }
      default:
        for (auto& c : ch) c = go(c, delta);
        return out;
    }
  }
};

}  // namespace detail

/// Capture-avoiding substitution: from Γ lock mu ⊢ M : A and
/// Γ, x :mu A, Δ ⊢ N : B gives Γ, Δ ⊢ N[M/x] : B.
inline Term substitute(const ModeTheory& mt, const Term& n, const std::string& x, const Term& m,
                       const Entries& gamma) {
  detail::SubstWalker w{mt, gamma, x, m, free_vars(m), {}};
  w.avoid = w.fv;
  all_names(n, w.avoid);
  all_names(m, w.avoid);
  for (const auto& e : gamma)
    if (const auto* b = std::get_if<Binding>(&e)) w.avoid.insert(b->name);
  w.avoid.insert(x);
  return w.go(n, {});
}

// ------------------------------------------------------------ reduction

struct Step {
  std::vector<std::size_t> path;  // child indices from the root to the redex
  std::string rule;               // beta-fun | beta-box
  Term before;                    // the redex
  Term after;                     // its contractum
  Term result;                    // the whole term after the step
};

namespace detail {

inline std::optional<Term> contract(const ModeTheory& mt, const Term& t, const Entries& scope, std::string& rule) {
  if (t.kind == Term::Kind::App && t.children[0].kind == Term::Kind::Lam) {
    const Term& lam = t.children[0];
    rule = "beta-fun";
    return substitute(mt, lam.children[0], lam.name, t.children[1], scope);
  }
  if (t.kind == Term::Kind::LetBox && t.children[0].kind == Term::Kind::Box) {
    rule = "beta-box";
    return substitute(mt, t.children[1], t.name, t.children[0].children[0], scope);
  }
  return std::nullopt;
}

inline std::optional<Step> find_step(const ModeTheory& mt, const Term& t, const Entries& scope, bool weak,
                                     std::vector<std::size_t>& path) {
  std::string rule;
  if (auto r = contract(mt, t, scope, rule)) return Step{path, rule, t, *r, *r};
  if (weak && (t.kind == Term::Kind::Lam || t.kind == Term::Kind::Box)) return std::nullopt;
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    Entries inner = scope;
    switch (t.kind) {
      case Term::Kind::Lam: inner.push_back(dummy(t.name, t.path)); break;
      case Term::Kind::App:
        if (i == 1) inner.push_back(LockEntry{t.path});
        break;
      case Term::Kind::Box: inner.push_back(LockEntry{t.path}); break;
      case Term::Kind::LetBox:
        if (i == 0) inner.push_back(LockEntry{t.path});
        else inner.push_back(dummy(t.name, mt.chain(t.path, t.path2)));
        break;
      case Term::Kind::Case:
        if (i == 1) inner.push_back(dummy(t.name, {}));
        if (i == 2) inner.push_back(dummy(t.name2, {}));
        break;
      default: break;
    }
    path.push_back(i);
    auto s = find_step(mt, t.children[i], inner, weak, path);
    path.pop_back();
    if (s) {
      Term whole = t;
      whole.children[i] = s->result;
      s->result = std::move(whole);
      return s;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// One leftmost-outermost beta step. `scope` is the context the term lives in.
/// With `weak`, no reduction happens under lambdas or boxes.
inline std::optional<Step> beta_step(const ModeTheory& mt, const Term& t, const Context& scope = {},
                                     bool weak = false) {
  std::vector<std::size_t> path;
  return detail::find_step(mt, t, scope.entries, weak, path);
}

struct Normalization {
  Term result;
  std::vector<Step> steps;
  std::size_t fuel_used = 0;
  bool exhausted = false;  // fuel ran out while a redex remained
};

inline Normalization normalize(const ModeTheory& mt, const Term& t, std::size_t fuel, const Context& scope = {},
                               bool weak = false) {
  Normalization n{t, {}, 0, false};
  while (auto s = beta_step(mt, n.result, scope, weak)) {
    if (n.fuel_used == fuel) {
      n.exhausted = true;
      break;
    }
    n.result = s->result;
    n.steps.push_back(std::move(*s));
    ++n.fuel_used;
  }
  return n;
}

inline nlohmann::json trace_to_json(const ModeTheory& mt, const Term& start, const Normalization& n) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : n.steps)
    steps.push_back({{"path", s.path},
                     {"rule", s.rule},
                     {"redex", print_term(mt, s.before)},
                     {"contractum", print_term(mt, s.after)},
                     {"term", print_term(mt, s.result)}});
  return {{"schema", "modalcheck/trace/v1"},
          {"start", print_term(mt, start)},
          {"result", print_term(mt, n.result)},
          {"steps", steps},
          {"fuel_used", n.fuel_used},
          {"exhausted", n.exhausted}};
}

// ------------------------------------------------------------ structural rules

/// Weakening by a single binding inserted at `position`. Only bindings are
/// accepted: adding a lock is not admissible in general.
inline Derivation weaken(const Checker& checker, const Derivation& d, std::size_t position, const Binding& b) {
  if (position > d.context.entries.size())
    throw MetatheoryError(MetatheoryError::Kind::Undefined, "position past the end of the context");
  if (free_vars(d.subject).count(b.name))
    throw MetatheoryError(MetatheoryError::Kind::IllFormedTarget, "'" + b.name + "' is free in the subject");
  Context g = d.context;
  g.entries.insert(g.entries.begin() + static_cast<std::ptrdiff_t>(position), b);
  try {
    wf_context(checker.theory(), g, checker.options().wf);
  } catch (const WfError& e) {
    throw MetatheoryError(MetatheoryError::Kind::IllFormedTarget, e.what());
  }
  return checker.check(g, d.subject, d.type);
}

/// Swaps bindings i and i+1. Types never mention variables, so this is
/// always admissible when both entries are bindings.
inline Derivation exchange(const Checker& checker, const Derivation& d, std::size_t i) {
  const auto& es = d.context.entries;
  if (i + 1 >= es.size()) throw MetatheoryError(MetatheoryError::Kind::Undefined, "no entries to exchange");
  if (!std::holds_alternative<Binding>(es[i]) || !std::holds_alternative<Binding>(es[i + 1]))
    throw MetatheoryError(MetatheoryError::Kind::IllFormedTarget, "only adjacent bindings can be exchanged");
  Context g = d.context;
  std::swap(g.entries[i], g.entries[i + 1]);
  try {
    wf_context(checker.theory(), g, checker.options().wf);
  } catch (const WfError& e) {
    throw MetatheoryError(MetatheoryError::Kind::IllFormedTarget, e.what());
  }
  return checker.check(g, d.subject, d.type);
}

}  // namespace modalcheck
