#pragma once

#include <set>
#include <string>
#include <variant>

#include "modalcheck/errors.hpp"
#include "modalcheck/mode_theory.hpp"
#include "modalcheck/printer.hpp"
#include "modalcheck/syntax.hpp"

namespace modalcheck {

struct WfOptions {
  bool strict_atoms = false;  // atoms live only at the mode the theory declares for them
};

inline void check_mode_id(const ModeTheory& mt, ModeId m) {
  if (m < 0 || static_cast<std::size_t>(m) >= mt.mode_count())
    throw WfError(WfError::Kind::UnknownMode, "unknown mode");
}

/// A is a well-formed type at mode m. Throws WfError.
inline void wf_type(const ModeTheory& mt, const TypeExpr& a, ModeId m, const WfOptions& opt = {}) {
  check_mode_id(mt, m);
  auto boundary = [&](const ModalityPath& mu, const char* what) {
    ModalityPath r = resolve_identity(mu, m);
    if (r.target != m)
      throw WfError(WfError::Kind::ModalityBoundary, std::string(what) + " modality " + mt.show(mu) + " lands in " +
                                                         mt.mode_name(r.target) + ", not " + mt.mode_name(m));
    return r;
  };
  switch (a.kind()) {
    case TypeExpr::Kind::Atom:
      if (opt.strict_atoms) {
        auto declared = mt.atom_mode(a.index());
        if (!declared || *declared != m)
          throw WfError(WfError::Kind::AtomMode,
                        "atom p" + std::to_string(a.index()) + " is not a formula at " + mt.mode_name(m) +
                            (declared ? " (it lives at " + mt.mode_name(*declared) + ")" : " (undeclared)"));
      }
      return;
    case TypeExpr::Kind::Top:
    case TypeExpr::Kind::Bot: return;
    case TypeExpr::Kind::Prod:
    case TypeExpr::Kind::Sum:
      wf_type(mt, a.lhs(), m, opt);
      wf_type(mt, a.rhs(), m, opt);
      return;
    case TypeExpr::Kind::ModalImpl: {
      ModalityPath mu = boundary(a.path(), "implication");
      try {
        wf_type(mt, a.lhs(), mu.source, opt);
      } catch (const WfError& e) {
        if (e.kind() != WfError::Kind::ModalityBoundary && e.kind() != WfError::Kind::AtomMode) throw;
        throw WfError(WfError::Kind::AntecedentMode, "antecedent " + print_type(mt, a.lhs()) + " is not a formula at " +
                                                         mt.mode_name(mu.source) + ": " + e.what());
      }
      wf_type(mt, a.rhs(), m, opt);
      return;
    }
    case TypeExpr::Kind::Modal: {
      ModalityPath mu = boundary(a.path(), "modal");
      wf_type(mt, a.body(), mu.source, opt);
      return;
    }
  }
}

inline bool is_wf_type(const ModeTheory& mt, const TypeExpr& a, ModeId m, const WfOptions& opt = {}) {
  try {
    wf_type(mt, a, m, opt);
    return true;
  } catch (const WfError&) {
    return false;
  }
}

/// Mode at which entry `i` of a context lives (the mode before it is applied),
/// computed from the judgement mode backwards through the later locks.
inline ModeId entry_mode(const ModeTheory& mt, const Context& g, std::size_t i) {
  ModalityPath l = locks_of(mt, g.entries, i + 1);
  return l.is_polymorphic() ? g.mode : l.target;
}

/// The context is well formed with judgement mode g.mode. Reads the telescope
/// right to left: a lock mu : n -> m turns a context at m into one at n.
inline void wf_context(const ModeTheory& mt, const Context& g, const WfOptions& opt = {}) {
  if (g.mode == kAnyMode) throw WfError(WfError::Kind::UnknownMode, "context without a mode");
  check_mode_id(mt, g.mode);
  ModeId cur = g.mode;
  std::set<std::string> seen;
  for (std::size_t i = g.entries.size(); i-- > 0;) {
    if (const auto* l = std::get_if<LockEntry>(&g.entries[i])) {
      ModalityPath mu = resolve_identity(l->modality, cur);
      if (mu.source != cur)
        throw WfError(WfError::Kind::ModeMismatch, "lock " + mt.show(l->modality) + " expects a context at " +
                                                       mt.mode_name(mu.target) + " producing " +
                                                       mt.mode_name(mu.source) + ", but is used at " +
                                                       mt.mode_name(cur));
      cur = mu.target;
    } else {
      const auto& b = std::get<Binding>(g.entries[i]);
      if (!seen.insert(b.name).second)
        throw WfError(WfError::Kind::DuplicateVariable, "variable '" + b.name + "' is bound twice");
      ModalityPath mu = resolve_identity(b.tag, cur);
      if (mu.target != cur)
        throw WfError(WfError::Kind::ModeMismatch, "binding " + b.name + " tagged " + mt.show(b.tag) + " lands in " +
                                                       mt.mode_name(mu.target) + " but sits at " +
                                                       mt.mode_name(cur));
      wf_type(mt, b.type, mu.source, opt);
    }
  }
}

inline bool is_wf_context(const ModeTheory& mt, const Context& g, const WfOptions& opt = {}) {
  try {
    wf_context(mt, g, opt);
    return true;
  } catch (const WfError&) {
    return false;
  }
}

}  // namespace modalcheck
