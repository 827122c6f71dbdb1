#pragma once

#include <string>
#include <variant>

#include "modalcheck/mode_theory.hpp"
#include "modalcheck/syntax.hpp"

namespace modalcheck {

// Precedence levels. Types: 0 implication (right), 1 sum, 2 product, 3 atomic.
// Terms: 0 binders (lam/let/case), 1 application, 2 prefix operators, 3 atomic.
// Cells: 0 vertical, 1 horizontal, 2 atomic.

inline std::string print_type(const ModeTheory& mt, const TypeExpr& t, int level = 0) {
  auto wrap = [&](int own, std::string s) { return own < level ? "(" + s + ")" : s; };
  switch (t.kind()) {
    case TypeExpr::Kind::Atom: return "p" + std::to_string(t.index());
    case TypeExpr::Kind::Top: return "top";
    case TypeExpr::Kind::Bot: return "bot";
    case TypeExpr::Kind::Prod: return wrap(2, print_type(mt, t.lhs(), 2) + " * " + print_type(mt, t.rhs(), 3));
    case TypeExpr::Kind::Sum: return wrap(1, print_type(mt, t.lhs(), 1) + " + " + print_type(mt, t.rhs(), 2));
    case TypeExpr::Kind::ModalImpl: {
      if (t.path().is_polymorphic() && t.rhs().kind() == TypeExpr::Kind::Bot) return "~" + print_type(mt, t.lhs(), 3);
      std::string arrow = t.path().is_polymorphic() ? " -> " : " ->{" + mt.show(t.path()) + "} ";
      return wrap(0, print_type(mt, t.lhs(), 1) + arrow + print_type(mt, t.rhs(), 0));
    }
    case TypeExpr::Kind::Modal: return "<" + mt.show(t.path()) + "|" + print_type(mt, t.body(), 0) + ">";
  }
  return "?";
}

inline std::string print_cell(const ModeTheory& mt, const Cell2& c, int level = 0) {
  auto wrap = [&](int own, std::string s) { return own < level ? "(" + s + ")" : s; };
  switch (c.kind()) {
    case Cell2::Kind::Generator: return mt.cell(c.generator_id()).name;
    case Cell2::Kind::Identity: return c.identity_path() ? "id{" + mt.show(*c.identity_path()) + "}" : "id";
    case Cell2::Kind::Vertical: return wrap(0, print_cell(mt, c.first(), 1) + " o " + print_cell(mt, c.second(), 0));
    case Cell2::Kind::Horizontal: return wrap(1, print_cell(mt, c.first(), 2) + " * " + print_cell(mt, c.second(), 1));
  }
  return "?";
}

inline std::string print_term(const ModeTheory& mt, const Term& t, int level = 0) {
  auto wrap = [&](int own, std::string s) { return own < level ? "(" + s + ")" : s; };
  auto w = [&](const ModalityPath& p) { return mt.show(p); };
  const auto& ch = t.children;
  switch (t.kind) {
    case Term::Kind::Var: return t.name + "[" + (t.cell ? print_cell(mt, *t.cell) : std::string("?")) + "]";
    case Term::Kind::Unit: return "unit";
    case Term::Kind::Pair: return "(" + print_term(mt, ch[0]) + ", " + print_term(mt, ch[1]) + ")";
    case Term::Kind::Const: {
      std::string out = "#" + t.name;
      if (!t.type_args.empty()) {
        out += "[";
        for (std::size_t i = 0; i < t.type_args.size(); ++i) out += (i ? ", " : "") + print_type(mt, t.type_args[i]);
        out += "]";
      }
      return out;
    }
    case Term::Kind::Proj: return wrap(2, std::string(t.index == 1 ? "fst " : "snd ") + print_term(mt, ch[0], 2));
    case Term::Kind::Inj: {
      std::string head = t.index == 1 ? "inl" : "inr";
      if (t.type) head += "[" + print_type(mt, *t.type) + "]";
      return wrap(2, head + " " + print_term(mt, ch[0], 2));
    }
    case Term::Kind::Abort: {
      std::string head = "abort";
      if (t.type) head += "[" + print_type(mt, *t.type) + "]";
      return wrap(2, head + " " + print_term(mt, ch[0], 2));
    }
    case Term::Kind::Box: return wrap(2, "box{" + w(t.path) + "} " + print_term(mt, ch[0], 2));
    case Term::Kind::App:
      if (t.path.is_polymorphic()) return wrap(1, print_term(mt, ch[0], 1) + " " + print_term(mt, ch[1], 3));
      return wrap(1, print_term(mt, ch[0], 1) + " @{" + w(t.path) + "} " + print_term(mt, ch[1], 2));
    case Term::Kind::Lam: {
      std::string binder = "\\" + t.name;
      if (t.type) {
        binder += t.path.is_polymorphic() ? " : " : " :{" + w(t.path) + "} ";
        binder += print_type(mt, *t.type);
      }
      return wrap(0, binder + ". " + print_term(mt, ch[0], 0));
    }
    case Term::Kind::Case:
      return wrap(0, "case " + print_term(mt, ch[0], 1) + " of {" + t.name + ". " + print_term(mt, ch[1]) + " | " +
                         t.name2 + ". " + print_term(mt, ch[2]) + "}");
    case Term::Kind::LetBox:
      return wrap(0, "let box{" + w(t.path) + ";" + w(t.path2) + "} " + t.name + " = " + print_term(mt, ch[0]) +
                         " in " + print_term(mt, ch[1], 0));
  }
  return "?";
}

inline std::string print_context(const ModeTheory& mt, const Context& g) {
  std::string out;
  for (const auto& e : g.entries) {
    if (!out.empty()) out += ", ";
    if (const auto* b = std::get_if<Binding>(&e)) {
      out += b->name + " :{" + mt.show(b->tag) + "} " + print_type(mt, b->type);
    } else {
      out += "lock{" + mt.show(std::get<LockEntry>(e).modality) + "}";
    }
  }
  return out.empty() ? "." : out;
}

}  // namespace modalcheck
