#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "modalcheck/lexer.hpp"
#include "modalcheck/mtt.hpp"
#include "modalcheck/printer.hpp"
#include "modalcheck/syntax.hpp"

namespace modalcheck {

struct Postulate {
  std::string name;
  TypeExpr scheme;
  ModeId mode = kAnyMode;
  std::vector<int> parameters;  // atom indices instantiated, in order, by `#name[...]`
  Span span;
};

struct Declaration {
  std::string name;
  std::optional<TypeExpr> type;
  ModeId mode = kAnyMode;
  bool mode_explicit = false;
  Term term;
  Span span;
};

struct Import {
  enum class Kind { None, File, Builtin };
  Kind kind = Kind::None;
  std::string target;  // file path as written, or builtin name such as `epistemic(3)`
};

struct Module {
  Import import;
  ModeTheory theory;
  std::vector<Postulate> postulates;
  std::vector<Declaration> declarations;

  const Postulate* find_postulate(const std::string& name) const {
    for (const auto& p : postulates)
      if (p.name == name) return &p;
    return nullptr;
  }
};

/// `lem : p0 + ~p0`, usable only at classical modes.
inline Postulate lem_postulate(ModeId mode) {
  TypeExpr p = TypeExpr::atom(0);
  return Postulate{"lem", TypeExpr::sum(p, TypeExpr::negation(p)), mode, {0}, {}};
}

/// Resolves `import "file.mtt"` targets to theories.
using TheoryLoader = std::function<ModeTheory(const std::string& path, bool unsafe_rewriting)>;

inline TheoryLoader file_loader(std::filesystem::path base_dir) {
  return [base_dir](const std::string& path, bool unsafe) {
    std::filesystem::path p(path);
    if (p.is_relative()) p = base_dir / p;
    return parse_mode_theory(read_file(p.string()), unsafe);
  };
}

namespace detail {

inline const std::set<std::string>& term_keywords() {
  static const std::set<std::string> k{"let", "in",  "case", "of",    "box",  "fst",    "snd",
                                       "inl", "inr", "abort", "unit", "thm", "postulate", "import"};
  return k;
}

}  // namespace detail

/// Parser for types, cells, terms and `.mml` modules against a mode theory.
class SurfaceParser : public ParserBase {
 public:
  SurfaceParser(std::string_view text, const ModeTheory* mt) : ParserBase(text), mt_(mt) {}

  // ---- types ----

  TypeExpr type(int level = 0) {
    TypeExpr lhs = level <= 1 ? sum_type() : level == 2 ? prod_type() : atomic_type();
    if (level == 0 && peek().is("->")) {
      next();
      ModalityPath mu;
      if (peek().is("{")) {
        open("{");
        mu = parse_word(theory());
        close("}");
      }
      return TypeExpr::impl(mu, lhs, type(0));
    }
    return lhs;
  }

  // ---- cells ----

  Cell2 cell() {
    Cell2 lhs = horizontal_cell();
    if (peek().is("o")) {
      next();
      return Cell2::vertical(lhs, cell());
    }
    return lhs;
  }

  // ---- terms ----

  Term term() {
    const Token& start = peek();
    Term t;
    if (accept("\\")) {
      std::string x = variable_name();
      ModalityPath mu;
      std::optional<TypeExpr> a;
      if (accept(":")) {
        if (peek().is("{")) {
          open("{");
          mu = parse_word(theory());
          close("}");
        }
        a = type();
      }
      expect(".");
      t = Term::lam(x, mu, a, term());
    } else if (accept("let")) {
      expect("box");
      open("{");
      ModalityPath mu = parse_word(theory());
      expect(";");
      ModalityPath nu = parse_word(theory());
      close("}");
      std::string x = variable_name();
      expect("=");
      Term m = term();
      expect("in");
      t = Term::let_box(mu, nu, x, m, term());
    } else if (accept("case")) {
      Term m = term();
      expect("of");
      open("{");
      std::string x = variable_name();
      expect(".");
      Term p = term();
      expect("|");
      std::string y = variable_name();
      expect(".");
      Term q = term();
      close("}");
      t = Term::case_of(m, x, p, y, q);
    } else {
      return application();
    }
    t.span = start.span;
    return t;
  }

  bool done() const { return at_end(); }
  void finish() {
    if (!at_end()) fail("unexpected " + describe(peek()));
  }

  ModalityPath word() { return parse_word(theory()); }

  // ---- modules ----

  Module module(const TheoryLoader& loader, bool unsafe_rewriting) {
    Module mod;
    std::set<std::string> names;
    if (peek().is("import")) {
      next();
      const Token& t = peek();
      if (t.kind == Token::Kind::String) {
        next();
        mod.import = {Import::Kind::File, t.text};
        try {
          mod.theory = loader(t.text, unsafe_rewriting);
        } catch (const ParseError& e) {
          throw ParseError("in imported theory '" + t.text + "' at " + to_string(e.span()) + ": " + e.what(),
                           t.span);
        } catch (const LocatedModeTheoryError& e) {
          throw LocatedModeTheoryError(e.kind(), "in imported theory '" + t.text + "': " + e.what(), t.span);
        } catch (const ModeTheoryError& e) {
          throw LocatedModeTheoryError(e.kind(), e.what(), t.span);
        } catch (const std::runtime_error& e) {
          throw ParseError(e.what(), t.span);
        }
      } else if (accept("builtin")) {
        std::string name = expect_name("a built-in theory");
        while (peek().is("-")) {
          next();
          name += "-" + expect_name("a built-in theory");
        }
        if (peek().is("(")) {
          open("(");
          name += "(" + expect_name("an agent count") + ")";
          close(")");
        }
        mod.import = {Import::Kind::Builtin, name};
        try {
          mod.theory = parse_mode_theory("builtin " + name + ".", unsafe_rewriting);
        } catch (const ParseError& e) {
          throw ParseError(e.what(), t.span);
        }
      } else {
        fail("expected a theory file (\"...\") or `builtin NAME` after import");
      }
      accept(".");
      mt_ = &mod.theory;
    }

    while (!at_end()) {
      const Token& head = peek();
      if (accept("postulate")) {
        require_theory(head);
        const Token& nt = peek();
        std::string name = variable_name();
        if (name == "lem") throw DuplicateName("`lem` is built in", nt.span);
        if (!names.insert(name).second) throw DuplicateName("duplicate name '" + name + "'", nt.span);
        expect(":");
        TypeExpr scheme = type();
        expect("at");
        ModeId m = mode_name();
        expect(".");
        std::set<int> atoms;
        collect_atoms(scheme, atoms);
        mod.postulates.push_back({name, scheme, m, std::vector<int>(atoms.begin(), atoms.end()), nt.span});
      } else if (accept("thm")) {
        require_theory(head);
        const Token& nt = peek();
        Declaration d;
        d.name = variable_name();
        d.span = nt.span;
        if (!names.insert(d.name).second) throw DuplicateName("duplicate name '" + d.name + "'", nt.span);
        if (accept(":")) d.type = type();
        if (accept("at")) {
          d.mode = mode_name();
          d.mode_explicit = true;
        } else if (theory().mode_count() == 1) {
          d.mode = 0;
        } else {
          fail("`at MODE` is required when the theory has several modes");
        }
        expect(":=");
        d.term = term();
        expect(".");
        check_closed(d.term, mod);
        mod.declarations.push_back(std::move(d));
      } else {
        fail("expected `thm` or `postulate` but found " + describe(peek()));
      }
    }
    return mod;
  }

 private:
  const ModeTheory& theory() const {
    if (!mt_) fail("no mode theory imported");
    return *mt_;
  }

  void require_theory(const Token& at) const {
    if (!mt_) fail_at("declarations need an `import` of a mode theory first", at);
  }

  ModeId mode_name() {
    const Token& t = peek();
    std::string m = expect_name("a mode");
    auto id = theory().find_mode(m);
    if (!id) fail_at("unknown mode '" + m + "'", t);
    return *id;
  }

  std::string variable_name() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident || detail::term_keywords().count(t.text)) fail("expected a variable but found " + describe(t));
    next();
    return t.text;
  }

  // Free variables and unknown postulates are reported at their first use.
  void check_closed(const Term& t, const Module& mod, std::set<std::string> bound = {}) const {
    if (t.kind == Term::Kind::Var && !bound.count(t.name))
      throw ParseError("unbound variable '" + t.name + "'", t.span);
    if (t.kind == Term::Kind::Const && t.name != "lem" && !mod.find_postulate(t.name))
      throw ParseError("unknown postulate '" + t.name + "'", t.span);
    for (std::size_t i = 0; i < t.children.size(); ++i) {
      auto b = binders_of(t, i);
      auto inner = bound;
      inner.insert(b.begin(), b.end());
      check_closed(t.children[i], mod, inner);
    }
  }

  TypeExpr sum_type() {
    TypeExpr acc = prod_type();
    while (accept("+")) acc = TypeExpr::sum(acc, prod_type());
    return acc;
  }

  TypeExpr prod_type() {
    TypeExpr acc = atomic_type();
    while (accept("*")) acc = TypeExpr::prod(acc, atomic_type());
    return acc;
  }

  TypeExpr atomic_type() {
    const Token& t = peek();
    if (accept("top")) return TypeExpr::top();
    if (accept("bot")) return TypeExpr::bot();
    if (accept("~")) return TypeExpr::negation(atomic_type());
    if (t.is("(")) {
      open("(");
      TypeExpr inner = type();
      close(")");
      return inner;
    }
    if (t.is("<")) {
      open("<");
      ModalityPath mu = parse_word(theory());
      expect("|");
      TypeExpr body = type();
      close(">");
      return TypeExpr::modal(mu, body);
    }
    if (t.kind == Token::Kind::Ident) {
      int index = MttParser::atom_index(t.text);
      if (index >= 0) {
        next();
        return TypeExpr::atom(index);
      }
    }
    fail("expected a type but found " + describe(t));
  }

  Cell2 horizontal_cell() {
    Cell2 lhs = atomic_cell();
    if (accept("*")) return Cell2::horizontal(lhs, horizontal_cell());
    return lhs;
  }

  Cell2 atomic_cell() {
    const Token& t = peek();
    if (t.is("(")) {
      open("(");
      Cell2 c = cell();
      close(")");
      return c;
    }
    if (accept("id")) {
      if (!peek().is("{")) return Cell2::contextual_identity();
      open("{");
      ModalityPath p = parse_word(theory());
      close("}");
      return Cell2::identity(p);
    }
    if (t.is_name()) {
      auto c = theory().find_cell(t.text);
      if (!c) fail("unknown cell '" + t.text + "'");
      next();
      return Cell2::generator(*c);
    }
    fail("expected a cell but found " + describe(t));
  }

  bool starts_atomic() const {
    const Token& t = peek();
    if (t.kind == Token::Kind::Ident) return !detail::term_keywords().count(t.text) || t.text == "unit";
    return t.is("(") || t.is("#");
  }

  Term application() {
    Term acc = prefix();
    while (true) {
      const Token& at = peek();
      if (at.is("@")) {
        next();
        open("{");
        ModalityPath mu = parse_word(theory());
        close("}");
        Term arg = prefix();
        Span s = acc.span;
        acc = Term::app(acc, mu, arg);
        acc.span = s;
      } else if (starts_atomic()) {
        Term arg = atomic();
        Span s = acc.span;
        acc = Term::app(acc, ModalityPath{}, arg);
        acc.span = s;
      } else {
        return acc;
      }
    }
  }

  Term prefix() {
    const Token& start = peek();
    Term t;
    if (accept("box")) {
      open("{");
      ModalityPath mu = parse_word(theory());
      close("}");
      t = Term::box(mu, prefix());
    } else if (accept("fst")) {
      t = Term::proj(1, prefix());
    } else if (accept("snd")) {
      t = Term::proj(2, prefix());
    } else if (peek().is("inl") || peek().is("inr")) {
      int i = next().text == "inl" ? 1 : 2;
      std::optional<TypeExpr> ann = bracket_type();
      t = Term::inj(i, prefix(), ann);
    } else if (accept("abort")) {
      std::optional<TypeExpr> ann = bracket_type();
      t = Term::abort(prefix(), ann);
    } else {
      return atomic();
    }
    t.span = start.span;
    return t;
  }

  std::optional<TypeExpr> bracket_type() {
    if (!peek().is("[")) return std::nullopt;
    open("[");
    TypeExpr a = type();
    close("]");
    return a;
  }

  Term atomic() {
    const Token& start = peek();
    Term t;
    if (accept("unit")) {
      t = Term::unit();
    } else if (start.is("(")) {
      open("(");
      Term a = term();
      if (accept(",")) {
        Term b = term();
        close(")");
        t = Term::pair(a, b);
      } else {
        close(")");
        return a;
      }
    } else if (accept("#")) {
      const Token& nt = peek();
      if (nt.kind != Token::Kind::Ident) fail("expected a postulate name");
      next();
      std::vector<TypeExpr> args;
      if (peek().is("[")) {
        open("[");
        args.push_back(type());
        while (accept(",")) args.push_back(type());
        close("]");
      }
      t = Term::constant(nt.text, args);
    } else if (start.kind == Token::Kind::Ident && !detail::term_keywords().count(start.text)) {
      next();
      std::optional<Cell2> alpha = Cell2::contextual_identity();
      if (peek().is("[")) {
        open("[");
        if (accept("?"))
          alpha = std::nullopt;
        else
          alpha = cell();
        close("]");
      }
      t = Term::var(start.text, alpha);
    } else {
      fail("expected a term but found " + describe(start));
    }
    t.span = start.span;
    return t;
  }

  const ModeTheory* mt_;
};

inline TypeExpr parse_type(const ModeTheory& mt, std::string_view text) {
  SurfaceParser p(text, &mt);
  TypeExpr t = p.type();
  p.finish();
  return t;
}

inline Term parse_term(const ModeTheory& mt, std::string_view text) {
  SurfaceParser p(text, &mt);
  Term t = p.term();
  p.finish();
  return t;
}

inline Cell2 parse_cell(const ModeTheory& mt, std::string_view text) {
  SurfaceParser p(text, &mt);
  Cell2 c = p.cell();
  p.finish();
  return c;
}

inline ModalityPath parse_path(const ModeTheory& mt, std::string_view text) {
  SurfaceParser p(text, &mt);
  ModalityPath w = p.word();
  p.finish();
  return w;
}

inline Module parse_module(std::string_view text, const TheoryLoader& loader = file_loader("."),
                           bool unsafe_rewriting = false) {
  SurfaceParser p(text, nullptr);
  return p.module(loader, unsafe_rewriting);
}

inline Module load_module(const std::string& path, bool unsafe_rewriting = false) {
  std::string text = read_file(path);
  return parse_module(text, file_loader(std::filesystem::path(path).parent_path()), unsafe_rewriting);
}

/// Prints a module so that parsing the output gives back the same module.
inline std::string print_module(const Module& mod) {
  const ModeTheory& mt = mod.theory;
  std::string out;
  if (mod.import.kind == Import::Kind::File) out += "import \"" + mod.import.target + "\"\n";
  if (mod.import.kind == Import::Kind::Builtin) out += "import builtin " + mod.import.target + "\n";
  for (const auto& p : mod.postulates)
    out += "postulate " + p.name + " : " + print_type(mt, p.scheme) + " at " + mt.mode_name(p.mode) + ".\n";
  for (const auto& d : mod.declarations) {
    out += "thm " + d.name;
    if (d.type) out += " : " + print_type(mt, *d.type);
    if (d.mode_explicit) out += " at " + mt.mode_name(d.mode);
    out += " :=\n  " + print_term(mt, d.term) + ".\n";
  }
  return out;
}

inline bool same_module(const Module& a, const Module& b) {
  if (a.import.kind != b.import.kind || a.import.target != b.import.target) return false;
  if (a.postulates.size() != b.postulates.size() || a.declarations.size() != b.declarations.size()) return false;
  for (std::size_t i = 0; i < a.postulates.size(); ++i) {
    const auto &p = a.postulates[i], &q = b.postulates[i];
    if (p.name != q.name || !(p.scheme == q.scheme) || p.mode != q.mode) return false;
  }
  for (std::size_t i = 0; i < a.declarations.size(); ++i) {
    const auto &d = a.declarations[i], &e = b.declarations[i];
    if (d.name != e.name || d.type != e.type || d.mode != e.mode || d.mode_explicit != e.mode_explicit ||
        !(d.term == e.term))
      return false;
  }
  return true;
}

}  // namespace modalcheck
