#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "modalcheck/builtins.hpp"
#include "modalcheck/lexer.hpp"
#include "modalcheck/mode_theory.hpp"

namespace modalcheck {

/// Reader for `.mtt` mode-theory files:
///
///   builtin s4-comonad.          -- optional, must come first
///   mode m.
///   modality mu : n -> m.
///   eq mu . nu = xi.
///   cell alpha : mu => nu.
///   classical m.
///   atom p0 at m.                -- only consulted with strict atoms
class MttParser : ParserBase {
 public:
  explicit MttParser(std::string_view text) : ParserBase(text) {}

  ModeTheory parse(bool unsafe_rewriting = false) {
    ModeTheory mt;
    bool any = false;
    while (!at_end()) {
      const Token& head = peek();
      if (accept("builtin")) {
        if (any) fail_at("`builtin` must be the first directive", head);
        mt = parse_builtin();
      } else if (accept("mode")) {
        const Token& t = peek();
        std::string name = expect_name("a mode name");
        wrap(t, [&] { mt.add_mode(name); });
      } else if (accept("modality")) {
        const Token& t = peek();
        std::string name = expect_name("a modality name");
        if (name == "1") fail_at("`1` is reserved for identities", t);
        expect(":");
        ModeId src = mode_ref(mt);
        expect("->");
        ModeId dst = mode_ref(mt);
        wrap(t, [&] { mt.add_modality(name, src, dst); });
      } else if (accept("eq")) {
        ModalityPath lhs = parse_word(mt);
        expect("=");
        ModalityPath rhs = parse_word(mt);
        wrap(head, [&] { mt.add_equation(lhs, rhs); });
        mt.set_oracle(CellOracle::Search);
      } else if (accept("cell")) {
        const Token& t = peek();
        std::string name = expect_name("a cell name");
        expect(":");
        ModalityPath from = parse_word(mt);
        expect("=>");
        ModalityPath to = parse_word(mt);
        wrap(t, [&] { mt.add_cell(name, from, to); });
        mt.set_oracle(CellOracle::Search);
      } else if (accept("classical")) {
        ModeId m = mode_ref(mt);
        mt.set_classical(m);
      } else if (accept("atom")) {
        const Token& t = peek();
        std::string name = expect_name("an atom");
        int index = atom_index(name);
        if (index < 0) fail_at("atoms are written p0, p1, ...", t);
        expect("at");
        ModeId m = mode_ref(mt);
        mt.declare_atom(index, m);
      } else {
        fail("expected a directive (mode, modality, eq, cell, classical, atom, builtin) but found " +
             describe(peek()));
      }
      expect(".");
      any = true;
    }
    wrap(tokens_.back(), [&] { mt.finalize(unsafe_rewriting); });
    return mt;
  }

  static int atom_index(const std::string& name) {
    if (name.size() < 2 || name[0] != 'p') return -1;
    for (std::size_t i = 1; i < name.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(name[i]))) return -1;
    return std::stoi(name.substr(1));
  }

 private:
  ModeTheory parse_builtin() {
    const Token& t = peek();
    std::string name = expect_name("a built-in theory name");
    while (peek().is("-")) {
      next();
      name += "-" + expect_name("a built-in theory name");
    }
    int agents = 2;
    if (peek().is("(")) {
      open("(");
      const Token& n = peek();
      if (n.kind != Token::Kind::Number) fail("expected an agent count");
      next();
      agents = std::stoi(n.text);
      close(")");
    }
    try {
      return builtin(name, agents);
    } catch (const ModeTheoryError& e) {
      fail_at(e.what(), t);
    }
  }

  ModeId mode_ref(const ModeTheory& mt) {
    const Token& t = peek();
    std::string name = expect_name("a mode");
    auto m = mt.find_mode(name);
    if (!m) fail_at("unknown mode '" + name + "'", t);
    return *m;
  }

  // Mode-theory errors raised while building surface as errors at `at`,
  // keeping their kind for the caller.
  template <class F>
  void wrap(const Token& at, F&& f) {
    try {
      f();
    } catch (const ModeTheoryError& e) {
      throw LocatedModeTheoryError(e.kind(), e.what(), at.span);
    }
  }

 public:
  class LocatedModeTheoryError : public ModeTheoryError {
   public:
    LocatedModeTheoryError(Kind k, const std::string& msg, Span span) : ModeTheoryError(k, msg), span_(span) {}
    const Span& span() const { return span_; }

   private:
    Span span_;
  };
};

using LocatedModeTheoryError = MttParser::LocatedModeTheoryError;

inline ModeTheory parse_mode_theory(std::string_view text, bool unsafe_rewriting = false) {
  return MttParser(text).parse(unsafe_rewriting);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// A theory argument: a built-in name such as `k4-free` or `epistemic(3)`, or a
/// path to a `.mtt` file.
inline ModeTheory load_theory(const std::string& source, bool unsafe_rewriting = false) {
  if (source.size() > 4 && source.substr(source.size() - 4) == ".mtt")
    return parse_mode_theory(read_file(source), unsafe_rewriting);
  return parse_mode_theory("builtin " + source + ".", unsafe_rewriting);
}

}  // namespace modalcheck
