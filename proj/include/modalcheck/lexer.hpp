#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modalcheck/errors.hpp"
#include "modalcheck/mode_theory.hpp"

namespace modalcheck {

struct Token {
  enum class Kind { Ident, Number, String, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  Span span;

  bool is(std::string_view sym) const { return (kind == Kind::Symbol || kind == Kind::Ident) && text == sym; }
  bool is_name() const { return kind == Kind::Ident || kind == Kind::Number; }
};

/// Tokenizes .mtt and .mml sources. `--` starts a line comment; a few Unicode
/// symbols are accepted as spellings of their ASCII forms.
inline std::vector<Token> tokenize(std::string_view text) {
  static const std::vector<std::pair<std::string_view, std::string_view>> unicode{
      {"λ", "\\"}, {"→", "->"}, {"⇒", "=>"}, {"×", "*"}, {"∧", "*"}, {"∨", "+"}, {"∗", "*"},
      {"¬", "~"},  {"⟨", "<"},  {"⟩", ">"},  {"∘", "o"}, {"⊤", "top"}, {"⊥", "bot"}};
  static const std::vector<std::string_view> symbols{":=", "->", "=>", "(", ")", "{", "}", "[", "]", "<", ">",
                                                     "|",  ".",  ",",  ";", ":", "\\", "@", "*", "+", "~", "^",
                                                     "?",  "#",  "=",  "-"};
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      unsigned char c = static_cast<unsigned char>(text[i + k]);
      if (text[i + k] == '\n') {
        ++line;
        col = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++col;
      }
    }
    i += n;
  };
  auto is_word_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (text.substr(i, 2) == "--") {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Span span{line, col, i};
    bool matched = false;
    for (const auto& [u, ascii] : unicode) {
      if (text.substr(i, u.size()) == u) {
        bool word = std::isalpha(static_cast<unsigned char>(ascii[0])) && ascii != "o";
        out.push_back({word ? Token::Kind::Ident : Token::Kind::Symbol, std::string(ascii), span});
        if (ascii == "o") out.back().kind = Token::Kind::Ident;
        advance(u.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
      if (j >= text.size() || text[j] != '"') throw ParseError("unterminated string literal", span);
      out.push_back({Token::Kind::String, std::string(text.substr(i + 1, j - i - 1)), span});
      advance(j + 1 - i);
      continue;
    }
    if (is_word_char(c) && c != '\'') {
      std::size_t j = i;
      while (j < text.size() && is_word_char(text[j])) ++j;
      std::string word(text.substr(i, j - i));
      bool digits = true;
      for (char d : word) digits = digits && std::isdigit(static_cast<unsigned char>(d));
      out.push_back({digits ? Token::Kind::Number : Token::Kind::Ident, word, span});
      advance(j - i);
      continue;
    }
    for (auto sym : symbols) {
      if (text.substr(i, sym.size()) == sym) {
        out.push_back({Token::Kind::Symbol, std::string(sym), span});
        advance(sym.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", span);
  }
  out.push_back({Token::Kind::End, "", Span{line, col, text.size()}});
  return out;
}

/// Shared recursive-descent machinery: token cursor, delimiter tracking (so an
/// unexpected end of input points at the unclosed bracket), and modality words.
class ParserBase {
 public:
  explicit ParserBase(std::string_view text) : tokens_(tokenize(text)) {}

 protected:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[k];
  }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool accept(std::string_view sym) {
    if (peek().kind != Token::Kind::String && peek().is(sym)) {
      next();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& message) const { fail_at(message, peek()); }

  [[noreturn]] void fail_at(const std::string& message, const Token& at) const {
    if (at.kind == Token::Kind::End && !open_.empty()) {
      const Token& open = open_.back();
      throw ParseError("unclosed '" + open.text + "'", open.span);
    }
    throw ParseError(message, at.span);
  }

  void expect(std::string_view sym) {
    if (!accept(sym)) fail("expected '" + std::string(sym) + "' but found " + describe(peek()));
  }

  // Delimiters: opening pushes onto the stack, closing pops it.
  void open(std::string_view sym) {
    const Token& t = peek();
    expect(sym);
    open_.push_back(t);
  }
  void close(std::string_view sym) {
    expect(sym);
    if (!open_.empty()) open_.pop_back();
  }

  std::string expect_name(const std::string& what) {
    if (!peek().is_name()) fail("expected " + what + " but found " + describe(peek()));
    return next().text;
  }

  static std::string describe(const Token& t) {
    if (t.kind == Token::Kind::End) return "end of input";
    if (t.kind == Token::Kind::String) return "string \"" + t.text + "\"";
    return "'" + t.text + "'";
  }

  bool starts_word_item(const ModeTheory& mt, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.is_name() && (t.text == "1" || mt.find_modality(t.text).has_value());
  }

  /// word := item ('.' item)* with item := NAME ['^' N] | '1' ['@' MODE].
  /// `mu . nu` is mu ∘ nu. A '.' only continues the word when followed by a
  /// modality name or `1`, so words can end a `.`-terminated declaration.
  ModalityPath parse_word(const ModeTheory& mt) {
    std::vector<std::pair<ModalityPath, Token>> items;
    do {
      const Token& t = peek();
      if (!t.is_name()) fail("expected a modality but found " + describe(t));
      next();
      if (t.text == "1") {
        if (accept("@")) {
          const Token& mtok = peek();
          std::string mode = expect_name("a mode");
          auto m = mt.find_mode(mode);
          if (!m) fail_at("unknown mode '" + mode + "'", mtok);
          items.push_back({mt.identity(*m), t});
        } else {
          items.push_back({ModalityPath{}, t});
        }
        continue;
      }
      auto g = mt.find_modality(t.text);
      if (!g) fail_at("unknown modality '" + t.text + "'", t);
      ModalityPath p = mt.generator(*g);
      if (accept("^")) {
        const Token& ntok = peek();
        if (ntok.kind != Token::Kind::Number) fail("expected an exponent");
        next();
        int n = std::stoi(ntok.text);
        ModalityPath acc = n == 0 ? mt.identity(p.source) : p;
        if (n == 0 && p.source != p.target) fail_at("box^0 needs an endo-modality", ntok);
        for (int k = 1; k < n; ++k) acc = chain_or_fail(mt, acc, p, t);
        p = acc;
      }
      items.push_back({p, t});
    } while (peek().is(".") && starts_word_item(mt, 1) && (next(), true));

    ModalityPath acc = items.back().first;
    for (auto it = items.rbegin() + 1; it != items.rend(); ++it) acc = chain_or_fail(mt, it->first, acc, it->second);
    return acc;
  }

  ModalityPath chain_or_fail(const ModeTheory& mt, const ModalityPath& outer, const ModalityPath& inner,
                             const Token& at) const {
    try {
      return mt.chain(outer, inner);
    } catch (const ModeTheoryError& e) {
      fail_at(e.what(), at);
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<Token> open_;
};

}  // namespace modalcheck
