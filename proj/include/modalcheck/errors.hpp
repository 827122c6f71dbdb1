#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modalcheck {

/// 1-based source position. A zero line means "no location".
struct Span {
  int line = 0;
  int column = 0;
  std::size_t offset = 0;

  bool known() const { return line > 0; }
  friend bool operator==(const Span& a, const Span& b) {
    return a.line == b.line && a.column == b.column;
  }
  friend bool operator<(const Span& a, const Span& b) {
    return a.line != b.line ? a.line < b.line : a.column < b.column;
  }
};

inline std::string to_string(const Span& s) {
  return std::to_string(s.line) + ":" + std::to_string(s.column);
}

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, Span span)
      : std::runtime_error(message), span_(span) {}
  const Span& span() const { return span_; }
  std::size_t offset() const { return span_.offset; }

 private:
  Span span_;
};

class DuplicateName : public ParseError {
 public:
  using ParseError::ParseError;
};

class ModeTheoryError : public std::runtime_error {
 public:
  enum class Kind {
    BoundaryMismatch,
    IllComposed,
    UnknownBuiltin,
    UnknownName,
    IncreasingEquation,
    NotConfluent,
    Malformed,
  };

  ModeTheoryError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline const char* kind_name(ModeTheoryError::Kind k) {
  switch (k) {
    case ModeTheoryError::Kind::BoundaryMismatch: return "BoundaryMismatch";
    case ModeTheoryError::Kind::IllComposed: return "IllComposed";
    case ModeTheoryError::Kind::UnknownBuiltin: return "UnknownBuiltin";
    case ModeTheoryError::Kind::UnknownName: return "UnknownName";
    case ModeTheoryError::Kind::IncreasingEquation: return "IncreasingEquation";
    case ModeTheoryError::Kind::NotConfluent: return "NotConfluent";
    case ModeTheoryError::Kind::Malformed: return "Malformed";
  }
  return "ModeTheoryError";
}

/// Mode-correctness failures of types and contexts.
class WfError : public std::runtime_error {
 public:
  enum class Kind {
    UnknownMode,
    ModalityBoundary,
    AntecedentMode,
    AtomMode,
    DuplicateVariable,
    ModeMismatch,
  };

  WfError(Kind kind, const std::string& message, Span span = {})
      : std::runtime_error(message), kind_(kind), span_(span) {}
  Kind kind() const { return kind_; }
  const Span& span() const { return span_; }

 private:
  Kind kind_;
  Span span_;
};

inline const char* kind_name(WfError::Kind k) {
  switch (k) {
    case WfError::Kind::UnknownMode: return "UnknownMode";
    case WfError::Kind::ModalityBoundary: return "ModalityBoundary";
    case WfError::Kind::AntecedentMode: return "AntecedentMode";
    case WfError::Kind::AtomMode: return "AtomMode";
    case WfError::Kind::DuplicateVariable: return "DuplicateVariable";
    case WfError::Kind::ModeMismatch: return "ModeMismatch";
  }
  return "WfError";
}

}  // namespace modalcheck
