#pragma once

#include <compare>
#include <vector>

namespace modalcheck {

using ModeId = int;
using GenId = int;
using CellId = int;
using Word = std::vector<GenId>;

/// Mode of an identity written without a mode (`1`); it adapts to its use site.
inline constexpr ModeId kAnyMode = -1;

inline bool modes_match(ModeId a, ModeId b) {
  return a == kAnyMode || b == kAnyMode || a == b;
}

/// A word of modality generators from `source` to `target`.
///
/// Words are stored in diagrammatic order: word[0] is applied first, so the
/// composite mu ∘ nu is stored as nu's word followed by mu's.
struct ModalityPath {
  ModeId source = kAnyMode;
  ModeId target = kAnyMode;
  Word word;

  bool is_identity() const { return word.empty(); }
  bool is_polymorphic() const { return word.empty() && source == kAnyMode; }

  friend bool operator==(const ModalityPath&, const ModalityPath&) = default;
  friend auto operator<=>(const ModalityPath&, const ModalityPath&) = default;
};

/// Pins a polymorphic identity to mode `m`; other paths are returned as is.
inline ModalityPath resolve_identity(ModalityPath p, ModeId m) {
  if (p.is_polymorphic()) {
    p.source = m;
    p.target = m;
  }
  return p;
}

}  // namespace modalcheck
