#pragma once

#include <string>
#include <vector>

#include "modalcheck/mode_theory.hpp"

namespace modalcheck {

/// An order-preserving function [domain] -> [codomain], [k] = {0, ..., k-1}.
struct MonotoneMap {
  int domain = 0;
  int codomain = 0;
  std::vector<int> values;

  static MonotoneMap identity(int n) {
    MonotoneMap m{n, n, {}};
    for (int i = 0; i < n; ++i) m.values.push_back(i);
    return m;
  }

  bool is_monotone() const {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] < 0 || values[i] >= codomain) return false;
      if (i > 0 && values[i - 1] > values[i]) return false;
    }
    return static_cast<int>(values.size()) == domain;
  }

  friend bool operator==(const MonotoneMap&, const MonotoneMap&) = default;
};

/// g ∘ f
inline MonotoneMap compose_maps(const MonotoneMap& g, const MonotoneMap& f) {
  MonotoneMap out{f.domain, g.codomain, {}};
  for (int v : f.values) out.values.push_back(g.values.at(static_cast<std::size_t>(v)));
  return out;
}

inline std::string to_string(const MonotoneMap& m) {
  std::string out = "[" + std::to_string(m.domain) + "]->[" + std::to_string(m.codomain) + "] {";
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(i) + "->" + std::to_string(m.values[i]);
  }
  return out + "}";
}

namespace walking_comonad {

inline bool single_box_theory(const ModeTheory& mt) { return mt.mode_count() == 1 && mt.modalities().size() == 1; }

/// Interprets a cell box^a => box^b as the monotone map [b] -> [a] it denotes.
/// Generators must be the counit (box => 1) or comultiplication (box => box^2).
inline MonotoneMap evaluate(const ModeTheory& mt, const Cell2& c) {
  switch (c.kind()) {
    case Cell2::Kind::Generator: {
      const auto& g = mt.cell(c.generator_id());
      if (g.from.word.size() == 1 && g.to.word.empty()) return MonotoneMap{0, 1, {}};
      if (g.from.word.size() == 1 && g.to.word.size() == 2) return MonotoneMap{2, 1, {0, 0}};
      throw ModeTheoryError(ModeTheoryError::Kind::Malformed,
                            "cell '" + g.name + "' is not a generator of the walking comonad");
    }
    case Cell2::Kind::Identity:
      if (!c.identity_path()) throw ModeTheoryError(ModeTheoryError::Kind::IllComposed, "`id` without a modality");
      return MonotoneMap::identity(static_cast<int>(c.identity_path()->word.size()));
    case Cell2::Kind::Vertical: {
      MonotoneMap after = evaluate(mt, c.first());
      MonotoneMap before = evaluate(mt, c.second());
      if (after.codomain != before.domain)
        throw ModeTheoryError(ModeTheoryError::Kind::IllComposed, "vertical composite of incompatible cells");
      return compose_maps(before, after);
    }
    case Cell2::Kind::Horizontal: {
      // outer: box^a => box^b is [b]->[a]; inner: box^c => box^d is [d]->[c].
      // The composite box^(c+a) => box^(d+b) pastes them side by side, inner first.
      MonotoneMap outer = evaluate(mt, c.first());
      MonotoneMap inner = evaluate(mt, c.second());
      MonotoneMap out{inner.domain + outer.domain, inner.codomain + outer.codomain, inner.values};
      for (int v : outer.values) out.values.push_back(inner.codomain + v);
      return out;
    }
  }
  throw ModeTheoryError(ModeTheoryError::Kind::IllComposed, "unknown cell");
}

/// A cell box^n => box^m exists iff some monotone map [m] -> [n] does.
inline bool exists(int n, int m) { return n > 0 || m == 0; }

/// A canonical pasting of generators witnessing box^n => box^m: counits down to
/// a single box (or none), then comultiplications up to m.
inline Cell2 witness(const ModeTheory& mt, int n, int m) {
  const ModeId mode = 0;
  const GenId box = 0;
  auto power = [&](int k) { return ModalityPath{mode, mode, Word(static_cast<std::size_t>(k), box)}; };
  std::optional<CellId> counit, comult;
  for (std::size_t i = 0; i < mt.cells().size(); ++i) {
    const auto& g = mt.cells()[i];
    if (g.from.word.size() == 1 && g.to.word.empty()) counit = static_cast<CellId>(i);
    if (g.from.word.size() == 1 && g.to.word.size() == 2) comult = static_cast<CellId>(i);
  }
  if (n == m) return Cell2::identity(power(n));
  Cell2 acc = Cell2::identity(power(n));
  int cur = n;
  const int floor = m == 0 ? 0 : 1;
  while (cur > floor) {
    acc = compose_vertical(whisker(power(0), Cell2::generator(*counit), power(cur - 1)), acc);
    --cur;
  }
  while (cur < m) {
    acc = compose_vertical(whisker(power(0), Cell2::generator(*comult), power(cur - 1)), acc);
    ++cur;
  }
  return acc;
}

}  // namespace walking_comonad
}  // namespace modalcheck
