#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modalcheck/cell.hpp"
#include "modalcheck/errors.hpp"
#include "modalcheck/path.hpp"

namespace modalcheck {

struct ModalityGenerator {
  std::string name;
  ModeId source;
  ModeId target;
};

struct CellGenerator {
  std::string name;
  ModalityPath from;
  ModalityPath to;
};

struct ModalityEquation {
  ModalityPath lhs;
  ModalityPath rhs;
};

struct CellEquation {
  Cell2 lhs;
  Cell2 rhs;
};

/// An oriented modality equation over stored (diagrammatic) words.
struct RewriteRule {
  Word lhs;
  Word rhs;
};

/// How cell_exists answers queries for a theory.
enum class CellOracle {
  Search,              // bounded breadth-first search over whiskered generators
  WalkingComonad,      // cells box^n => box^m are monotone maps [m] -> [n]
  NormalFormPreorder,  // finitely many normal forms; search over them is exact
};

enum class WordComparison { Equal, Different, Unknown };

struct CellBoundary {
  ModalityPath from;
  ModalityPath to;
};

/// A presented strict 2-category: modes, modality generators with word
/// equations, cell generators, plus the classical-mode and atom signatures used
/// by the logic. Immutable after `finalize()`; every query is const.
class ModeTheory {
 public:
  // ---- building ----

  ModeId add_mode(const std::string& name) {
    if (mode_index_.count(name)) throw ModeTheoryError(ModeTheoryError::Kind::Malformed, "duplicate mode '" + name + "'");
    mode_index_[name] = static_cast<ModeId>(modes_.size());
    modes_.push_back(name);
    return static_cast<ModeId>(modes_.size() - 1);
  }

  GenId add_modality(const std::string& name, ModeId source, ModeId target) {
    check_mode(source);
    check_mode(target);
    if (modality_index_.count(name)) throw ModeTheoryError(ModeTheoryError::Kind::Malformed, "duplicate modality '" + name + "'");
    modality_index_[name] = static_cast<GenId>(modalities_.size());
    modalities_.push_back({name, source, target});
    return static_cast<GenId>(modalities_.size() - 1);
  }

  CellId add_cell(const std::string& name, ModalityPath from, ModalityPath to) {
    validate_path(from);
    validate_path(to);
    unify_identity_modes(from, to);
    if (!parallel(from, to))
      throw ModeTheoryError(ModeTheoryError::Kind::BoundaryMismatch,
                            "cell '" + name + "' has non-parallel boundary " + show(from) + " => " + show(to));
    if (cell_index_.count(name)) throw ModeTheoryError(ModeTheoryError::Kind::Malformed, "duplicate cell '" + name + "'");
    cell_index_[name] = static_cast<CellId>(cells_.size());
    cells_.push_back({name, std::move(from), std::move(to)});
    return static_cast<CellId>(cells_.size() - 1);
  }

  void add_equation(ModalityPath lhs, ModalityPath rhs) {
    validate_path(lhs);
    validate_path(rhs);
    unify_identity_modes(lhs, rhs);
    if (!parallel(lhs, rhs))
      throw ModeTheoryError(ModeTheoryError::Kind::BoundaryMismatch,
                            "equation sides are not parallel: " + show(lhs) + " = " + show(rhs));
    equations_.push_back({std::move(lhs), std::move(rhs)});
    finalized_ = false;
  }

  void add_cell_equation(Cell2 lhs, Cell2 rhs) { cell_equations_.push_back({std::move(lhs), std::move(rhs)}); }

  void set_classical(ModeId m) {
    check_mode(m);
    classical_.insert(m);
  }

  void declare_atom(int index, ModeId m) {
    check_mode(m);
    atoms_[index] = m;
  }

  void set_oracle(CellOracle o) { oracle_ = o; }
  void set_name(std::string name) { name_ = std::move(name); }

  /// Orients the modality equations into a rewriting system and checks local
  /// confluence on all critical pairs. Without `unsafe_rewriting` a
  /// non-confluent presentation is refused.
  void finalize(bool unsafe_rewriting = false) {
    rules_.clear();
    for (const auto& eq : equations_) {
      Word l = eq.lhs.word;
      Word r = eq.rhs.word;
      if (l == r) continue;
      if (l.size() < r.size())
        throw ModeTheoryError(ModeTheoryError::Kind::IncreasingEquation,
                              "equation " + show(eq.lhs) + " = " + show(eq.rhs) +
                                  " increases word length left to right");
      if (l.size() == r.size() && l < r) std::swap(l, r);
      rules_.push_back({std::move(l), std::move(r)});
    }
    confluent_ = true;
    finalized_ = true;
    auto failures = critical_pair_failures();
    if (!failures.empty()) {
      confluent_ = false;
      if (!unsafe_rewriting) {
        const auto& [a, b] = failures.front();
        throw ModeTheoryError(ModeTheoryError::Kind::NotConfluent,
                              "modality equations are not confluent: critical pair resolves to " + show_word(a) +
                                  " and " + show_word(b) + " (use --unsafe-rewriting to accept)");
      }
    }
  }

  // ---- presentation access ----

  const std::string& name() const { return name_; }
  std::size_t mode_count() const { return modes_.size(); }
  const std::string& mode_name(ModeId m) const {
    static const std::string any = "?";
    return m == kAnyMode ? any : modes_.at(static_cast<std::size_t>(m));
  }
  std::optional<ModeId> find_mode(std::string_view name) const {
    auto it = mode_index_.find(std::string(name));
    if (it == mode_index_.end()) return std::nullopt;
    return it->second;
  }
  const std::vector<ModalityGenerator>& modalities() const { return modalities_; }
  std::optional<GenId> find_modality(std::string_view name) const {
    auto it = modality_index_.find(std::string(name));
    if (it == modality_index_.end()) return std::nullopt;
    return it->second;
  }
  const std::vector<CellGenerator>& cells() const { return cells_; }
  const CellGenerator& cell(CellId id) const { return cells_.at(static_cast<std::size_t>(id)); }
  std::optional<CellId> find_cell(std::string_view name) const {
    auto it = cell_index_.find(std::string(name));
    if (it == cell_index_.end()) return std::nullopt;
    return it->second;
  }
  const std::vector<ModalityEquation>& equations() const { return equations_; }
  const std::vector<CellEquation>& cell_equations() const { return cell_equations_; }
  const std::vector<RewriteRule>& rules() const { return rules_; }
  bool is_confluent() const { return confluent_; }
  bool is_classical(ModeId m) const { return classical_.count(m) > 0; }
  const std::set<ModeId>& classical_modes() const { return classical_; }
  const std::map<int, ModeId>& atom_signature() const { return atoms_; }
  std::optional<ModeId> atom_mode(int index) const {
    auto it = atoms_.find(index);
    if (it == atoms_.end()) return std::nullopt;
    return it->second;
  }
  CellOracle oracle() const { return oracle_; }

  // ---- paths ----

  ModalityPath identity(ModeId m) const { return ModalityPath{m, m, {}}; }

  ModalityPath generator(GenId g) const {
    const auto& gen = modalities_.at(static_cast<std::size_t>(g));
    return ModalityPath{gen.source, gen.target, {g}};
  }

  /// outer ∘ inner without normalization (keeps the written word).
  ModalityPath chain(const ModalityPath& outer, const ModalityPath& inner) const {
    if (!modes_match(inner.target, outer.source))
      throw ModeTheoryError(ModeTheoryError::Kind::BoundaryMismatch,
                            "cannot compose " + show(outer) + " after " + show(inner) + ": " +
                                show(inner) + " lands in " + mode_name(inner.target) + " but " + show(outer) +
                                " starts at " + mode_name(outer.source));
    if (inner.is_polymorphic()) return outer;
    if (outer.is_polymorphic()) return inner;
    ModalityPath out{inner.source, outer.target, inner.word};
    out.word.insert(out.word.end(), outer.word.begin(), outer.word.end());
    return out;
  }

  /// The composite outer ∘ inner, normalized by the rewriting system.
  ModalityPath compose(const ModalityPath& outer, const ModalityPath& inner) const { return normalize(chain(outer, inner)); }

  ModalityPath normalize(ModalityPath p) const {
    p.word = normal_form(p.word);
    return p;
  }

  Word normal_form(Word w) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t pos = 0; pos < w.size() && !changed; ++pos) {
        for (const auto& rule : rules_) {
          if (matches_at(w, rule.lhs, pos)) {
            w = splice(w, pos, rule.lhs.size(), rule.rhs);
            changed = true;
            break;
          }
        }
      }
    }
    return w;
  }

  /// Same boundary modes. A polymorphic identity is parallel to any endo-path.
  bool parallel(const ModalityPath& a, const ModalityPath& b) const {
    if (a.is_polymorphic() && b.is_polymorphic()) return true;
    if (a.is_polymorphic()) return b.source == b.target;
    if (b.is_polymorphic()) return a.source == a.target;
    return a.source == b.source && a.target == b.target;
  }

  /// Equality modulo the modality equations. Exact for confluent systems;
  /// otherwise a bounded search that can answer Unknown.
  WordComparison compare(const ModalityPath& a, const ModalityPath& b, std::size_t max_word_length = 8,
                         std::size_t max_states = 20000) const {
    if (!parallel(a, b)) return WordComparison::Different;
    Word na = normal_form(a.word);
    Word nb = normal_form(b.word);
    if (na == nb) return WordComparison::Equal;
    if (confluent_) return WordComparison::Different;

    std::set<Word> seen{na};
    std::deque<Word> queue{na};
    bool truncated = false;
    while (!queue.empty()) {
      if (seen.size() > max_states) return WordComparison::Unknown;
      Word w = queue.front();
      queue.pop_front();
      for (const Word& next : equation_neighbours(w, max_word_length, truncated)) {
        if (next == nb || normal_form(next) == nb) return WordComparison::Equal;
        if (seen.insert(next).second) queue.push_back(next);
      }
    }
    return truncated ? WordComparison::Unknown : WordComparison::Different;
  }

  bool hom_equal(const ModalityPath& a, const ModalityPath& b) const {
    return compare(a, b) == WordComparison::Equal;
  }

  /// Words reachable in one equational step (either direction), capped in length.
  std::vector<Word> equation_neighbours(const Word& w, std::size_t max_word_length, bool& truncated) const {
    std::vector<Word> out;
    auto replace_all = [&](const Word& from, const Word& to) {
      if (from.size() > w.size()) return;
      for (std::size_t pos = 0; pos + from.size() <= w.size(); ++pos) {
        if (!matches_at(w, from, pos)) continue;
        Word next = splice(w, pos, from.size(), to);
        if (next.size() > max_word_length) {
          truncated = true;
          continue;
        }
        out.push_back(std::move(next));
      }
    };
    for (const auto& rule : rules_) {
      replace_all(rule.lhs, rule.rhs);
      replace_all(rule.rhs, rule.lhs);
    }
    return out;
  }

  std::string show_word(const Word& w) const {
    if (w.empty()) return "1";
    std::string out;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      if (!out.empty()) out += " . ";
      out += modalities_.at(static_cast<std::size_t>(*it)).name;
    }
    return out;
  }

  /// Surface notation: applicative order joined by `.`, `1` or `1@mode` for identities.
  std::string show(const ModalityPath& p) const {
    if (p.word.empty()) return p.source == kAnyMode ? "1" : "1@" + mode_name(p.source);
    return show_word(p.word);
  }

  std::string show_mode(ModeId m) const { return mode_name(m); }

  /// Checks that consecutive generators chain and the endpoints agree.
  void validate_path(const ModalityPath& p) const {
    if (p.word.empty()) {
      if (p.source != p.target)
        throw ModeTheoryError(ModeTheoryError::Kind::BoundaryMismatch, "identity path with distinct endpoints");
      return;
    }
    ModeId cur = p.source;
    for (GenId g : p.word) {
      if (g < 0 || static_cast<std::size_t>(g) >= modalities_.size())
        throw ModeTheoryError(ModeTheoryError::Kind::UnknownName, "unknown modality generator");
      const auto& gen = modalities_[static_cast<std::size_t>(g)];
      if (gen.source != cur)
        throw ModeTheoryError(ModeTheoryError::Kind::BoundaryMismatch,
                              "modality '" + gen.name + "' starts at " + mode_name(gen.source) + ", expected " +
                                  mode_name(cur));
      cur = gen.target;
    }
    if (cur != p.target)
      throw ModeTheoryError(ModeTheoryError::Kind::BoundaryMismatch, "path endpoints disagree with its word");
  }

 private:
  static bool matches_at(const Word& w, const Word& pattern, std::size_t pos) {
    if (pos + pattern.size() > w.size()) return false;
    return std::equal(pattern.begin(), pattern.end(), w.begin() + static_cast<std::ptrdiff_t>(pos));
  }

  static Word splice(const Word& w, std::size_t pos, std::size_t len, const Word& with) {
    Word out(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(pos));
    out.insert(out.end(), with.begin(), with.end());
    out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(pos + len), w.end());
    return out;
  }

  void check_mode(ModeId m) const {
    if (m < 0 || static_cast<std::size_t>(m) >= modes_.size())
      throw ModeTheoryError(ModeTheoryError::Kind::UnknownName, "unknown mode");
  }

  // An unannotated `1` on one side of an equation or cell takes the other side's modes.
  static void unify_identity_modes(ModalityPath& a, ModalityPath& b) {
    if (a.is_polymorphic() && !b.is_polymorphic() && b.source == b.target) a = ModalityPath{b.source, b.target, {}};
    if (b.is_polymorphic() && !a.is_polymorphic() && a.source == a.target) b = ModalityPath{a.source, a.target, {}};
    if (a.is_polymorphic() && b.is_polymorphic())
      throw ModeTheoryError(ModeTheoryError::Kind::Malformed, "cannot infer the mode of `1 = 1`; write 1@mode");
  }

  // Overlap and inclusion critical pairs whose two one-step reducts have
  // distinct normal forms.
  std::vector<std::pair<Word, Word>> critical_pair_failures() const {
    std::vector<std::pair<Word, Word>> failures;
    auto check = [&](const Word& a, const Word& b) {
      Word na = normal_form(a), nb = normal_form(b);
      if (na != nb) failures.emplace_back(std::move(na), std::move(nb));
    };
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      for (std::size_t j = 0; j < rules_.size(); ++j) {
        const Word& l1 = rules_[i].lhs;
        const Word& l2 = rules_[j].lhs;
        // suffix of l1 == prefix of l2
        for (std::size_t k = 1; k < l1.size() && k < l2.size(); ++k) {
          if (!std::equal(l1.end() - static_cast<std::ptrdiff_t>(k), l1.end(), l2.begin())) continue;
          Word via1 = rules_[i].rhs;
          via1.insert(via1.end(), l2.begin() + static_cast<std::ptrdiff_t>(k), l2.end());
          Word via2(l1.begin(), l1.end() - static_cast<std::ptrdiff_t>(k));
          via2.insert(via2.end(), rules_[j].rhs.begin(), rules_[j].rhs.end());
          check(via1, via2);
        }
        // l2 inside l1
        if (i == j || l2.size() > l1.size()) continue;
        for (std::size_t pos = 0; pos + l2.size() <= l1.size(); ++pos) {
          if (!matches_at(l1, l2, pos)) continue;
          check(rules_[i].rhs, splice(l1, pos, l2.size(), rules_[j].rhs));
        }
      }
    }
    return failures;
  }

  std::string name_;
  std::vector<std::string> modes_;
  std::map<std::string, ModeId> mode_index_;
  std::vector<ModalityGenerator> modalities_;
  std::map<std::string, GenId> modality_index_;
  std::vector<CellGenerator> cells_;
  std::map<std::string, CellId> cell_index_;
  std::vector<ModalityEquation> equations_;
  std::vector<CellEquation> cell_equations_;
  std::vector<RewriteRule> rules_;
  std::set<ModeId> classical_;
  std::map<int, ModeId> atoms_;
  CellOracle oracle_ = CellOracle::Search;
  bool confluent_ = true;
  bool finalized_ = false;
};

/// Computes (from, to) of a cell expression, checking that composites are
/// boundary-compatible.
inline CellBoundary cell_boundary(const ModeTheory& mt, const Cell2& c) {
  switch (c.kind()) {
    case Cell2::Kind::Generator: {
      const auto& g = mt.cell(c.generator_id());
      return {g.from, g.to};
    }
    case Cell2::Kind::Identity:
      if (!c.identity_path())
        throw ModeTheoryError(ModeTheoryError::Kind::IllComposed, "`id` needs an explicit modality here");
      return {*c.identity_path(), *c.identity_path()};
    case Cell2::Kind::Vertical: {
      CellBoundary after = cell_boundary(mt, c.first());
      CellBoundary before = cell_boundary(mt, c.second());
      if (!mt.hom_equal(before.to, after.from))
        throw ModeTheoryError(ModeTheoryError::Kind::IllComposed,
                              "vertical composite mismatch: " + mt.show(before.to) + " vs " + mt.show(after.from));
      return {before.from, after.to};
    }
    case Cell2::Kind::Horizontal: {
      CellBoundary outer = cell_boundary(mt, c.first());
      CellBoundary inner = cell_boundary(mt, c.second());
      try {
        return {mt.compose(outer.from, inner.from), mt.compose(outer.to, inner.to)};
      } catch (const ModeTheoryError& e) {
        throw ModeTheoryError(ModeTheoryError::Kind::IllComposed, std::string("horizontal composite: ") + e.what());
      }
    }
  }
  throw ModeTheoryError(ModeTheoryError::Kind::IllComposed, "unknown cell");
}

}  // namespace modalcheck
