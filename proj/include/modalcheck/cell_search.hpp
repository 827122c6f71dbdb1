#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "modalcheck/mode_theory.hpp"
#include "modalcheck/walking_comonad.hpp"

namespace modalcheck {

struct SearchBudget {
  int max_steps = 6;             // generator applications along a witness
  std::size_t max_word_length = 8;
};

struct CellQueryResult {
  enum class Status { Found, NotFound, Unknown };

  Status status = Status::NotFound;
  std::optional<Cell2> witness;
  std::size_t explored = 0;  // distinct words visited
  std::size_t frontier = 0;  // words left unexpanded when the budget ran out

  bool found() const { return status == Status::Found; }
};

inline const char* to_string(CellQueryResult::Status s) {
  switch (s) {
    case CellQueryResult::Status::Found: return "Found";
    case CellQueryResult::Status::NotFound: return "NotFound";
    case CellQueryResult::Status::Unknown: return "Unknown";
  }
  return "?";
}

namespace detail {

struct SearchEdge {
  Word parent;
  Cell2 step;
};

// Every representative of the class of `w` within the length cap.
inline std::vector<Word> class_representatives(const ModeTheory& mt, const Word& w, std::size_t max_len,
                                               bool& truncated) {
  if (mt.rules().empty()) return {w};
  std::set<Word> seen{w};
  std::vector<Word> order{w};
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order.size() > 4096) {
      truncated = true;
      break;
    }
    for (Word& next : mt.equation_neighbours(order[i], max_len, truncated))
      if (seen.insert(next).second) order.push_back(std::move(next));
  }
  return order;
}

// Splits `w` (from `source`) into the prefix path before `pos` and suffix after pos+len.
inline std::pair<ModalityPath, ModalityPath> whiskers(const ModeTheory& mt, const Word& w, ModeId source,
                                                      std::size_t pos, std::size_t len) {
  ModeId cut1 = pos == 0 ? source : mt.modalities()[static_cast<std::size_t>(w[pos - 1])].target;
  ModalityPath inner{source, cut1, Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(pos))};
  ModeId cut2 = len == 0 ? cut1 : mt.modalities()[static_cast<std::size_t>(w[pos + len - 1])].target;
  ModeId end = w.empty() ? source : mt.modalities()[static_cast<std::size_t>(w.back())].target;
  ModalityPath outer{cut2, end, Word(w.begin() + static_cast<std::ptrdiff_t>(pos + len), w.end())};
  return {outer, inner};
}

}  // namespace detail

/// Decides whether a 2-cell from => to exists, returning a witness pasting.
///
/// For searched theories each step rewrites one occurrence of a generator's
/// source word inside a representative of the current class (whiskering by the
/// untouched prefix and suffix). NotFound is only reported when the reachable
/// space was exhausted without hitting either budget cap.
inline CellQueryResult cell_exists(const ModeTheory& mt, const ModalityPath& from, const ModalityPath& to,
                                   const SearchBudget& budget = {}) {
  if (!mt.parallel(from, to))
    throw ModeTheoryError(ModeTheoryError::Kind::BoundaryMismatch,
                          "cell query between non-parallel modalities " + mt.show(from) + " and " + mt.show(to));
  ModeId source = from.is_polymorphic() ? to.source : from.source;
  ModeId target = from.is_polymorphic() ? to.target : from.target;
  ModalityPath start_path = from.is_polymorphic() ? ModalityPath{source, target, {}} : from;

  CellQueryResult result;
  if (mt.hom_equal(from, to)) {
    result.status = CellQueryResult::Status::Found;
    result.witness = Cell2::identity(start_path);
    result.explored = 1;
    return result;
  }

  if (mt.oracle() == CellOracle::WalkingComonad && walking_comonad::single_box_theory(mt)) {
    int n = static_cast<int>(from.word.size());
    int m = static_cast<int>(to.word.size());
    result.explored = 1;
    if (walking_comonad::exists(n, m)) {
      result.status = CellQueryResult::Status::Found;
      result.witness = walking_comonad::witness(mt, n, m);
    }
    return result;
  }

  const bool exact = mt.oracle() == CellOracle::NormalFormPreorder;
  const std::size_t max_len = exact ? std::max<std::size_t>(budget.max_word_length, 64) : budget.max_word_length;
  const int max_steps = exact ? 1 << 20 : budget.max_steps;

  // Length monotonicity lets us prune hopeless branches in equation-free theories.
  bool nondecreasing = true, nonincreasing = true;
  for (const auto& g : mt.cells()) {
    if (g.to.word.size() < g.from.word.size()) nondecreasing = false;
    if (g.to.word.size() > g.from.word.size()) nonincreasing = false;
  }
  const bool prune = mt.rules().empty();

  const Word start = mt.normal_form(start_path.word);
  const Word goal = mt.normal_form(to.word);
  std::map<Word, std::optional<detail::SearchEdge>> visited;
  visited.emplace(start, std::nullopt);
  std::vector<Word> frontier{start};
  bool truncated = false;

  auto reconstruct = [&](const Word& end) {
    std::vector<Cell2> steps;
    Word cur = end;
    while (visited.at(cur)) {
      const auto& edge = *visited.at(cur);
      steps.push_back(edge.step);
      cur = edge.parent;
    }
    Cell2 acc = steps.back();
    for (auto it = steps.rbegin() + 1; it != steps.rend(); ++it) acc = Cell2::vertical(*it, acc);
    return acc;
  };

  for (int depth = 0; depth < max_steps && !frontier.empty(); ++depth) {
    std::vector<Word> next_frontier;
    for (const Word& state : frontier) {
      for (const Word& rep : exact ? std::vector<Word>{state}
                                   : detail::class_representatives(mt, state, max_len, truncated)) {
        for (std::size_t c = 0; c < mt.cells().size(); ++c) {
          const auto& gen = mt.cells()[c];
          Word pattern = exact ? mt.normal_form(gen.from.word) : gen.from.word;
          if (pattern.size() > rep.size()) continue;
          for (std::size_t pos = 0; pos + pattern.size() <= rep.size(); ++pos) {
            if (!std::equal(pattern.begin(), pattern.end(), rep.begin() + static_cast<std::ptrdiff_t>(pos))) continue;
            // an empty source word matches at every cut point whose mode fits
            ModeId at = pos == 0 ? source : mt.modalities()[static_cast<std::size_t>(rep[pos - 1])].target;
            if (gen.from.source != at) continue;
            Word raw(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(pos));
            raw.insert(raw.end(), gen.to.word.begin(), gen.to.word.end());
            raw.insert(raw.end(), rep.begin() + static_cast<std::ptrdiff_t>(pos + pattern.size()), rep.end());
            if (raw.size() > max_len) {
              truncated = true;
              continue;
            }
            Word next = mt.normal_form(raw);
            if (prune && nondecreasing && next.size() > goal.size()) continue;
            if (prune && nonincreasing && next.size() < goal.size()) continue;
            if (visited.count(next)) continue;
            auto [outer, inner] = detail::whiskers(mt, rep, source, pos, pattern.size());
            visited.emplace(next, detail::SearchEdge{state, whisker(outer, Cell2::generator(static_cast<CellId>(c)), inner)});
            if (next == goal) {
              result.status = CellQueryResult::Status::Found;
              result.witness = reconstruct(next);
              result.explored = visited.size();
              return result;
            }
            next_frontier.push_back(std::move(next));
          }
        }
      }
    }
    frontier = std::move(next_frontier);
  }

  result.explored = visited.size();
  result.frontier = frontier.size();
  result.status = (frontier.empty() && !truncated) ? CellQueryResult::Status::NotFound
                                                   : CellQueryResult::Status::Unknown;
  if (exact) result.status = CellQueryResult::Status::NotFound;
  return result;
}

}  // namespace modalcheck
