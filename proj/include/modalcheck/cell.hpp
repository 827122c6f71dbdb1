#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "modalcheck/path.hpp"

namespace modalcheck {

/// A 2-cell expression over the generating cells of a mode theory.
///
/// Vertical composites are written `after ∘ before`; horizontal composites
/// `outer ∗ inner`, where `outer` acts on the modality applied last. An
/// identity without a path is the surface `id`, whose boundary is fixed by the
/// variable it annotates.
class Cell2 {
 public:
  enum class Kind { Generator, Identity, Vertical, Horizontal };

  Cell2() : Cell2(std::make_shared<const Node>(Node{Kind::Identity, -1, std::nullopt, nullptr, nullptr})) {}

  static Cell2 generator(CellId id) {
    return Cell2(std::make_shared<const Node>(Node{Kind::Generator, id, std::nullopt, nullptr, nullptr}));
  }
  static Cell2 identity(ModalityPath p) {
    return Cell2(std::make_shared<const Node>(Node{Kind::Identity, -1, std::move(p), nullptr, nullptr}));
  }
  static Cell2 contextual_identity() { return Cell2(); }
  static Cell2 vertical(Cell2 after, Cell2 before) {
    return Cell2(std::make_shared<const Node>(
        Node{Kind::Vertical, -1, std::nullopt, std::move(after.node_), std::move(before.node_)}));
  }
  static Cell2 horizontal(Cell2 outer, Cell2 inner) {
    return Cell2(std::make_shared<const Node>(
        Node{Kind::Horizontal, -1, std::nullopt, std::move(outer.node_), std::move(inner.node_)}));
  }

  Kind kind() const { return node_->kind; }
  CellId generator_id() const { return node_->generator; }
  const std::optional<ModalityPath>& identity_path() const { return node_->path; }
  bool is_contextual_identity() const { return kind() == Kind::Identity && !node_->path; }

  /// `after` of a vertical composite, `outer` of a horizontal one.
  Cell2 first() const { return Cell2(node_->lhs); }
  /// `before` of a vertical composite, `inner` of a horizontal one.
  Cell2 second() const { return Cell2(node_->rhs); }

  friend bool operator==(const Cell2& a, const Cell2& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case Kind::Generator: return a.generator_id() == b.generator_id();
      case Kind::Identity: return a.identity_path() == b.identity_path();
      default: return a.first() == b.first() && a.second() == b.second();
    }
  }

 private:
  struct Node {
    Kind kind;
    CellId generator;
    std::optional<ModalityPath> path;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  explicit Cell2(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// after ∘ before, dropping identities that carry a path.
inline Cell2 compose_vertical(const Cell2& after, const Cell2& before) {
  if (before.kind() == Cell2::Kind::Identity && before.identity_path()) return after;
  if (after.kind() == Cell2::Kind::Identity && after.identity_path()) return before;
  return Cell2::vertical(after, before);
}

/// 1_outer ∗ cell ∗ 1_inner; whiskers by identity words are omitted.
inline Cell2 whisker(const ModalityPath& outer, const Cell2& cell, const ModalityPath& inner) {
  Cell2 result = cell;
  if (!inner.is_identity()) result = Cell2::horizontal(result, Cell2::identity(inner));
  if (!outer.is_identity()) result = Cell2::horizontal(Cell2::identity(outer), result);
  return result;
}

}  // namespace modalcheck
