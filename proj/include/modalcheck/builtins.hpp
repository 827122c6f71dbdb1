#pragma once

#include <string>
#include <string_view>

#include "modalcheck/mode_theory.hpp"

namespace modalcheck {

namespace detail {

inline ModalityPath box_power(const ModeTheory& mt, GenId box, std::size_t n) {
  ModeId m = mt.modalities()[static_cast<std::size_t>(box)].source;
  return ModalityPath{m, m, Word(n, box)};
}

inline ModeTheory single_box(const std::string& name) {
  ModeTheory mt;
  mt.set_name(name);
  ModeId bullet = mt.add_mode("bullet");
  mt.add_modality("box", bullet, bullet);
  return mt;
}

inline void add_agents(ModeTheory& mt, int agents, bool doxastic) {
  ModeId bullet = mt.add_mode("bullet");
  for (int i = 1; i <= agents; ++i) {
    std::string n = std::to_string(i);
    GenId k = mt.add_modality("K" + n, bullet, bullet);
    ModalityPath kp = mt.generator(k);
    mt.add_cell("T_K" + n, kp, mt.identity(bullet));
    mt.add_cell("4_K" + n, kp, ModalityPath{bullet, bullet, {k, k}});
    if (doxastic) {
      GenId b = mt.add_modality("B" + n, bullet, bullet);
      ModalityPath bp = mt.generator(b);
      mt.add_cell("Aristotle" + n, kp, bp);
      // K_i ∘ B_i stores B_i first
      mt.add_cell("Introsp" + n, bp, ModalityPath{bullet, bullet, {b, k}});
    }
  }
}

}  // namespace detail

/// The built-in mode theories:
///   k            free monoid on one box
///   k4-free      k plus `4 : box => box . box`
///   t-free       k plus `T : box => 1`
///   s4-comonad   the walking comonad (`T`, `4` and their coherence equations)
///   s4-idem      `box . box = box` plus `eps : box => 1`
///   epistemic    agents K_i with veridicality and positive introspection
///   doxastic     epistemic plus beliefs B_i, `Aristotle`, `Introsp`
///   int-cl       `IntProv : int -> cl`, classical mode cl
inline ModeTheory builtin(std::string_view name, int agents = 2) {
  const std::string n(name);
  if (n == "k") {
    ModeTheory mt = detail::single_box(n);
    mt.finalize();
    return mt;
  }
  if (n == "k4-free") {
    ModeTheory mt = detail::single_box(n);
    mt.add_cell("4", detail::box_power(mt, 0, 1), detail::box_power(mt, 0, 2));
    mt.finalize();
    return mt;
  }
  if (n == "t-free") {
    ModeTheory mt = detail::single_box(n);
    mt.add_cell("T", detail::box_power(mt, 0, 1), detail::box_power(mt, 0, 0));
    mt.finalize();
    return mt;
  }
  if (n == "s4-comonad") {
    ModeTheory mt = detail::single_box(n);
    ModalityPath box = detail::box_power(mt, 0, 1);
    CellId t = mt.add_cell("T", box, detail::box_power(mt, 0, 0));
    CellId four = mt.add_cell("4", box, detail::box_power(mt, 0, 2));
    Cell2 id_box = Cell2::identity(box);
    Cell2 T = Cell2::generator(t), F = Cell2::generator(four);
    mt.add_cell_equation(Cell2::vertical(Cell2::horizontal(T, id_box), F), id_box);
    mt.add_cell_equation(Cell2::vertical(Cell2::horizontal(id_box, T), F), id_box);
    mt.add_cell_equation(Cell2::vertical(Cell2::horizontal(F, id_box), F),
                         Cell2::vertical(Cell2::horizontal(id_box, F), F));
    mt.set_oracle(CellOracle::WalkingComonad);
    mt.finalize();
    return mt;
  }
  if (n == "s4-idem") {
    ModeTheory mt = detail::single_box(n);
    mt.add_equation(detail::box_power(mt, 0, 2), detail::box_power(mt, 0, 1));
    mt.add_cell("eps", detail::box_power(mt, 0, 1), detail::box_power(mt, 0, 0));
    mt.set_oracle(CellOracle::NormalFormPreorder);
    mt.finalize();
    return mt;
  }
  if (n == "epistemic" || n == "doxastic") {
    if (agents < 1) throw ModeTheoryError(ModeTheoryError::Kind::UnknownBuiltin, n + " needs at least one agent");
    ModeTheory mt;
    mt.set_name(n + "(" + std::to_string(agents) + ")");
    detail::add_agents(mt, agents, n == "doxastic");
    mt.finalize();
    return mt;
  }
  if (n == "int-cl") {
    ModeTheory mt;
    mt.set_name(n);
    ModeId in = mt.add_mode("int");
    ModeId cl = mt.add_mode("cl");
    mt.add_modality("IntProv", in, cl);
    mt.set_classical(cl);
    mt.finalize();
    return mt;
  }
  throw ModeTheoryError(ModeTheoryError::Kind::UnknownBuiltin, "unknown built-in mode theory '" + n + "'");
}

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"k",         "k4-free",  "t-free",   "s4-comonad",
                                              "s4-idem",   "epistemic", "doxastic", "int-cl"};
  return names;
}

}  // namespace modalcheck
