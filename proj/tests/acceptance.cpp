// Acceptance suite: one [PASS]/[FAIL] line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <type_traits>
#include <vector>

#include "modalcheck/modalcheck.hpp"
#include "support/properties.hpp"
#include "support/random_terms.hpp"

using namespace modalcheck;
namespace fs = std::filesystem;

namespace {

// Pinned limits.
constexpr double kCorpusSeconds = 1.0;
constexpr double kPropertySeconds = 60.0;
constexpr int kLocksSamples = 1000;
constexpr int kPropertySamples = 500;
constexpr int kMaxTermSize = 12;
constexpr int kMaxPower = 5;

const fs::path kCorpus = MODALCHECK_CORPUS_DIR;

// Weakening must not accept a lock.
static_assert(!std::is_invocable_v<decltype(&weaken), const Checker&, const Derivation&, std::size_t, LockEntry>);
static_assert(std::is_invocable_v<decltype(&weaken), const Checker&, const Derivation&, std::size_t, Binding>);

int failed = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << id << ": " << detail << std::endl;
  if (!ok) ++failed;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Checks one declaration; returns an empty string on success.
std::string check_decl(const Module& mod, const std::string& name, CheckOptions opts = {}) {
  Checker c = make_checker(mod, opts);
  for (const auto& d : mod.declarations) {
    if (d.name != name) continue;
    try {
      c.check_declaration(d);
      return {};
    } catch (const std::exception& e) {
      return e.what();
    }
  }
  return "no declaration '" + name + "'";
}

void ac1_corpus() {
  struct Item {
    const char* label;
    const char* file;
    const char* decl;
  };
  const std::vector<Item> items{
      {"(a) unit under mu", "basics.mml", "unit_mu"},
      {"(b) K for implication", "basics.mml", "k_impl"},
      {"(b) K for conjunction, both directions", "basics.mml", "k_conj"},
      {"(c) conjunction elimination under mu", "basics.mml", "conj_elim"},
      {"(d) axiom 4 in k4-free", "k4.mml", "four"},
      {"(e) axiom 4 in s4-idem", "s4idem.mml", "four"},
      {"(f) T in t-free", "t.mml", "t"},
      {"(g) excluded middle for IntProv at cl", "intcl.mml", "lem_prov"},
  };
  auto t0 = std::chrono::steady_clock::now();
  std::string problems;
  for (const auto& it : items) {
    try {
      Module mod = load_module((kCorpus / it.file).string());
      std::string err = check_decl(mod, it.decl);
      if (!err.empty()) problems += std::string(it.label) + ": " + err + "; ";
    } catch (const std::exception& e) {
      problems += std::string(it.label) + ": " + e.what() + "; ";
    }
  }
  // (g) the same statement is rejected at int
  try {
    Module mod = load_module((kCorpus / "negative/lem-at-int.mml").string());
    if (check_decl(mod, "lem_prov").empty()) problems += "(g) lem accepted at int; ";
    Module plain = load_module((kCorpus / "negative/lem-int-plain.mml").string());
    if (check_decl(plain, "lem_plain").empty()) problems += "(g) lem for an int atom accepted at int; ";
  } catch (const std::exception& e) {
    problems += std::string("(g) negative: ") + e.what() + "; ";
  }
  double secs = seconds_since(t0);
  bool ok = problems.empty() && secs < kCorpusSeconds;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f s (limit %.1f s)", secs, kCorpusSeconds);
  report("AC1 corpus", ok, problems.empty() ? std::string("8 theorems check, lem rejected at int, ") + buf
                                             : problems + buf);
}

void ac2_negative() {
  // (a) axiom 4 in plain k
  {
    std::string detail = "no error";
    bool ok = false;
    try {
      Module mod = load_module((kCorpus / "negative/bad-cell.mml").string());
      make_checker(mod).check_declaration(mod.declarations.at(0));
    } catch (const TypeError& e) {
      ok = e.kind() == TypeError::Kind::CellMissing && e.search &&
           e.search->status == CellQueryResult::Status::NotFound;
      detail = std::string(kind_name(e.kind())) + "(" + (e.search ? to_string(e.search->status) : "-") + ")";
    } catch (const std::exception& e) {
      detail = e.what();
    }
    report("AC2a axiom 4 rejected in k", ok, detail);
  }
  // (b) <IntProv|p0> -> p0 at cl is not a formula
  {
    std::string detail;
    bool ok = true;
    auto expect_wf = [&](const char* file, bool strict) {
      try {
        Module mod = load_module((kCorpus / file).string());
        CheckOptions opts;
        opts.wf.strict_atoms = strict;
        make_checker(mod, opts).check_declaration(mod.declarations.at(0));
        ok = false;
        detail += std::string(file) + ": accepted; ";
      } catch (const WfError& e) {
        detail += std::string(file) + ": WfError." + kind_name(e.kind()) + "; ";
      } catch (const std::exception& e) {
        ok = false;
        detail += std::string(file) + ": " + e.what() + "; ";
      }
    };
    expect_wf("negative/illformed-strict.mml", true);
    expect_wf("negative/illformed.mml", false);
    report("AC2b reflection is ill-formed at cl", ok, detail);
  }
  report("AC2c weakening by a lock has no API", true, "static_assert on weaken's signature");
}

void ac3_coherence() {
  ModeTheory mt = builtin("s4-comonad");
  ModalityPath box = mt.generator(0);
  Cell2 id = Cell2::identity(box);
  Cell2 T = Cell2::generator(*mt.find_cell("T"));
  Cell2 F = Cell2::generator(*mt.find_cell("4"));
  MonotoneMap m_id = walking_comonad::evaluate(mt, id);
  MonotoneMap m_left = walking_comonad::evaluate(mt, Cell2::vertical(Cell2::horizontal(T, id), F));
  MonotoneMap m_right = walking_comonad::evaluate(mt, Cell2::vertical(Cell2::horizontal(id, T), F));
  MonotoneMap m_a = walking_comonad::evaluate(mt, Cell2::vertical(Cell2::horizontal(F, id), F));
  MonotoneMap m_b = walking_comonad::evaluate(mt, Cell2::vertical(Cell2::horizontal(id, F), F));
  // Hand-computed: the only maps [1] -> [1] and [3] -> [1].
  const MonotoneMap one{1, 1, {0}};
  const MonotoneMap three{3, 1, {0, 0, 0}};
  bool ok = m_id == one && m_left == one && m_right == one && m_a == three && m_b == three;
  report("AC3 walking-comonad coherence", ok,
         "id=" + to_string(m_id) + " (T*1)o4=" + to_string(m_left) + " (1*T)o4=" + to_string(m_right) +
             " (4*1)o4=" + to_string(m_a) + " (1*4)o4=" + to_string(m_b));
}

// Number of monotone maps [m] -> [n], by enumerating all n^m functions.
int brute_force_monotone(int m, int n) {
  if (m == 0) return 1;
  if (n == 0) return 0;
  int total = 1;
  for (int i = 0; i < m; ++i) total *= n;
  int count = 0;
  for (int code = 0; code < total; ++code) {
    std::vector<int> f;
    int c = code;
    for (int i = 0; i < m; ++i) f.push_back(c % n), c /= n;
    bool mono = true;
    for (int i = 1; i < m; ++i) mono = mono && f[i - 1] <= f[i];
    count += mono;
  }
  return count;
}

void ac4_oracle() {
  ModeTheory mt = builtin("s4-comonad");
  GenId b = 0;
  auto power = [&](int k) { return ModalityPath{0, 0, Word(static_cast<std::size_t>(k), b)}; };
  int cases = 0, agree = 0;
  std::string bad;
  for (int n = 0; n <= kMaxPower; ++n) {
    for (int m = 0; m <= kMaxPower; ++m) {
      ++cases;
      bool expected = brute_force_monotone(m, n) > 0;
      CellQueryResult r = cell_exists(mt, power(n), power(m));
      bool good = r.status != CellQueryResult::Status::Unknown && r.found() == expected;
      if (good && r.found()) {
        MonotoneMap w = walking_comonad::evaluate(mt, *r.witness);
        CellBoundary bd = cell_boundary(mt, *r.witness);
        good = w.domain == m && w.codomain == n && w.is_monotone() && mt.hom_equal(bd.from, power(n)) &&
               mt.hom_equal(bd.to, power(m));
      }
      if (good) ++agree;
      else bad += " (" + std::to_string(n) + "," + std::to_string(m) + ")";
    }
  }
  report("AC4 cell search vs monotone maps", agree == cases && cases == 36,
         std::to_string(agree) + "/" + std::to_string(cases) + " agree" + bad);
}

void ac5_locks() {
  std::string bad;
  int total = 0;
  for (const auto& name : builtin_names()) {
    ModeTheory mt = builtin(name);
    testing::TermGenerator gen(mt, 1234);
    for (int i = 0; i < kLocksSamples; ++i) {
      ModeId m = static_cast<ModeId>(gen.pick(static_cast<int>(mt.mode_count())));
      // Raw telescopes: locks are neither fused nor normalized.
      std::vector<ContextEntry> gamma, delta;
      ModeId cur = m;
      auto fill = [&](std::vector<ContextEntry>& out) {
        int n = gen.pick(5);
        for (int k = 0; k < n; ++k) {
          ModalityPath mu = gen.modality(cur, 2);
          if (gen.coin(0.6)) {
            out.push_back(LockEntry{mu});
            cur = mu.source;
          } else {
            out.push_back(Binding{gen.fresh(), mu, TypeExpr::top()});
          }
        }
      };
      fill(gamma);
      fill(delta);
      std::vector<ContextEntry> both = gamma;
      both.insert(both.end(), delta.begin(), delta.end());
      ModalityPath lhs = resolve_identity(locks_of(mt, both), cur);
      ModalityPath rhs = resolve_identity(mt.compose(resolve_identity(locks_of(mt, gamma), m),
                                                     resolve_identity(locks_of(mt, delta), cur)),
                                          cur);
      ++total;
      if (!mt.hom_equal(lhs, rhs) && bad.size() < 200) bad += " " + name + ":" + mt.show(lhs) + "/" + mt.show(rhs);
    }
  }
  report("AC5 locks homomorphism", bad.empty(),
         std::to_string(total) + " context pairs over " + std::to_string(builtin_names().size()) + " theories" + bad);
}

void ac6_properties() {
  auto t0 = std::chrono::steady_clock::now();
  int failures = 0, terms = 0, lw = 0, lw_moved = 0, sb = 0, sb_used = 0, ex = 0, steps = 0;
  std::string first;
  for (const auto& name : builtin_names()) {
    ModeTheory mt = builtin(name);
    auto r = testing::run_properties(mt, kPropertySamples, 20261015u, kMaxTermSize);
    failures += r.failures();
    terms += r.terms;
    lw += r.lock_weaken_checked;
    lw_moved += r.lock_weaken_moved;
    sb += r.substitute_checked;
    sb_used += r.substitute_used;
    ex += r.exchange_checked;
    steps += r.reduction_steps;
    if (r.terms < kPropertySamples) failures += 1, first += name + ": only " + std::to_string(r.terms) + " terms; ";
    if (first.empty() && !r.first_failure.empty()) first = name + ": " + r.first_failure;
  }
  double secs = seconds_since(t0);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f s (limit %.0f s)", secs, kPropertySeconds);
  std::string detail = std::to_string(terms) + " terms, " + std::to_string(lw) + " lock_weaken (" +
                       std::to_string(lw_moved) + " moved a cell), " + std::to_string(sb) + " substitute (" +
                       std::to_string(sb_used) + " with x free), " + std::to_string(ex) + " exchange, " +
                       std::to_string(steps) + " beta steps, " + std::to_string(failures) + " failures, " + buf;
  if (!first.empty()) detail += "\n    first failure: " + first;
  report("AC6 metatheorem properties", failures == 0 && secs < kPropertySeconds, detail);
}

void ac7_roundtrip() {
  int modules = 0, same = 0, derivations = 0, replayed = 0;
  std::string bad;
  for (const auto& entry : fs::recursive_directory_iterator(kCorpus)) {
    if (entry.path().extension() != ".mml") continue;
    ++modules;
    std::string file = entry.path().lexically_relative(kCorpus).string();
    try {
      Module mod = load_module(entry.path().string());
      std::string text = print_module(mod);
      Module again = parse_module(text, file_loader(entry.path().parent_path()));
      if (same_module(mod, again) && print_module(again) == text) ++same;
      else bad += " print:" + file;

      CheckOptions opts;
      opts.wf.strict_atoms = file.find("strict") != std::string::npos;
      Checker checker = make_checker(mod, opts);
      for (const auto& d : mod.declarations) {
        Derivation der;
        try {
          der = checker.check_declaration(d);
        } catch (const std::exception&) {
          continue;  // negative examples
        }
        ++derivations;
        nlohmann::json j = derivation_to_json(mod.theory, der);
        Derivation back = derivation_from_json(mod.theory, nlohmann::json::parse(j.dump()));
        std::string err = DerivationValidator(mod.theory, checker).validate(back);
        if (err.empty()) err = validate_proof_tree(mod.theory, erase(back));
        if (err.empty() && derivation_to_json(mod.theory, back) != j) err = "JSON differs after replay";
        if (err.empty()) ++replayed;
        else bad += " replay:" + file + "/" + d.name + " (" + err + ")";
      }
    } catch (const std::exception& e) {
      bad += " " + file + " (" + e.what() + ")";
    }
  }
  report("AC7 round trips", same == modules && replayed == derivations && bad.empty(),
         std::to_string(same) + "/" + std::to_string(modules) + " modules print-parse identical, " +
             std::to_string(replayed) + "/" + std::to_string(derivations) + " derivations replayed" + bad);
}

}  // namespace

int main() {
  ac1_corpus();
  ac2_negative();
  ac3_coherence();
  ac4_oracle();
  ac5_locks();
  ac6_properties();
  ac7_roundtrip();
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed;
}
