// modalcheck: check proof modules, query 2-cells, evaluate terms.
//
// Exit codes: 0 success, 1 a declaration was rejected, 2 usage/parse/IO error.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "modalcheck/modalcheck.hpp"

using namespace modalcheck;
using nlohmann::json;

namespace {

struct Diagnostic {
  std::string file;
  Span span;
  std::string severity = "error";
  std::string code;
  std::string message;
  std::optional<CellQueryResult> search;
};

bool use_color() {
  const char* c = std::getenv("MODALCHECK_COLOR");
  if (!c) return false;
  std::string v(c);
  return v == "1" || v == "always" || v == "yes";
}

std::string paint(const std::string& s, const char* code) {
  return use_color() ? std::string("\x1b[") + code + "m" + s + "\x1b[0m" : s;
}

json to_json(const Diagnostic& d, const SearchBudget& budget) {
  json j{{"file", d.file},
         {"line", d.span.line},
         {"column", d.span.column},
         {"severity", d.severity},
         {"code", d.code},
         {"message", d.message}};
  if (d.search)
    j["search"] = {{"status", to_string(d.search->status)},
                   {"depth", budget.max_steps},
                   {"max_word_length", budget.max_word_length},
                   {"explored", d.search->explored},
                   {"frontier", d.search->frontier}};
  return j;
}

void print(const Diagnostic& d) {
  std::cout << d.file;
  if (d.span.known()) std::cout << ":" << to_string(d.span);
  std::cout << ": " << paint(d.severity, "31") << "[" << d.code << "]: " << d.message << "\n";
}

bool by_location(const Diagnostic& a, const Diagnostic& b) {
  if (a.file != b.file) return a.file < b.file;
  return a.span < b.span;
}

// Loads a module, turning front-end failures into a diagnostic.
std::optional<Module> load(const std::string& path, bool unsafe, std::vector<Diagnostic>& out) {
  try {
    return load_module(path, unsafe);
  } catch (const DuplicateName& e) {
    out.push_back({path, e.span(), "error", "DuplicateName", e.what(), {}});
  } catch (const ParseError& e) {
    out.push_back({path, e.span(), "error", "ParseError", e.what(), {}});
  } catch (const LocatedModeTheoryError& e) {
    out.push_back({path, e.span(), "error", std::string("ModeTheory.") + kind_name(e.kind()), e.what(), {}});
  } catch (const ModeTheoryError& e) {
    out.push_back({path, {}, "error", std::string("ModeTheory.") + kind_name(e.kind()), e.what(), {}});
  } catch (const std::runtime_error& e) {
    out.push_back({path, {}, "error", "IOError", e.what(), {}});
  }
  return std::nullopt;
}

struct CheckFlags {
  std::vector<std::string> files;
  bool json = false;
  int depth = 6;
  std::size_t max_word_length = 8;
  bool strict_atoms = false;
  bool unsafe = false;
};

int cmd_check(const CheckFlags& f) {
  CheckOptions opts;
  opts.budget = {f.depth, f.max_word_length};
  opts.wf.strict_atoms = f.strict_atoms;
  std::vector<Diagnostic> diags;
  json files = json::array();
  bool io_failure = false, rejected = false;

  for (const auto& path : f.files) {
    auto mod = load(path, f.unsafe, diags);
    if (!mod) {
      io_failure = true;
      continue;
    }
    Checker checker = make_checker(*mod, opts);
    const ModeTheory& mt = mod->theory;
    json decls = json::array();
    for (const auto& d : mod->declarations) {
      json entry{{"name", d.name}, {"mode", mt.mode_name(d.mode)}};
      try {
        Derivation der = checker.check_declaration(d);
        entry["status"] = "ok";
        entry["type"] = print_type(mt, der.type);
        entry["derivation"] = derivation_to_json(mt, der);
        if (!f.json)
          std::cout << path << ": " << paint("ok", "32") << " " << d.name << " : " << print_type(mt, der.type)
                    << " at " << mt.mode_name(d.mode) << "\n";
      } catch (const TypeError& e) {
        rejected = true;
        entry["status"] = "error";
        Diagnostic g{path, e.span(), "error", std::string("TypeError.") + kind_name(e.kind()), e.what(), e.search};
        if (!g.span.known()) g.span = d.span;
        diags.push_back(g);
      } catch (const WfError& e) {
        rejected = true;
        entry["status"] = "error";
        diags.push_back({path, d.span, "error", std::string("WfError.") + kind_name(e.kind()), e.what(), {}});
      }
      decls.push_back(entry);
    }
    files.push_back({{"file", path}, {"theory", mt.name()}, {"declarations", decls}});
  }

  std::stable_sort(diags.begin(), diags.end(), by_location);
  if (f.json) {
    json ds = json::array();
    for (const auto& d : diags) ds.push_back(to_json(d, opts.budget));
    std::cout << json{{"schema", "modalcheck/check/v1"}, {"files", files}, {"diagnostics", ds}}.dump(2) << "\n";
  } else {
    for (const auto& d : diags) print(d);
  }
  if (io_failure) return 2;
  return rejected ? 1 : 0;
}

struct CellsFlags {
  std::string theory, from, to;
  int depth = 6;
  std::size_t max_word_length = 8;
  bool json = false;
};

int cmd_cells(const CellsFlags& f) {
  ModeTheory mt;
  ModalityPath from, to;
  try {
    mt = load_theory(f.theory);
    from = parse_path(mt, f.from);
    to = parse_path(mt, f.to);
  } catch (const std::exception& e) {
    std::cerr << "modalcheck cells: " << e.what() << "\n";
    return 2;
  }
  // A bare `1` is pinned to the other side's mode, or the only mode.
  ModeId pin = !from.is_polymorphic() ? from.target : !to.is_polymorphic() ? to.target : 0;
  from = resolve_identity(from, pin);
  to = resolve_identity(to, pin);
  if (!mt.parallel(from, to)) {
    std::cerr << "modalcheck cells: " << mt.show(from) << " and " << mt.show(to) << " are not parallel\n";
    return 2;
  }
  CellQueryResult r = cell_exists(mt, from, to, {f.depth, f.max_word_length});
  std::optional<MonotoneMap> map;
  if (r.found() && mt.oracle() == CellOracle::WalkingComonad) map = walking_comonad::evaluate(mt, *r.witness);

  if (f.json) {
    json j{{"schema", "modalcheck/cells/v1"},
           {"theory", mt.name()},
           {"from", mt.show(from)},
           {"to", mt.show(to)},
           {"status", to_string(r.status)},
           {"depth", f.depth},
           {"max_word_length", f.max_word_length},
           {"explored", r.explored},
           {"frontier", r.frontier}};
    if (r.witness) j["witness"] = print_cell(mt, *r.witness);
    if (map) j["monotone_map"] = to_string(*map);
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << to_string(r.status);
  if (r.found()) std::cout << " " << print_cell(mt, *r.witness) << " : " << mt.show(from) << " => " << mt.show(to);
  std::cout << "\n";
  if (map) std::cout << "monotone map " << to_string(*map) << "\n";
  if (r.status == CellQueryResult::Status::Unknown)
    std::cout << "budget: depth " << f.depth << ", word length " << f.max_word_length << ", " << r.frontier
              << " word(s) unexpanded\n";
  return 0;
}

struct EvalFlags {
  std::string file, decl;
  std::size_t fuel = 100;
  bool weak = false;
  bool trace = false;
};

int cmd_eval(const EvalFlags& f) {
  std::vector<Diagnostic> diags;
  auto mod = load(f.file, false, diags);
  if (!mod) {
    for (const auto& d : diags) print(d);
    return 2;
  }
  auto it = std::find_if(mod->declarations.begin(), mod->declarations.end(),
                         [&](const Declaration& d) { return d.name == f.decl; });
  if (it == mod->declarations.end()) {
    std::cerr << "modalcheck eval: no declaration '" << f.decl << "' in " << f.file << "\n";
    return 2;
  }
  const ModeTheory& mt = mod->theory;
  Checker checker = make_checker(*mod);
  Derivation der;
  try {
    der = checker.check_declaration(*it);
  } catch (const TypeError& e) {
    print({f.file, e.span(), "error", std::string("TypeError.") + kind_name(e.kind()), e.what(), e.search});
    return 1;
  } catch (const WfError& e) {
    print({f.file, it->span, "error", std::string("WfError.") + kind_name(e.kind()), e.what(), {}});
    return 1;
  }
  Context scope;
  scope.mode = der.mode;
  Normalization n = normalize(mt, der.subject, f.fuel, scope, f.weak);
  if (f.trace) {
    std::cout << trace_to_json(mt, der.subject, n).dump(2) << "\n";
    return 0;
  }
  if (n.exhausted)
    std::cout << "FuelExhausted after " << n.fuel_used << " step(s): " << print_term(mt, n.result) << "\n";
  else
    std::cout << print_term(mt, n.result) << "\n" << n.fuel_used << " step(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modalcheck: proof checker for multimodal intuitionistic logic"};
  app.require_subcommand(1);

  CheckFlags check;
  auto* c = app.add_subcommand("check", "check every declaration in the given modules");
  c->add_option("files", check.files, "module files (.mml)")->required();
  c->add_flag("--json", check.json, "emit derivations and diagnostics as JSON");
  c->add_option("--search-depth", check.depth, "cell search: generator applications")->check(CLI::NonNegativeNumber);
  c->add_option("--max-word-length", check.max_word_length, "cell search: longest intermediate word");
  c->add_flag("--strict-atoms", check.strict_atoms, "atoms are formulas only at their declared mode");
  c->add_flag("--unsafe-rewriting", check.unsafe, "accept non-confluent modality equations");

  CellsFlags cells;
  auto* q = app.add_subcommand("cells", "search for a 2-cell between two modalities");
  q->add_option("theory", cells.theory, "built-in theory name or .mtt file")->required();
  q->add_option("from", cells.from, "source modality word")->required();
  q->add_option("to", cells.to, "target modality word")->required();
  q->add_option("--depth", cells.depth, "generator applications")->check(CLI::NonNegativeNumber);
  q->add_option("--max-word-length", cells.max_word_length, "longest intermediate word");
  q->add_flag("--json", cells.json, "emit the report as JSON");

  EvalFlags eval;
  auto* e = app.add_subcommand("eval", "beta-normalize a checked declaration");
  e->add_option("file", eval.file, "module file")->required();
  e->add_option("decl", eval.decl, "declaration name")->required();
  e->add_option("--fuel", eval.fuel, "maximum number of beta steps");
  e->add_flag("--weak", eval.weak, "do not reduce under lambdas or boxes");
  e->add_flag("--trace", eval.trace, "emit the reduction trace as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }
  if (*c) return cmd_check(check);
  if (*q) return cmd_cells(cells);
  if (*e) return cmd_eval(eval);
  return 2;
}
