// Batch front door: parse one subcommand, run it, print the report.
//
// Exit codes: 0 ok, 2 parse error, 3 precondition violation, 4 resource cap.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "vna/cli.hpp"

namespace {

vna::Dyadic parse_dyadic_flag(const std::string& text, const std::string& what) {
  auto d = vna::try_parse_dyadic(text);
  if (!d) {
    std::cerr << what << ": expected a dyadic like 1/2^3, got '" << text << "'\n";
    std::exit(vna::kExitParse);
  }
  return *d;
}

std::string load_if_file(const std::string& maybe_path) {
  std::ifstream in(maybe_path);
  if (!in) return maybe_path;  // treat as literal
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for continuous-logic values over finite-dimensional "
               "tracial algebras"};
  app.require_subcommand(1);

  vna::RunConfig cfg;
  std::string eps_text = "1/2^4";
  std::string grid_text;
  std::string formula_file;
  std::string output_path;

  auto add_common = [&](CLI::App* sub, bool with_formula = true) {
    if (with_formula) {
      sub->add_option("--formula", cfg.formula, "formula literal");
      sub->add_option("--formula-file", formula_file, "file containing the formula");
    }
    sub->add_option("--eps", eps_text, "interval width target, dyadic (default 1/2^4)");
    sub->add_option("--seed", cfg.seed, "deterministic seed");
    sub->add_option("--budget", cfg.budget, "heuristic evaluation budget");
    sub->add_option("--output", output_path, "write the report to a file instead of stdout");
    sub->add_flag("--json", cfg.json_output, "emit the report as JSON");
  };

  CLI::App* c_eval = app.add_subcommand("eval", "heuristic one-sided value of a sentence");
  c_eval->add_option("--algebra", cfg.algebra, "algebra: M<n>, blocks spec, or file")->required();
  add_common(c_eval);

  CLI::App* c_cert = app.add_subcommand("certify", "certified interval for a sentence");
  c_cert->add_option("--algebra", cfg.algebra, "algebra: M<n>, blocks spec, or file")->required();
  add_common(c_cert);

  CLI::App* c_micro = app.add_subcommand("microstates", "values along the chain M_1, M_2, M_4, ...");
  c_micro->add_option("--algebra", cfg.algebra, "optional comparison algebra");
  c_micro->add_option("--kmax", cfg.k_max, "last chain level (algebra M_{2^k})");
  add_common(c_micro);

  CLI::App* c_interp = app.add_subcommand("interpolate", "certified scan of t*B (+) (1-t)*A");
  c_interp->add_option("--A", cfg.algebra, "algebra A (the t=0 end)")->required();
  c_interp->add_option("--B", cfg.algebra_b, "algebra B (the t=1 end)")->required();
  c_interp->add_option("--grid", grid_text, "comma-separated dyadic grid points in [0,1]");
  c_interp->add_option("--count", cfg.count, "also demand this many pairwise-disjoint values");
  add_common(c_interp);

  CLI::App* c_sep = app.add_subcommand("separation", "build and certify a separation sentence");
  c_sep->add_option("--algebra", cfg.algebra, "source algebra")->required();
  c_sep->add_option("--a", cfg.tuple_json, "tuple as JSON: [element,...], element = blocks of rows")
      ->required();
  c_sep->add_option("--N", cfg.degree, "monomial degree bound");
  c_sep->add_option("--against", cfg.algebra_b, "also certify on this algebra");
  add_common(c_sep, false);

  CLI::App* c_wit = app.add_subcommand("witness", "good-witness dovetailer over a presentation");
  c_wit->add_option("--presentation", cfg.presentation,
                    "code file or demo:<algebra>:<count>:<seed>[:<arity>]")->required();
  c_wit->add_option("--steps", cfg.steps, "scan cap");
  add_common(c_wit);

  CLI::App* c_ea = app.add_subcommand("enumerate-ea", "upper bounds for an exists-forall sentence");
  c_ea->add_option("--presentation", cfg.presentation,
                   "code file or demo:<algebra>:<count>:<seed>[:<arity>]")->required();
  c_ea->add_option("--steps", cfg.steps, "number of enumeration steps");
  add_common(c_ea);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : vna::kExitParse;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.eps = parse_dyadic_flag(eps_text, "--eps");
  if (!formula_file.empty()) cfg.formula = load_if_file(formula_file);
  if (!grid_text.empty()) {
    std::stringstream ss(grid_text);
    std::string item;
    while (std::getline(ss, item, ',')) cfg.grid.push_back(parse_dyadic_flag(item, "--grid"));
  }
  // algebra flags may name files
  if (!cfg.algebra.empty() && cfg.algebra.find("blocks:") == std::string::npos &&
      !(cfg.algebra[0] == 'M'))
    cfg.algebra = load_if_file(cfg.algebra);
  if (!cfg.algebra_b.empty() && cfg.algebra_b.find("blocks:") == std::string::npos &&
      !(cfg.algebra_b[0] == 'M'))
    cfg.algebra_b = load_if_file(cfg.algebra_b);

  vna::RunReport rep = vna::dispatch(cfg);
  if (rep.status != 0) {
    std::cerr << rep.text;
    return rep.status;
  }
  if (!output_path.empty()) {
    std::ofstream out(output_path);
    out << rep.text;
  } else {
    std::cout << rep.text;
  }
  return rep.status;
}
