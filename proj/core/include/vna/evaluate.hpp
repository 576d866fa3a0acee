#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "vna/algebra.hpp"
#include "vna/formula.hpp"
#include "vna/interval.hpp"

namespace vna {

// Free variables to unit-ball elements of one algebra.
using Assignment = std::map<std::string, AlgElement>;

struct WorkCounters {
  std::uint64_t point_evals = 0;
  std::uint64_t boxes = 0;
  std::uint64_t heuristic_steps = 0;
};

struct CertifiedValue {
  DyadicInterval interval;
  std::optional<Assignment> witness;  // attains the inner bound when present
  WorkCounters work;
  bool certified = true;  // false for heuristic one-sided results
};

struct EvalOptions {
  std::uint64_t seed = 1;
  int workers = 0;  // 0 -> read VNA_WORKERS, default 1
  std::uint64_t heuristic_budget = 4000;   // point evaluations for optimize
  std::uint64_t node_budget = 20'000'000;  // branch-and-bound box cap
  int dimension_cap = 10;                  // per-variable real dimension
  int saddle_rounds = 5;                   // exists-forall bracketing rounds
};

// Declared numeric slack for one double-precision evaluation of f:
// 2^-20 per AST node (plus a small constant for the bound arithmetic).
// Hugely conservative against actual double rounding; every certified
// interval is widened by it.
Dyadic eval_slack(const Formula& f);

// Structural evaluation of a star-term; the result stays in the unit ball
// whenever the assignment does.
AlgElement eval_term(const TracialAlgebra& a, const StarTerm& t, const Assignment& asg);

// Point evaluation of a quantifier-free formula.
double eval_qf(const TracialAlgebra& a, const Formula& f, const Assignment& asg);

// Heuristic multi-start projected local search for quantifier witnesses.
// The returned interval is one-sided honest: [best, M] for sup prefixes,
// [m, best] for inf, and [m, certified-upper-at-witness] for exists-forall.
CertifiedValue optimize(const TracialAlgebra& a, const FormulaPtr& sentence,
                        const EvalOptions& opts = {});

// Certified evaluation: branch-and-bound over per-variable entry boxes
// with Lipschitz pruning, returning an interval of width <= eps that
// provably contains the sentence value.  Supports universal, existential,
// and (by recursive inner certification) exists-forall prefixes.
CertifiedValue certify(const TracialAlgebra& a, const FormulaPtr& sentence,
                       const Dyadic& eps, const EvalOptions& opts = {});

int resolve_workers(const EvalOptions& opts);

}  // namespace vna
