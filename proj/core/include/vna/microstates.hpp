#pragma once

#include <string>
#include <vector>

#include "vna/evaluate.hpp"

namespace vna {

// One rung of the matrix chain M_1 ⊂ M_2 ⊂ M_4 ⊂ ...
struct LevelValue {
  int k = 0;  // algebra is M_{2^k}
  CertifiedValue value;
};

// Certified (or heuristic, flagged) values of one sentence along the chain,
// with the monotonicity verdict recomputed from the reported intervals and
// an honesty-tagged bound for the chain limit: a lower bound for universal
// sentences, an upper bound for existential ones.  The tool never claims a
// value "for the limit", only these one-sided bounds.
struct MicrostateReport {
  FormulaPtr sentence;
  SentenceClass cls = SentenceClass::Universal;
  std::vector<LevelValue> levels;
  bool monotone_consistent = true;
  Dyadic chain_bound;
  bool bound_is_lower = true;

  std::string to_text() const;  // one record per level: k, interval, tag
};

MicrostateReport microstate_sequence(const FormulaPtr& sentence, int k_max,
                                     const Dyadic& eps, const EvalOptions& opts = {});

enum class CompareVerdict { ProvablyAbove, ProvablyBelow, UndeterminedOrEqual };

struct CompareReport {
  CertifiedValue lhs;  // certified value on the compared algebra
  MicrostateReport chain;
  CompareVerdict verdict = CompareVerdict::UndeterminedOrEqual;

  std::string to_text() const;
};

// The finite-dimensional shadow of the universal-theory comparison loop:
// certify the sentence on A, certify it along the chain, and report how the
// two relate at this precision.
CompareReport compare_universal(const FormulaPtr& sentence, const TracialAlgebra& a,
                                int k_max, const Dyadic& eps, const EvalOptions& opts = {});

const char* verdict_name(CompareVerdict v);

}  // namespace vna
