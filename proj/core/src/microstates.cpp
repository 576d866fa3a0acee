#include "vna/microstates.hpp"

#include "vna/errors.hpp"

namespace vna {

namespace {

TracialAlgebra level_algebra(int k) { return TracialAlgebra::matrix(1 << k); }

}  // namespace

MicrostateReport microstate_sequence(const FormulaPtr& sentence, int k_max,
                                     const Dyadic& eps, const EvalOptions& opts) {
  SentenceClass cls = classify(*sentence);
  if (cls != SentenceClass::Universal && cls != SentenceClass::Existential)
    throw PreconditionError("microstate_sequence: sentence must be universal or existential");
  if (k_max < 0) throw PreconditionError("microstate_sequence: k_max must be >= 0");

  MicrostateReport rep;
  rep.sentence = sentence;
  rep.cls = cls;
  for (int k = 0; k <= k_max; ++k) {
    TracialAlgebra a = level_algebra(k);
    LevelValue lv;
    lv.k = k;
    if (a.real_dimension() <= opts.dimension_cap) {
      lv.value = certify(a, sentence, eps, opts);
    } else {
      lv.value = optimize(a, sentence, opts);  // flagged non-certified
    }
    rep.levels.push_back(std::move(lv));
  }

  // verdict recomputed from the intervals: value_k <= value_{k+1} is
  // refutable only when lo_k > hi_{k+1} (and dually for existential)
  rep.monotone_consistent = true;
  for (std::size_t i = 0; i + 1 < rep.levels.size(); ++i) {
    const auto& cur = rep.levels[i].value.interval;
    const auto& nxt = rep.levels[i + 1].value.interval;
    if (cls == SentenceClass::Universal && cur.lo() > nxt.hi()) rep.monotone_consistent = false;
    if (cls == SentenceClass::Existential && nxt.lo() > cur.hi()) rep.monotone_consistent = false;
  }

  // best one-sided bound for the chain limit; heuristic levels still give
  // sound one-sided values (a witness is a witness)
  rep.bound_is_lower = cls == SentenceClass::Universal;
  bool first = true;
  for (const auto& lv : rep.levels) {
    Dyadic b = rep.bound_is_lower ? lv.value.interval.lo() : lv.value.interval.hi();
    if (first) {
      rep.chain_bound = b;
      first = false;
    } else {
      rep.chain_bound = rep.bound_is_lower ? Dyadic::max(rep.chain_bound, b)
                                           : Dyadic::min(rep.chain_bound, b);
    }
  }
  return rep;
}

std::string MicrostateReport::to_text() const {
  std::string s;
  for (const auto& lv : levels) {
    s += "k=" + std::to_string(lv.k) + " interval=" + lv.value.interval.str() +
         " tag=" + (lv.value.certified ? "certified" : "heuristic") + "\n";
  }
  s += std::string("monotone=") + (monotone_consistent ? "consistent" : "violated") + "\n";
  s += std::string("chain-") + (bound_is_lower ? "lower" : "upper") +
       "-bound=" + chain_bound.str() + "\n";
  return s;
}

CompareReport compare_universal(const FormulaPtr& sentence, const TracialAlgebra& a,
                                int k_max, const Dyadic& eps, const EvalOptions& opts) {
  if (classify(*sentence) != SentenceClass::Universal)
    throw PreconditionError("compare_universal: sentence must be universal");
  CompareReport rep;
  rep.lhs = certify(a, sentence, eps, opts);
  rep.chain = microstate_sequence(sentence, k_max, eps, opts);
  const auto& top = rep.chain.levels.back().value.interval;
  if (rep.lhs.interval.lo() > top.hi()) {
    rep.verdict = CompareVerdict::ProvablyAbove;
  } else if (rep.lhs.interval.hi() < top.lo()) {
    rep.verdict = CompareVerdict::ProvablyBelow;
  } else {
    rep.verdict = CompareVerdict::UndeterminedOrEqual;
  }
  return rep;
}

const char* verdict_name(CompareVerdict v) {
  switch (v) {
    case CompareVerdict::ProvablyAbove:
      return "provably-above";
    case CompareVerdict::ProvablyBelow:
      return "provably-below";
    case CompareVerdict::UndeterminedOrEqual:
      return "undetermined-or-equal";
  }
  return "?";
}

std::string CompareReport::to_text() const {
  std::string s = "algebra-interval=" + lhs.interval.str() + "\n";
  s += chain.to_text();
  s += std::string("verdict=") + verdict_name(verdict) + "\n";
  return s;
}

}  // namespace vna
