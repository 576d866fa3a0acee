#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vna/evaluate.hpp"
#include "vna/interval.hpp"

namespace vna {

// An enumerated generating sequence over a finite-dimensional carrier with
// an interval oracle for term traces on the 2^-n precision schedule.  The
// countably infinite generator sequence of a presented algebra is modeled
// either by a finite list (optionally cycled) or by a deterministic seeded
// rule, so the dovetailing algorithms below keep their unbounded-scan shape.
class Presentation {
public:
  enum class GenKind : std::uint8_t { Finite = 0, FiniteCycled = 1, SeededRule = 2 };

  static Presentation finite(TracialAlgebra carrier, std::vector<AlgElement> gens,
                             int tuple_arity = 1, bool cycle = false);
  static Presentation seeded_rule(TracialAlgebra carrier, std::uint64_t seed,
                                  int tuple_arity = 1);

  const TracialAlgebra& carrier() const { return carrier_; }
  int tuple_arity() const { return arity_; }
  GenKind gen_kind() const { return kind_; }
  const std::vector<AlgElement>& finite_gens() const { return gens_; }
  std::uint64_t rule_seed() const { return seed_; }

  // i-th generator; nullopt when a non-cycled finite list is exhausted.
  std::optional<AlgElement> generator(std::size_t i) const;

  // i-th candidate tuple of the dovetailing enumeration: all arity-tuples
  // of generator indices, graded by their largest index.
  std::optional<std::vector<std::size_t>> tuple_indices(std::size_t i) const;

  // Width-2^-n dyadic interval around the Re or Im trace of f at the
  // indexed generators (f's free variables in sorted order).  Intervals
  // for increasing n are nested and contain the value.
  DyadicInterval enumerate_value(const TermPtr& f, std::span<const std::size_t> indices,
                                 unsigned n, TracePart channel) const;

  // Largest n whose 2^-(n+1) half-width still dominates the declared
  // evaluation slack of f.
  unsigned max_precision(const TermPtr& f) const;

  bool operator==(const Presentation& o) const;

private:
  Presentation() : carrier_(TracialAlgebra::matrix(1)) {}

  TracialAlgebra carrier_;
  int arity_ = 1;
  GenKind kind_ = GenKind::Finite;
  std::vector<AlgElement> gens_;
  std::uint64_t seed_ = 0;
};

// Canonical byte serialization standing in for the single-number code:
// versioned header, block table, generator matrices as dyadic pairs,
// little-endian throughout.  Equal presentations encode identically.
using GoedelCode = std::vector<std::uint8_t>;

GoedelCode encode(const Presentation& p);
Presentation decode(const GoedelCode& code);  // ParseError on malformed bytes

// Interval evaluation of a quantifier-free formula through the oracle at
// precision n; exact dyadic arithmetic above the oracle leaves.
DyadicInterval oracle_eval_qf(const Presentation& p, const Formula& f,
                              const std::vector<std::pair<std::string, std::size_t>>& binding,
                              unsigned n);

struct WitnessResult {
  std::size_t index = 0;          // the good index N
  DyadicInterval reference;       // certified interval for the sentence value
  DyadicInterval achieved;        // oracle interval for phi(a_N)
  WorkCounters work;
};

// The dovetailer: certify a reference interval [c, d] for the universal
// sentence, then scan the enumerated tuples at increasing oracle precision
// until one provably reaches c - eps/2.  The returned index N satisfies
// value <= max_{i<=N} phi(a_i) + eps.
WitnessResult good_witness(const GoedelCode& code, const FormulaPtr& sentence,
                           const Dyadic& eps, const EvalOptions& opts = {},
                           std::size_t step_cap = 4096);

struct EaBound {
  std::size_t step = 0;
  std::vector<std::size_t> indices;
  DyadicInterval inner;  // certified interval for sup_y phi(a, y)
  Dyadic upper;          // emitted bound: value <= upper
};

struct EaRun {
  std::vector<EaBound> bounds;
  std::string to_text() const;  // one "bound <= s" record per line
};

// Upper enumeration for exists-forall sentences: every emitted bound is a
// sound upper bound for the sentence value, and the running minimum is
// nonincreasing.
EaRun upper_enumerate_ea(const Presentation& p, const FormulaPtr& sentence,
                         const Dyadic& eps, std::size_t steps,
                         const EvalOptions& opts = {});

}  // namespace vna
