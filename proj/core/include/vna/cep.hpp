#pragma once

#include <span>
#include <string>
#include <vector>

#include "vna/evaluate.hpp"

namespace vna {

// The separation sentence of the interpolation construction:
//   inf_x max over *-monomials p of degree <= N of
//     max(|trRe(p(x)) - trRe(p(a))|, |trIm(p(x)) - trIm(p(a))|)
// with the reference traces embedded as dyadic constants.  Its value on
// the source algebra is 0 (witness x = a); a positive value elsewhere
// separates the two existential theories.
struct SeparationSentence {
  int degree_bound = 1;
  TracialAlgebra algebra = TracialAlgebra::matrix(1);
  std::vector<AlgElement> tuple;
  FormulaPtr sentence;                  // existential
  std::vector<std::string> monomials;  // canonical order, for reports
};

struct SeparationOptions {
  std::size_t monomial_limit = 4096;
  unsigned constant_bits = 24;  // reference traces rounded to 2^-24
};

SeparationSentence build_separation(int degree_bound, const TracialAlgebra& a,
                                    const std::vector<AlgElement>& tuple,
                                    const SeparationOptions& opts = {});

// Certified value of the sentence on each interpolation algebra
// t*B (+) (1-t)*A along the grid.
std::vector<std::pair<Dyadic, CertifiedValue>> interpolation_scan(
    const FormulaPtr& sentence, const TracialAlgebra& b, const TracialAlgebra& a,
    std::span<const Dyadic> grid, const Dyadic& eps, const EvalOptions& opts = {});

// Coefficient C with |value(t) - value(t')| <= C sqrt(|t - t'|) along the
// scan, derived from the sentence's trace leaves; there is no finite C when
// an explicit sqrt connective is present (returns +infinity then).
double scan_continuity_coeff(const Formula& f);

struct DistinctValues {
  std::vector<std::pair<Dyadic, DyadicInterval>> points;  // pairwise disjoint
  bool achieved = false;  // reached the requested count
  int requested = 0;
};

// The finite shadow of "continuum many values": provably pairwise-distinct
// certified values along the interpolation family.
DistinctValues distinct_values_demo(const FormulaPtr& sentence, const TracialAlgebra& b,
                                    const TracialAlgebra& a, int count, const Dyadic& eps,
                                    const EvalOptions& opts = {});

std::string scan_to_text(std::span<const std::pair<Dyadic, CertifiedValue>> scan);

}  // namespace vna
