#pragma once

#include <map>
#include <string>
#include <string_view>

#include "vna/algebra.hpp"
#include "vna/errors.hpp"
#include "vna/formula.hpp"

namespace vna {

// Grammar (LL(1); scalars are dyadic, complex scalars are parenthesized):
//
//   sentence := (("sup"|"inf") IDENT ".")* qf
//   qf       := qfatom ("+" qfatom)*
//   qfatom   := basic | DYADIC | "monus(" qf "," qf ")" | "max(" qf "," qf ")"
//             | "min(" qf "," qf ")" | "abs(" qf ")" | "sqrt(" qf ")"
//             | SCALAR "." qfatom | "(" qf ")"
//   basic    := ("trRe"|"trIm") "(" term ")" | "d(" term "," term ")"
//   term     := tprim ("*" tprim)*
//   tprim    := IDENT | "0" | "1" | "@" IDENT | "adj(" term ")"
//             | "avg(" term "," term ")" | SCALAR "." tprim | "(" term ")"
//   SCALAR   := DYADIC | "(" DYADIC ")" | "(" DYADIC ("+"|"-") [DYADIC] "i" ")"
//   DYADIC   := INT | INT "/2^" NAT
//
// Scalars must have magnitude <= 1; formula-level scalars must be real.
// "@name" refers to an embedded constant element supplied via `env`.

struct ParseOptions {
  // Named constant elements for "@name" leaves.
  std::map<std::string, AlgElement> env;
  // Reject free variables (sentences only).
  bool require_sentence = false;
};

FormulaPtr parse_formula(std::string_view text, const ParseOptions& opts = {});

// Algebra spec: a single "blocks: [n @ w, ...]" line; weights are dyadic,
// positive, and must sum to exactly 1.
TracialAlgebra parse_algebra(std::string_view text);

// Canonical fully parenthesized rendering; parse_formula(format_formula(f))
// is structurally equal to f (given the same constant env).
std::string format_formula(const Formula& f);
std::string format_term(const StarTerm& t);

}  // namespace vna
