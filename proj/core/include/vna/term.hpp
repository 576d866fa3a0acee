#pragma once

#include <complex>
#include <memory>
#include <set>
#include <string>

#include "vna/algebra.hpp"
#include "vna/dyadic.hpp"

namespace vna {

// Complex scalar with exact dyadic coordinates.
struct DyadicComplex {
  Dyadic re, im;

  bool is_real() const { return im.is_zero(); }
  Dyadic norm_sq() const { return re * re + im * im; }  // exact
  bool in_unit_disk() const { return norm_sq() <= Dyadic(1); }
  double abs() const { return std::abs(to_complex()); }
  std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }
  DyadicComplex operator*(const DyadicComplex& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  bool operator==(const DyadicComplex& o) const = default;
};

class StarTerm;
using TermPtr = std::shared_ptr<const StarTerm>;

// *-polynomial over the ball-preserving generators: variables, the
// constants 0 and 1, embedded constant elements (one per named constant),
// adjoint, contraction scalars (|lambda| <= 1), product, and average.
// Every term maps unit-ball tuples into the unit ball.
class StarTerm {
public:
  enum class Kind { Var, Zero, One, ConstElem, Adjoint, Scale, Product, Average };

  static TermPtr var(std::string name);
  static TermPtr zero();
  static TermPtr one();
  // `value` must be a unit-ball element of the algebra the term will be
  // evaluated on; `label` names it in printed syntax (as "@label").
  static TermPtr constant(std::string label, AlgElement value);
  static TermPtr adj(TermPtr t);
  static TermPtr scale(DyadicComplex lambda, TermPtr t);  // throws if |lambda| > 1
  static TermPtr product(TermPtr l, TermPtr r);
  static TermPtr average(TermPtr l, TermPtr r);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }  // Var name / ConstElem label
  const AlgElement& const_value() const { return const_value_; }
  const DyadicComplex& scalar() const { return scalar_; }
  const TermPtr& left() const { return left_; }    // unary child lives here
  const TermPtr& right() const { return right_; }

  // Length of the longest multiplicative chain.
  int degree() const;
  void collect_free_vars(std::set<std::string>& out) const;
  std::set<std::string> free_vars() const;
  std::size_t node_count() const;

  // Upper bound for the operator norm of the value on unit-ball inputs;
  // always <= 1, and < 1 when scalars contract.
  double norm_bound() const;

  // 2-norm Lipschitz constant of the map v |-> term value, other
  // variables held fixed in the unit ball.  Zero when v does not occur.
  double lipschitz(const std::string& v) const;

  bool equal(const StarTerm& o) const;

  // Folds products with 0 and 1, double adjoints, and nested scalars.
  TermPtr simplified() const;

  // Canonical form valid on abelian algebras only: adjoints pushed to the
  // leaves, scalars pulled out of products, commuting factors sorted.
  TermPtr abelian_normalized() const;

private:
  StarTerm(Kind k) : kind_(k) {}

  Kind kind_;
  std::string name_;
  AlgElement const_value_;
  DyadicComplex scalar_;
  TermPtr left_, right_;
};

bool equal(const TermPtr& a, const TermPtr& b);

}  // namespace vna
