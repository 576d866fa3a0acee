#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vna/interval.hpp"
#include "vna/term.hpp"

namespace vna {

enum class TracePart { Re, Im };
enum class Quant { Sup, Inf };

// Syntactic sentence shape: prefix all-sup, all-inf, an inf block followed
// by a sup block, or anything else.
enum class SentenceClass { QuantifierFree, Universal, Existential, ExistsForall, Other };

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Formulas over the connective basis {dyadic constants, +, dyadic scalar,
// monus, max, min, abs, sqrt} applied to basic trace formulas, with the
// metric d(s, t) as a derived basic formula and sup/inf quantifiers over
// the unit ball.
class Formula {
public:
  enum class Kind { Basic, Dist, Const, Add, Scale, Monus, Max, Min, Abs, Sqrt, Quantifier };

  static FormulaPtr basic(TracePart part, TermPtr t);
  static FormulaPtr dist(TermPtr a, TermPtr b);
  static FormulaPtr constant(Dyadic c);
  static FormulaPtr add(FormulaPtr l, FormulaPtr r);
  static FormulaPtr scale(Dyadic c, FormulaPtr f);  // real contraction, |c| <= 1
  static FormulaPtr monus(FormulaPtr l, FormulaPtr r);
  static FormulaPtr fmax(FormulaPtr l, FormulaPtr r);
  static FormulaPtr fmin(FormulaPtr l, FormulaPtr r);
  static FormulaPtr abs(FormulaPtr f);
  static FormulaPtr sqrt(FormulaPtr f);  // evaluates sqrt(max(., 0))
  static FormulaPtr quantifier(Quant q, std::string var, FormulaPtr body);

  Kind kind() const { return kind_; }
  TracePart trace_part() const { return part_; }
  const TermPtr& term() const { return term_; }        // Basic / Dist left term
  const TermPtr& term2() const { return term2_; }      // Dist right term
  const Dyadic& value() const { return const_; }       // Const / Scale coefficient
  const FormulaPtr& left() const { return left_; }     // unary child lives here
  const FormulaPtr& right() const { return right_; }
  Quant quant() const { return quant_; }
  const std::string& quant_var() const { return var_; }

  std::set<std::string> free_vars() const;
  std::set<std::string> bound_vars() const;
  bool is_sentence() const { return free_vars().empty(); }
  bool quantifier_free() const;
  std::size_t node_count() const;  // formula nodes plus term nodes

  bool equal(const Formula& o) const;

protected:
  explicit Formula(Kind k) : kind_(k) {}

private:
  Kind kind_;
  TracePart part_ = TracePart::Re;
  TermPtr term_, term2_;
  Dyadic const_;
  FormulaPtr left_, right_;
  Quant quant_ = Quant::Sup;
  std::string var_;
};

bool equal(const FormulaPtr& a, const FormulaPtr& b);

// Compositional value bounds [m_phi, M_phi]; every evaluation lands inside.
DyadicInterval bounds(const Formula& f);

// Modulus of continuity w(delta) in the d-metric for one variable:
// |phi(..a..) - phi(..a'..)| <= w(d(a, a')).  Linear except under sqrt,
// where sqrt(u) - sqrt(v) <= sqrt(u - v) turns it into a 1/2-Hoelder term.
class Modulus {
public:
  static Modulus linear(double coeff);
  static Modulus sum(const Modulus& a, const Modulus& b);
  static Modulus maximum(const Modulus& a, const Modulus& b);
  static Modulus scaled(double c, const Modulus& a);
  static Modulus sqrt_of(const Modulus& a);

  double operator()(double delta) const;
  bool is_linear() const { return linear_ >= 0; }
  double linear_coeff() const { return linear_; }

private:
  Modulus() = default;
  double linear_ = 0;  // >= 0 when the modulus is exactly linear_ * delta
  std::function<double(double)> fn_;
};

Modulus continuity_modulus(const Formula& f, const std::string& v);

// Plain Lipschitz constant; +infinity when an explicit sqrt connective
// sits above an occurrence of v.  Throws if v is not free in f.
double lipschitz_modulus(const Formula& f, const std::string& v);

SentenceClass classify(const Formula& f);  // throws if f has free variables

struct PrefixSplit {
  std::vector<std::pair<Quant, std::string>> prefix;
  FormulaPtr matrix;
};
PrefixSplit strip_prefix(const FormulaPtr& f);

// For universal sigma = sup..sup phi returns inf..inf (M ∸ phi) with
// M = bounds(sigma).hi; its value on every algebra is M ∸ sigma's value.
FormulaPtr dualize(const FormulaPtr& f);
Dyadic dual_bound(const Formula& f);

// Term folding plus Dist(s, s) -> 0, trace-of-0/1 folding, and constant
// folding through connectives.
FormulaPtr simplify(const FormulaPtr& f);

// Rewrites every term into its commutative canonical form and simplifies.
// Sound only on abelian algebras (all blocks 1-dimensional), where it lets
// the certifier see flat sentences like d(xy, yx) syntactically.
FormulaPtr abelian_normalize(const FormulaPtr& f);

// Replaces free variables by embedded constant elements.
FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, AlgElement>& env);

}  // namespace vna
