#include "vna/term.hpp"

#include <algorithm>

#include "vna/errors.hpp"

namespace vna {

TermPtr StarTerm::var(std::string name) {
  auto t = std::shared_ptr<StarTerm>(new StarTerm(Kind::Var));
  t->name_ = std::move(name);
  return t;
}

TermPtr StarTerm::zero() {
  static const TermPtr z = std::shared_ptr<StarTerm>(new StarTerm(Kind::Zero));
  return z;
}

TermPtr StarTerm::one() {
  static const TermPtr o = std::shared_ptr<StarTerm>(new StarTerm(Kind::One));
  return o;
}

TermPtr StarTerm::constant(std::string label, AlgElement value) {
  auto t = std::shared_ptr<StarTerm>(new StarTerm(Kind::ConstElem));
  t->name_ = std::move(label);
  t->const_value_ = std::move(value);
  return t;
}

TermPtr StarTerm::adj(TermPtr c) {
  auto t = std::shared_ptr<StarTerm>(new StarTerm(Kind::Adjoint));
  t->left_ = std::move(c);
  return t;
}

TermPtr StarTerm::scale(DyadicComplex lambda, TermPtr c) {
  if (!lambda.in_unit_disk()) {
    throw PreconditionError("term scalar magnitude exceeds 1: |" + lambda.re.str() +
                            " + " + lambda.im.str() + " i| > 1");
  }
  auto t = std::shared_ptr<StarTerm>(new StarTerm(Kind::Scale));
  t->scalar_ = std::move(lambda);
  t->left_ = std::move(c);
  return t;
}

TermPtr StarTerm::product(TermPtr l, TermPtr r) {
  auto t = std::shared_ptr<StarTerm>(new StarTerm(Kind::Product));
  t->left_ = std::move(l);
  t->right_ = std::move(r);
  return t;
}

TermPtr StarTerm::average(TermPtr l, TermPtr r) {
  auto t = std::shared_ptr<StarTerm>(new StarTerm(Kind::Average));
  t->left_ = std::move(l);
  t->right_ = std::move(r);
  return t;
}

int StarTerm::degree() const {
  switch (kind_) {
    case Kind::Zero:
    case Kind::One:
      return 0;
    case Kind::Var:
    case Kind::ConstElem:
      return 1;
    case Kind::Adjoint:
    case Kind::Scale:
      return left_->degree();
    case Kind::Product:
      return left_->degree() + right_->degree();
    case Kind::Average:
      return std::max(left_->degree(), right_->degree());
  }
  return 0;
}

void StarTerm::collect_free_vars(std::set<std::string>& out) const {
  switch (kind_) {
    case Kind::Var:
      out.insert(name_);
      return;
    case Kind::Zero:
    case Kind::One:
    case Kind::ConstElem:
      return;
    default:
      if (left_) left_->collect_free_vars(out);
      if (right_) right_->collect_free_vars(out);
  }
}

std::set<std::string> StarTerm::free_vars() const {
  std::set<std::string> s;
  collect_free_vars(s);
  return s;
}

std::size_t StarTerm::node_count() const {
  std::size_t n = 1;
  if (left_) n += left_->node_count();
  if (right_) n += right_->node_count();
  return n;
}

double StarTerm::norm_bound() const {
  switch (kind_) {
    case Kind::Zero:
      return 0;
    case Kind::One:
    case Kind::Var:
    case Kind::ConstElem:
      return 1;
    case Kind::Adjoint:
      return left_->norm_bound();
    case Kind::Scale:
      return std::min(1.0, scalar_.abs()) * left_->norm_bound();
    case Kind::Product:
      return left_->norm_bound() * right_->norm_bound();
    case Kind::Average:
      return 0.5 * (left_->norm_bound() + right_->norm_bound());
  }
  return 1;
}

double StarTerm::lipschitz(const std::string& v) const {
  switch (kind_) {
    case Kind::Var:
      return name_ == v ? 1.0 : 0.0;
    case Kind::Zero:
    case Kind::One:
    case Kind::ConstElem:
      return 0;
    case Kind::Adjoint:
      return left_->lipschitz(v);  // ||x*||_2 = ||x||_2
    case Kind::Scale:
      return scalar_.abs() * left_->lipschitz(v);
    case Kind::Product:
      // ||(a-a')b||_2 <= ||a-a'||_2 ||b||_op and symmetrically
      return left_->lipschitz(v) * right_->norm_bound() +
             left_->norm_bound() * right_->lipschitz(v);
    case Kind::Average:
      return 0.5 * (left_->lipschitz(v) + right_->lipschitz(v));
  }
  return 0;
}

bool StarTerm::equal(const StarTerm& o) const {
  if (kind_ != o.kind_) return false;
  switch (kind_) {
    case Kind::Var:
      return name_ == o.name_;
    case Kind::Zero:
    case Kind::One:
      return true;
    case Kind::ConstElem:
      return name_ == o.name_ && const_value_ == o.const_value_;
    case Kind::Adjoint:
      return left_->equal(*o.left_);
    case Kind::Scale:
      return scalar_ == o.scalar_ && left_->equal(*o.left_);
    case Kind::Product:
    case Kind::Average:
      return left_->equal(*o.left_) && right_->equal(*o.right_);
  }
  return false;
}

bool equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->equal(*b);
}

TermPtr StarTerm::simplified() const {
  switch (kind_) {
    case Kind::Var:
      return StarTerm::var(name_);
    case Kind::Zero:
      return StarTerm::zero();
    case Kind::One:
      return StarTerm::one();
    case Kind::ConstElem: {
      // recognize exact 0 and 1 constants so folding sees through them
      bool all_zero = true, all_id = true;
      for (const auto& b : const_value_.blocks()) {
        all_zero = all_zero && b.isZero(0.0);
        all_id = all_id && b.isIdentity(0.0);
      }
      if (all_zero) return StarTerm::zero();
      if (all_id) return StarTerm::one();
      return StarTerm::constant(name_, const_value_);
    }
    case Kind::Adjoint: {
      TermPtr c = left_->simplified();
      if (c->kind() == Kind::Adjoint) return c->left();
      if (c->kind() == Kind::Zero || c->kind() == Kind::One) return c;
      return StarTerm::adj(std::move(c));
    }
    case Kind::Scale: {
      TermPtr c = left_->simplified();
      if (c->kind() == Kind::Zero) return c;
      DyadicComplex one1{Dyadic(1), Dyadic()};
      if (scalar_ == one1) return c;
      if (scalar_.re.is_zero() && scalar_.im.is_zero()) return StarTerm::zero();
      if (c->kind() == Kind::Scale) return StarTerm::scale(scalar_ * c->scalar(), c->left());
      return StarTerm::scale(scalar_, std::move(c));
    }
    case Kind::Product: {
      TermPtr l = left_->simplified();
      TermPtr r = right_->simplified();
      if (l->kind() == Kind::Zero || r->kind() == Kind::Zero) return StarTerm::zero();
      if (l->kind() == Kind::One) return r;
      if (r->kind() == Kind::One) return l;
      return StarTerm::product(std::move(l), std::move(r));
    }
    case Kind::Average: {
      TermPtr l = left_->simplified();
      TermPtr r = right_->simplified();
      if (l->equal(*r)) return l;  // avg(t, t) = t
      // avg(t, -t) = 0
      if (r->kind() == Kind::Scale && r->scalar() == DyadicComplex{Dyadic(-1), Dyadic()} &&
          l->equal(*r->left()))
        return StarTerm::zero();
      if (l->kind() == Kind::Scale && l->scalar() == DyadicComplex{Dyadic(-1), Dyadic()} &&
          r->equal(*l->left()))
        return StarTerm::zero();
      DyadicComplex half{Dyadic(BigInt(1), 1), Dyadic()};
      if (l->kind() == Kind::Zero) return StarTerm::scale(half, std::move(r));
      if (r->kind() == Kind::Zero) return StarTerm::scale(half, std::move(l));
      return StarTerm::average(std::move(l), std::move(r));
    }
  }
  return nullptr;
}

namespace {

std::string term_key(const TermPtr& t);

std::string term_key(const StarTerm& t) {
  switch (t.kind()) {
    case StarTerm::Kind::Var:
      return "v:" + t.name();
    case StarTerm::Kind::Zero:
      return "0";
    case StarTerm::Kind::One:
      return "1";
    case StarTerm::Kind::ConstElem:
      return "c:" + t.name();
    case StarTerm::Kind::Adjoint:
      return "a(" + term_key(*t.left()) + ")";
    case StarTerm::Kind::Scale:
      return "s[" + t.scalar().re.str() + "," + t.scalar().im.str() + "](" +
             term_key(*t.left()) + ")";
    case StarTerm::Kind::Product:
      return "p(" + term_key(*t.left()) + "," + term_key(*t.right()) + ")";
    case StarTerm::Kind::Average:
      return "m(" + term_key(*t.left()) + "," + term_key(*t.right()) + ")";
  }
  return "?";
}

// adjoint pushed through the commutative structure
TermPtr abelian_adj(const TermPtr& t) {
  switch (t->kind()) {
    case StarTerm::Kind::Zero:
    case StarTerm::Kind::One:
      return t;
    case StarTerm::Kind::Adjoint:
      return t->left();
    case StarTerm::Kind::Scale: {
      DyadicComplex conj{t->scalar().re, -t->scalar().im};
      return StarTerm::scale(conj, abelian_adj(t->left()));
    }
    case StarTerm::Kind::Product:
      return StarTerm::product(abelian_adj(t->left()), abelian_adj(t->right()));
    case StarTerm::Kind::Average:
      return StarTerm::average(abelian_adj(t->left()), abelian_adj(t->right()));
    default:
      return StarTerm::adj(t);  // variables and constants stay atomic
  }
}

void collect_factors(const TermPtr& t, DyadicComplex& coeff, std::vector<TermPtr>& out,
                     bool& zero) {
  if (t->kind() == StarTerm::Kind::Product) {
    collect_factors(t->left(), coeff, out, zero);
    collect_factors(t->right(), coeff, out, zero);
    return;
  }
  if (t->kind() == StarTerm::Kind::Scale) {
    coeff = coeff * t->scalar();
    collect_factors(t->left(), coeff, out, zero);
    return;
  }
  if (t->kind() == StarTerm::Kind::Zero) {
    zero = true;
    return;
  }
  if (t->kind() == StarTerm::Kind::One) return;
  out.push_back(t);
}

}  // namespace

TermPtr StarTerm::abelian_normalized() const {
  switch (kind_) {
    case Kind::Var:
    case Kind::Zero:
    case Kind::One:
    case Kind::ConstElem:
      return simplified();
    case Kind::Adjoint:
      return abelian_adj(left_->abelian_normalized())->simplified();
    case Kind::Scale:
      return StarTerm::scale(scalar_, left_->abelian_normalized())->simplified();
    case Kind::Average:
      return StarTerm::average(left_->abelian_normalized(), right_->abelian_normalized())
          ->simplified();
    case Kind::Product: {
      TermPtr l = left_->abelian_normalized();
      TermPtr r = right_->abelian_normalized();
      DyadicComplex coeff{Dyadic(1), Dyadic()};
      std::vector<TermPtr> factors;
      bool zero = false;
      collect_factors(StarTerm::product(std::move(l), std::move(r)), coeff, factors, zero);
      if (zero) return StarTerm::zero();
      std::sort(factors.begin(), factors.end(), [](const TermPtr& a, const TermPtr& b) {
        return term_key(*a) < term_key(*b);
      });
      TermPtr prod;
      for (auto& f : factors) prod = prod ? StarTerm::product(std::move(prod), f) : f;
      if (!prod) prod = StarTerm::one();
      DyadicComplex one1{Dyadic(1), Dyadic()};
      if (!(coeff == one1)) prod = StarTerm::scale(coeff, std::move(prod));
      return prod->simplified();
    }
  }
  return nullptr;
}

}  // namespace vna
