#include "vna/formula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vna/errors.hpp"

namespace vna {

namespace {

std::shared_ptr<Formula> make(Formula::Kind k) {
  struct Access : Formula {
    explicit Access(Kind k) : Formula(k) {}
  };
  return std::make_shared<Access>(k);
}

}  // namespace

FormulaPtr Formula::basic(TracePart part, TermPtr t) {
  if (!t) throw PreconditionError("basic: null term");
  auto f = make(Kind::Basic);
  f->part_ = part;
  f->term_ = std::move(t);
  return f;
}

FormulaPtr Formula::dist(TermPtr a, TermPtr b) {
  if (!a || !b) throw PreconditionError("dist: null term");
  auto f = make(Kind::Dist);
  f->term_ = std::move(a);
  f->term2_ = std::move(b);
  return f;
}

FormulaPtr Formula::constant(Dyadic c) {
  auto f = make(Kind::Const);
  f->const_ = std::move(c);
  return f;
}

FormulaPtr Formula::add(FormulaPtr l, FormulaPtr r) {
  auto f = make(Kind::Add);
  f->left_ = std::move(l);
  f->right_ = std::move(r);
  return f;
}

FormulaPtr Formula::scale(Dyadic c, FormulaPtr body) {
  Dyadic a = c.sign() < 0 ? -c : c;
  if (a > Dyadic(1)) throw PreconditionError("formula scalar magnitude exceeds 1");
  auto f = make(Kind::Scale);
  f->const_ = std::move(c);
  f->left_ = std::move(body);
  return f;
}

FormulaPtr Formula::monus(FormulaPtr l, FormulaPtr r) {
  auto f = make(Kind::Monus);
  f->left_ = std::move(l);
  f->right_ = std::move(r);
  return f;
}

FormulaPtr Formula::fmax(FormulaPtr l, FormulaPtr r) {
  auto f = make(Kind::Max);
  f->left_ = std::move(l);
  f->right_ = std::move(r);
  return f;
}

FormulaPtr Formula::fmin(FormulaPtr l, FormulaPtr r) {
  auto f = make(Kind::Min);
  f->left_ = std::move(l);
  f->right_ = std::move(r);
  return f;
}

FormulaPtr Formula::abs(FormulaPtr body) {
  auto f = make(Kind::Abs);
  f->left_ = std::move(body);
  return f;
}

FormulaPtr Formula::sqrt(FormulaPtr body) {
  auto f = make(Kind::Sqrt);
  f->left_ = std::move(body);
  return f;
}

FormulaPtr Formula::quantifier(Quant q, std::string var, FormulaPtr body) {
  if (!body) throw PreconditionError("quantifier: null body");
  if (body->bound_vars().contains(var))
    throw PreconditionError("variable bound twice: " + var);
  auto f = make(Kind::Quantifier);
  f->quant_ = q;
  f->var_ = std::move(var);
  f->left_ = std::move(body);
  return f;
}

std::set<std::string> Formula::free_vars() const {
  switch (kind_) {
    case Kind::Basic:
      return term_->free_vars();
    case Kind::Dist: {
      auto s = term_->free_vars();
      term2_->collect_free_vars(s);
      return s;
    }
    case Kind::Const:
      return {};
    case Kind::Quantifier: {
      auto s = left_->free_vars();
      s.erase(var_);
      return s;
    }
    default: {
      std::set<std::string> s;
      if (left_) s.merge(left_->free_vars());
      if (right_) s.merge(right_->free_vars());
      return s;
    }
  }
}

std::set<std::string> Formula::bound_vars() const {
  std::set<std::string> s;
  if (kind_ == Kind::Quantifier) s.insert(var_);
  if (left_) s.merge(left_->bound_vars());
  if (right_) s.merge(right_->bound_vars());
  return s;
}

bool Formula::quantifier_free() const {
  if (kind_ == Kind::Quantifier) return false;
  if (left_ && !left_->quantifier_free()) return false;
  if (right_ && !right_->quantifier_free()) return false;
  return true;
}

std::size_t Formula::node_count() const {
  std::size_t n = 1;
  if (term_) n += term_->node_count();
  if (term2_) n += term2_->node_count();
  if (left_) n += left_->node_count();
  if (right_) n += right_->node_count();
  return n;
}

bool Formula::equal(const Formula& o) const {
  if (kind_ != o.kind_) return false;
  switch (kind_) {
    case Kind::Basic:
      return part_ == o.part_ && term_->equal(*o.term_);
    case Kind::Dist:
      return term_->equal(*o.term_) && term2_->equal(*o.term2_);
    case Kind::Const:
      return const_ == o.const_;
    case Kind::Scale:
      return const_ == o.const_ && left_->equal(*o.left_);
    case Kind::Abs:
    case Kind::Sqrt:
      return left_->equal(*o.left_);
    case Kind::Add:
    case Kind::Monus:
    case Kind::Max:
    case Kind::Min:
      return left_->equal(*o.left_) && right_->equal(*o.right_);
    case Kind::Quantifier:
      return quant_ == o.quant_ && var_ == o.var_ && left_->equal(*o.left_);
  }
  return false;
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->equal(*b);
}

DyadicInterval bounds(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Basic: {
      // |tr(t)| <= ||t||_2 <= ||t||_op
      Dyadic b = Dyadic::ceil_to(f.term()->norm_bound(), 24);
      return {-b, b};
    }
    case Formula::Kind::Dist: {
      double nb = f.term()->norm_bound() + f.term2()->norm_bound();
      Dyadic b = Dyadic::min(Dyadic(2), Dyadic::ceil_to(nb, 24));
      return {Dyadic(), b};
    }
    case Formula::Kind::Const:
      return DyadicInterval::point(f.value());
    case Formula::Kind::Add:
      return iv_add(bounds(*f.left()), bounds(*f.right()));
    case Formula::Kind::Scale:
      return iv_scale(f.value(), bounds(*f.left()));
    case Formula::Kind::Monus:
      return iv_monus(bounds(*f.left()), bounds(*f.right()));
    case Formula::Kind::Max:
      return iv_max(bounds(*f.left()), bounds(*f.right()));
    case Formula::Kind::Min:
      return iv_min(bounds(*f.left()), bounds(*f.right()));
    case Formula::Kind::Abs:
      return iv_abs(bounds(*f.left()));
    case Formula::Kind::Sqrt:
      return iv_sqrt(bounds(*f.left()), 24);
    case Formula::Kind::Quantifier:
      return bounds(*f.left());
  }
  throw PreconditionError("bounds: malformed AST");
}

Modulus Modulus::linear(double coeff) {
  Modulus m;
  m.linear_ = coeff;
  return m;
}

Modulus Modulus::sum(const Modulus& a, const Modulus& b) {
  if (a.is_linear() && b.is_linear()) return linear(a.linear_ + b.linear_);
  Modulus m;
  m.linear_ = -1;
  m.fn_ = [a, b](double d) { return a(d) + b(d); };
  return m;
}

Modulus Modulus::maximum(const Modulus& a, const Modulus& b) {
  if (a.is_linear() && b.is_linear()) return linear(std::max(a.linear_, b.linear_));
  Modulus m;
  m.linear_ = -1;
  m.fn_ = [a, b](double d) { return std::max(a(d), b(d)); };
  return m;
}

Modulus Modulus::scaled(double c, const Modulus& a) {
  if (a.is_linear()) return linear(c * a.linear_);
  Modulus m;
  m.linear_ = -1;
  m.fn_ = [c, a](double d) { return c * a(d); };
  return m;
}

Modulus Modulus::sqrt_of(const Modulus& a) {
  if (a.is_linear() && a.linear_ == 0) return linear(0);
  Modulus m;
  m.linear_ = -1;
  m.fn_ = [a](double d) { return std::sqrt(a(d)); };
  return m;
}

double Modulus::operator()(double delta) const {
  if (delta < 0) delta = 0;
  if (linear_ >= 0) return linear_ * delta;
  return fn_(delta);
}

Modulus continuity_modulus(const Formula& f, const std::string& v) {
  switch (f.kind()) {
    case Formula::Kind::Basic:
      return Modulus::linear(f.term()->lipschitz(v));
    case Formula::Kind::Dist:
      return Modulus::linear(f.term()->lipschitz(v) + f.term2()->lipschitz(v));
    case Formula::Kind::Const:
      return Modulus::linear(0);
    case Formula::Kind::Add:
    case Formula::Kind::Monus:
      return Modulus::sum(continuity_modulus(*f.left(), v),
                          continuity_modulus(*f.right(), v));
    case Formula::Kind::Scale: {
      double c = std::abs(f.value().to_double());
      return Modulus::scaled(c, continuity_modulus(*f.left(), v));
    }
    case Formula::Kind::Max:
    case Formula::Kind::Min:
      return Modulus::maximum(continuity_modulus(*f.left(), v),
                              continuity_modulus(*f.right(), v));
    case Formula::Kind::Abs:
      return continuity_modulus(*f.left(), v);
    case Formula::Kind::Sqrt:
      return Modulus::sqrt_of(continuity_modulus(*f.left(), v));
    case Formula::Kind::Quantifier:
      if (f.quant_var() == v) return Modulus::linear(0);
      return continuity_modulus(*f.left(), v);
  }
  throw PreconditionError("continuity_modulus: malformed AST");
}

double lipschitz_modulus(const Formula& f, const std::string& v) {
  if (!f.free_vars().contains(v))
    throw PreconditionError("lipschitz_modulus: variable not free: " + v);
  Modulus m = continuity_modulus(f, v);
  if (m.is_linear()) return m.linear_coeff();
  return std::numeric_limits<double>::infinity();
}

PrefixSplit strip_prefix(const FormulaPtr& f) {
  PrefixSplit out;
  FormulaPtr cur = f;
  while (cur->kind() == Formula::Kind::Quantifier) {
    out.prefix.emplace_back(cur->quant(), cur->quant_var());
    cur = cur->left();
  }
  out.matrix = cur;
  return out;
}

SentenceClass classify(const Formula& f) {
  if (!f.is_sentence())
    throw PreconditionError("classify: free variables present");
  auto self = FormulaPtr(&f, [](const Formula*) {});
  PrefixSplit split = strip_prefix(self);
  if (!split.matrix->quantifier_free()) return SentenceClass::Other;
  if (split.prefix.empty()) return SentenceClass::QuantifierFree;
  bool all_sup = true, all_inf = true;
  for (auto& [q, name] : split.prefix) {
    all_sup = all_sup && q == Quant::Sup;
    all_inf = all_inf && q == Quant::Inf;
  }
  if (all_sup) return SentenceClass::Universal;
  if (all_inf) return SentenceClass::Existential;
  // inf block then sup block, both nonempty
  std::size_t i = 0;
  while (i < split.prefix.size() && split.prefix[i].first == Quant::Inf) ++i;
  if (i == 0) return SentenceClass::Other;
  std::size_t j = i;
  while (j < split.prefix.size() && split.prefix[j].first == Quant::Sup) ++j;
  if (j == split.prefix.size()) return SentenceClass::ExistsForall;
  return SentenceClass::Other;
}

Dyadic dual_bound(const Formula& f) { return bounds(f).hi(); }

FormulaPtr dualize(const FormulaPtr& f) {
  if (classify(*f) != SentenceClass::Universal)
    throw PreconditionError("dualize: sentence is not universal");
  Dyadic m = dual_bound(*f);
  PrefixSplit split = strip_prefix(f);
  FormulaPtr body = Formula::monus(Formula::constant(m), split.matrix);
  for (auto it = split.prefix.rbegin(); it != split.prefix.rend(); ++it) {
    body = Formula::quantifier(Quant::Inf, it->second, std::move(body));
  }
  return body;
}

namespace {

TermPtr substitute_term(const TermPtr& t, const std::map<std::string, AlgElement>& env) {
  switch (t->kind()) {
    case StarTerm::Kind::Var: {
      auto it = env.find(t->name());
      if (it == env.end()) return t;
      return StarTerm::constant(t->name(), it->second);
    }
    case StarTerm::Kind::Zero:
    case StarTerm::Kind::One:
    case StarTerm::Kind::ConstElem:
      return t;
    case StarTerm::Kind::Adjoint:
      return StarTerm::adj(substitute_term(t->left(), env));
    case StarTerm::Kind::Scale:
      return StarTerm::scale(t->scalar(), substitute_term(t->left(), env));
    case StarTerm::Kind::Product:
      return StarTerm::product(substitute_term(t->left(), env),
                               substitute_term(t->right(), env));
    case StarTerm::Kind::Average:
      return StarTerm::average(substitute_term(t->left(), env),
                               substitute_term(t->right(), env));
  }
  return t;
}

}  // namespace

FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, AlgElement>& env) {
  switch (f->kind()) {
    case Formula::Kind::Basic:
      return Formula::basic(f->trace_part(), substitute_term(f->term(), env));
    case Formula::Kind::Dist:
      return Formula::dist(substitute_term(f->term(), env),
                           substitute_term(f->term2(), env));
    case Formula::Kind::Const:
      return f;
    case Formula::Kind::Add:
      return Formula::add(substitute(f->left(), env), substitute(f->right(), env));
    case Formula::Kind::Scale:
      return Formula::scale(f->value(), substitute(f->left(), env));
    case Formula::Kind::Monus:
      return Formula::monus(substitute(f->left(), env), substitute(f->right(), env));
    case Formula::Kind::Max:
      return Formula::fmax(substitute(f->left(), env), substitute(f->right(), env));
    case Formula::Kind::Min:
      return Formula::fmin(substitute(f->left(), env), substitute(f->right(), env));
    case Formula::Kind::Abs:
      return Formula::abs(substitute(f->left(), env));
    case Formula::Kind::Sqrt:
      return Formula::sqrt(substitute(f->left(), env));
    case Formula::Kind::Quantifier:
      if (env.contains(f->quant_var()))
        throw PreconditionError("substitute: variable is quantifier-bound: " + f->quant_var());
      return Formula::quantifier(f->quant(), f->quant_var(), substitute(f->left(), env));
  }
  return f;
}

FormulaPtr abelian_normalize(const FormulaPtr& f) {
  switch (f->kind()) {
    case Formula::Kind::Basic:
      return simplify(Formula::basic(f->trace_part(), f->term()->abelian_normalized()));
    case Formula::Kind::Dist:
      return simplify(Formula::dist(f->term()->abelian_normalized(),
                                    f->term2()->abelian_normalized()));
    case Formula::Kind::Const:
      return f;
    case Formula::Kind::Add:
      return simplify(Formula::add(abelian_normalize(f->left()), abelian_normalize(f->right())));
    case Formula::Kind::Scale:
      return simplify(Formula::scale(f->value(), abelian_normalize(f->left())));
    case Formula::Kind::Monus:
      return simplify(Formula::monus(abelian_normalize(f->left()), abelian_normalize(f->right())));
    case Formula::Kind::Max:
      return simplify(Formula::fmax(abelian_normalize(f->left()), abelian_normalize(f->right())));
    case Formula::Kind::Min:
      return simplify(Formula::fmin(abelian_normalize(f->left()), abelian_normalize(f->right())));
    case Formula::Kind::Abs:
      return simplify(Formula::abs(abelian_normalize(f->left())));
    case Formula::Kind::Sqrt:
      return simplify(Formula::sqrt(abelian_normalize(f->left())));
    case Formula::Kind::Quantifier: {
      FormulaPtr body = abelian_normalize(f->left());
      if (body->kind() == Formula::Kind::Const) return body;
      return Formula::quantifier(f->quant(), f->quant_var(), std::move(body));
    }
  }
  return f;
}

FormulaPtr simplify(const FormulaPtr& f) {
  switch (f->kind()) {
    case Formula::Kind::Basic: {
      TermPtr t = f->term()->simplified();
      if (t->kind() == StarTerm::Kind::Zero) return Formula::constant(Dyadic());
      if (t->kind() == StarTerm::Kind::One)
        return Formula::constant(f->trace_part() == TracePart::Re ? Dyadic(1) : Dyadic());
      return Formula::basic(f->trace_part(), std::move(t));
    }
    case Formula::Kind::Dist: {
      TermPtr a = f->term()->simplified();
      TermPtr b = f->term2()->simplified();
      if (a->equal(*b)) return Formula::constant(Dyadic());
      return Formula::dist(std::move(a), std::move(b));
    }
    case Formula::Kind::Const:
      return f;
    case Formula::Kind::Add: {
      FormulaPtr l = simplify(f->left()), r = simplify(f->right());
      if (l->kind() == Formula::Kind::Const && r->kind() == Formula::Kind::Const)
        return Formula::constant(l->value() + r->value());
      return Formula::add(std::move(l), std::move(r));
    }
    case Formula::Kind::Scale: {
      FormulaPtr l = simplify(f->left());
      if (l->kind() == Formula::Kind::Const)
        return Formula::constant(f->value() * l->value());
      return Formula::scale(f->value(), std::move(l));
    }
    case Formula::Kind::Monus: {
      FormulaPtr l = simplify(f->left()), r = simplify(f->right());
      if (l->kind() == Formula::Kind::Const && r->kind() == Formula::Kind::Const)
        return Formula::constant(monus(l->value(), r->value()));
      return Formula::monus(std::move(l), std::move(r));
    }
    case Formula::Kind::Max: {
      FormulaPtr l = simplify(f->left()), r = simplify(f->right());
      if (l->kind() == Formula::Kind::Const && r->kind() == Formula::Kind::Const)
        return Formula::constant(Dyadic::max(l->value(), r->value()));
      return Formula::fmax(std::move(l), std::move(r));
    }
    case Formula::Kind::Min: {
      FormulaPtr l = simplify(f->left()), r = simplify(f->right());
      if (l->kind() == Formula::Kind::Const && r->kind() == Formula::Kind::Const)
        return Formula::constant(Dyadic::min(l->value(), r->value()));
      return Formula::fmin(std::move(l), std::move(r));
    }
    case Formula::Kind::Abs: {
      FormulaPtr l = simplify(f->left());
      if (l->kind() == Formula::Kind::Const) {
        Dyadic c = l->value();
        return Formula::constant(c.sign() < 0 ? -c : c);
      }
      return Formula::abs(std::move(l));
    }
    case Formula::Kind::Sqrt: {
      FormulaPtr l = simplify(f->left());
      if (l->kind() == Formula::Kind::Const && l->value().sign() <= 0)
        return Formula::constant(Dyadic());
      return Formula::sqrt(std::move(l));
    }
    case Formula::Kind::Quantifier: {
      FormulaPtr body = simplify(f->left());
      if (body->kind() == Formula::Kind::Const) return body;  // vacuous binder
      return Formula::quantifier(f->quant(), f->quant_var(), std::move(body));
    }
  }
  return f;
}

}  // namespace vna
