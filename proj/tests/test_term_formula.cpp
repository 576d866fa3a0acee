#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "vna/errors.hpp"
#include "vna/evaluate.hpp"

using namespace vna;
using namespace vnatest;

namespace {

TermPtr x() { return StarTerm::var("x"); }
TermPtr y() { return StarTerm::var("y"); }

}  // namespace

TEST_CASE("term degree and free variables") {
  TermPtr t = StarTerm::product(x(), StarTerm::adj(x()));
  CHECK(t->degree() == 2);
  CHECK(t->free_vars() == std::set<std::string>{"x"});
  CHECK(StarTerm::one()->degree() == 0);
  CHECK(StarTerm::average(t, y())->degree() == 2);
  CHECK(StarTerm::scale({Dyadic(BigInt(1), 1), Dyadic()}, t)->degree() == 2);
}

TEST_CASE("scalar magnitude is validated") {
  CHECK_THROWS_AS(StarTerm::scale({Dyadic(2), Dyadic()}, x()), PreconditionError);
  CHECK_THROWS_AS(StarTerm::scale({Dyadic(1), Dyadic(1)}, x()), PreconditionError);
  CHECK_NOTHROW(StarTerm::scale({Dyadic(1), Dyadic()}, x()));
  CHECK_THROWS_AS(Formula::scale(Dyadic(2), Formula::constant(Dyadic(0))), PreconditionError);
}

TEST_CASE("bounds: seeded examples") {
  CHECK(bounds(*Formula::basic(TracePart::Re, x())) ==
        DyadicInterval(Dyadic(-1), Dyadic(1)));
  CHECK(bounds(*Formula::constant(Dyadic(1))) == DyadicInterval(Dyadic(1), Dyadic(1)));
  CHECK(bounds(*Formula::dist(x(), y())) == DyadicInterval(Dyadic(0), Dyadic(2)));
  // scaled term shrinks the basic bound
  FormulaPtr half = Formula::basic(
      TracePart::Re, StarTerm::scale({Dyadic(BigInt(1), 1), Dyadic()}, x()));
  CHECK(bounds(*half).hi() <= Dyadic(BigInt(1), 1));
  CHECK(bounds(*half).lo() >= Dyadic(BigInt(-1), 1));
}

TEST_CASE("bound containment on random assignments") {
  Rng rng(42);
  std::vector<TracialAlgebra> fleet = {TracialAlgebra::matrix(1), TracialAlgebra::matrix(2),
                                       TracialAlgebra::matrix(3)};
  GenProfile prof;
  prof.allow_sqrt = true;
  for (int it = 0; it < 300; ++it) {
    std::vector<std::string> vars = {"x", "y"};
    FormulaPtr f = random_qf(rng, vars, prof, 3);
    DyadicInterval b = bounds(*f);
    const TracialAlgebra& a = fleet[it % fleet.size()];
    Assignment asg{{"x", random_unit_ball(a, rng.next_u64())},
                   {"y", random_unit_ball(a, rng.next_u64())}};
    double v = eval_qf(a, *f, asg);
    CHECK(v >= b.lo().to_double() - 1e-9);
    CHECK(v <= b.hi().to_double() + 1e-9);
  }
}

TEST_CASE("unit-ball preservation on random terms") {
  // 10^4 random evaluations across M_1, M_2, M_3, degree <= 6
  Rng rng(7);
  std::vector<TracialAlgebra> fleet = {TracialAlgebra::matrix(1), TracialAlgebra::matrix(2),
                                       TracialAlgebra::matrix(3)};
  int evals = 0;
  while (evals < 10000) {
    std::vector<std::string> vars = {"x", "y", "z"};
    TermPtr t = random_term(rng, vars, 6, 4);
    const TracialAlgebra& a = fleet[evals % fleet.size()];
    Assignment asg;
    for (const auto& v : vars) asg.emplace(v, random_unit_ball(a, rng.next_u64()));
    AlgElement out = eval_term(a, *t, asg);
    CHECK(op_norm(out) <= 1.0 + 1e-9);
    ++evals;
  }
}

TEST_CASE("lipschitz modulus: seeded examples") {
  FormulaPtr f = Formula::basic(TracePart::Re, StarTerm::product(x(), y()));
  CHECK(lipschitz_modulus(*f, "x") == doctest::Approx(1.0));
  FormulaPtr avg_scaled = Formula::basic(
      TracePart::Re,
      StarTerm::average(x(), StarTerm::scale({Dyadic(BigInt(1), 1), Dyadic()}, x())));
  CHECK(lipschitz_modulus(*avg_scaled, "x") <= 1.0 + 1e-12);
  FormulaPtr c = Formula::add(Formula::constant(Dyadic(2)), Formula::basic(TracePart::Im, y()));
  CHECK_THROWS_AS(lipschitz_modulus(*c, "x"), PreconditionError);
  CHECK(lipschitz_modulus(*c, "y") == doctest::Approx(1.0));
  // d is 1-Lipschitz in each slot
  FormulaPtr dd = Formula::dist(StarTerm::product(x(), y()), StarTerm::product(y(), x()));
  CHECK(lipschitz_modulus(*dd, "x") == doctest::Approx(2.0));
  // explicit sqrt has no finite Lipschitz constant
  FormulaPtr sq = Formula::sqrt(Formula::basic(TracePart::Re, x()));
  CHECK(std::isinf(lipschitz_modulus(*sq, "x")));
  // but its continuity modulus is the 1/2-Hoelder envelope
  Modulus m = continuity_modulus(*sq, "x");
  CHECK(m(0.25) == doctest::Approx(0.5));
}

TEST_CASE("lipschitz soundness on random formulas") {
  Rng rng(99);
  TracialAlgebra m2 = TracialAlgebra::matrix(2);
  GenProfile prof;
  prof.allow_sqrt = true;
  for (int it = 0; it < 200; ++it) {
    std::vector<std::string> vars = {"x", "y"};
    FormulaPtr f = random_qf(rng, vars, prof, 3);
    Modulus mod = continuity_modulus(*f, "x");
    AlgElement a1 = random_unit_ball(m2, rng.next_u64());
    AlgElement a2 = random_unit_ball(m2, rng.next_u64());
    AlgElement b = random_unit_ball(m2, rng.next_u64());
    Assignment s1{{"x", a1}, {"y", b}};
    Assignment s2{{"x", a2}, {"y", b}};
    double lhs = std::abs(eval_qf(m2, *f, s1) - eval_qf(m2, *f, s2));
    double rhs = mod(hs_dist(m2, a1, a2));
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("classify") {
  FormulaPtr qf = Formula::basic(TracePart::Re, x());
  FormulaPtr u = Formula::quantifier(Quant::Sup, "x", qf);
  CHECK(classify(*u) == SentenceClass::Universal);
  FormulaPtr e = Formula::quantifier(Quant::Inf, "x", qf);
  CHECK(classify(*e) == SentenceClass::Existential);

  FormulaPtr commutator = Formula::dist(StarTerm::product(x(), y()), StarTerm::product(y(), x()));
  FormulaPtr ea = Formula::quantifier(
      Quant::Inf, "x", Formula::quantifier(Quant::Sup, "y", commutator));
  CHECK(classify(*ea) == SentenceClass::ExistsForall);
  FormulaPtr ae = Formula::quantifier(
      Quant::Sup, "x", Formula::quantifier(Quant::Inf, "y", Formula::dist(x(), y())));
  CHECK(classify(*ae) == SentenceClass::Other);
  CHECK(classify(*Formula::constant(Dyadic(0))) == SentenceClass::QuantifierFree);
  CHECK_THROWS_AS(classify(*qf), PreconditionError);  // free variable
}

TEST_CASE("variable binding is unique") {
  FormulaPtr inner = Formula::quantifier(Quant::Sup, "x", Formula::basic(TracePart::Re, x()));
  CHECK_THROWS_AS(Formula::quantifier(Quant::Sup, "x", inner), PreconditionError);
}

TEST_CASE("dualize") {
  FormulaPtr u = Formula::quantifier(Quant::Sup, "x", Formula::basic(TracePart::Re, x()));
  FormulaPtr dual = dualize(u);
  CHECK(classify(*dual) == SentenceClass::Existential);
  // inf_x (1 ∸ trRe(x))
  PrefixSplit ps = strip_prefix(dual);
  REQUIRE(ps.prefix.size() == 1);
  CHECK(ps.prefix[0].first == Quant::Inf);
  CHECK(ps.matrix->kind() == Formula::Kind::Monus);
  CHECK(ps.matrix->left()->kind() == Formula::Kind::Const);
  CHECK(ps.matrix->left()->value() == Dyadic(1));

  FormulaPtr z = Formula::quantifier(Quant::Sup, "x", Formula::constant(Dyadic(0)));
  FormulaPtr dz = dualize(z);
  CHECK(classify(*dz) == SentenceClass::Existential);
  CHECK(dual_bound(*z) == Dyadic(0));

  FormulaPtr e = Formula::quantifier(Quant::Inf, "x", Formula::basic(TracePart::Re, x()));
  CHECK_THROWS_AS(dualize(e), PreconditionError);
}

TEST_CASE("simplify folds constants and identical distances") {
  TermPtr ix = StarTerm::product(StarTerm::one(), x());
  TermPtr xi = StarTerm::product(x(), StarTerm::one());
  FormulaPtr f = simplify(Formula::dist(ix, xi));
  REQUIRE(f->kind() == Formula::Kind::Const);
  CHECK(f->value().is_zero());

  FormulaPtr tz = simplify(Formula::basic(TracePart::Re, StarTerm::product(x(), StarTerm::zero())));
  REQUIRE(tz->kind() == Formula::Kind::Const);
  CHECK(tz->value().is_zero());

  FormulaPtr t1 = simplify(Formula::basic(TracePart::Im, StarTerm::one()));
  REQUIRE(t1->kind() == Formula::Kind::Const);
  CHECK(t1->value().is_zero());

  FormulaPtr sum = simplify(Formula::add(Formula::constant(Dyadic(1)),
                                         Formula::constant(Dyadic(BigInt(1), 1))));
  REQUIRE(sum->kind() == Formula::Kind::Const);
  CHECK(sum->value() == Dyadic(BigInt(3), 1));
}

TEST_CASE("substitute replaces free variables with embedded constants") {
  TracialAlgebra m2 = TracialAlgebra::matrix(2);
  AlgElement id = AlgElement::identity(m2);
  FormulaPtr f = Formula::dist(StarTerm::product(x(), y()), StarTerm::product(y(), x()));
  FormulaPtr g = substitute(f, {{"x", id}});
  CHECK(g->free_vars() == std::set<std::string>{"y"});
  // with x = 1 the two products are the same term after folding
  FormulaPtr s = simplify(g);
  REQUIRE(s->kind() == Formula::Kind::Const);
  CHECK(s->value().is_zero());
}

TEST_CASE("d agrees with its sqrt-trace expansion") {
  // d(s,t) = 2 sqrt(trRe(u* u)) with u = avg(s, -t)
  Rng rng(1234);
  TracialAlgebra m2 = TracialAlgebra::matrix(2);
  for (int it = 0; it < 50; ++it) {
    TermPtr s = random_term(rng, {"x", "y"}, 3, 3);
    TermPtr t = random_term(rng, {"x", "y"}, 3, 3);
    Assignment asg{{"x", random_unit_ball(m2, rng.next_u64())},
                   {"y", random_unit_ball(m2, rng.next_u64())}};
    double d = eval_qf(m2, *Formula::dist(s, t), asg);
    TermPtr u = StarTerm::average(s, StarTerm::scale({Dyadic(-1), Dyadic()}, t));
    double sq = eval_qf(
        m2, *Formula::basic(TracePart::Re, StarTerm::product(StarTerm::adj(u), u)), asg);
    CHECK(d == doctest::Approx(2.0 * std::sqrt(std::max(sq, 0.0))).epsilon(1e-9));
  }
}

TEST_CASE("node_count drives the slack budget") {
  FormulaPtr f = Formula::basic(TracePart::Re, StarTerm::product(x(), StarTerm::adj(x())));
  CHECK(f->node_count() == 5);
  CHECK(eval_slack(*f) == Dyadic(BigInt(9), 20));
}
