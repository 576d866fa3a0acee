#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "vna/errors.hpp"
#include "vna/evaluate.hpp"

using namespace vna;
using namespace vnatest;

namespace {

AlgElement e12_m2() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(0, 1) = 1.0;
  return AlgElement({m});
}

AlgElement diag_m2(double a, double b) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return AlgElement({m});
}

}  // namespace

TEST_CASE("algebra construction and validation") {
  CHECK_THROWS_AS(TracialAlgebra({{2, Dyadic(BigInt(1), 1)}}), PreconditionError);
  CHECK_THROWS_AS(TracialAlgebra({{0, Dyadic(1)}}), PreconditionError);
  TracialAlgebra mix({{1, Dyadic(BigInt(1), 1)}, {2, Dyadic(BigInt(1), 1)}});
  CHECK(mix.real_dimension() == 10);
  CHECK(mix.str() == "blocks: [1 @ 1/2^1, 2 @ 1/2^1]");
}

TEST_CASE("trace") {
  TracialAlgebra m2 = TracialAlgebra::matrix(2);
  CHECK(trace(m2, AlgElement::identity(m2)) == std::complex<double>(1, 0));
  CHECK(trace(m2, diag_m2(1, 0)).real() == doctest::Approx(0.5));

  TracialAlgebra mix({{1, Dyadic(BigInt(1), 1)}, {2, Dyadic(BigInt(1), 1)}});
  // (1 ⊕ 0): half weight on the M_1 part
  AlgElement x(
      {Eigen::MatrixXcd::Identity(1, 1), Eigen::MatrixXcd::Zero(2, 2)});
  CHECK(trace(mix, x).real() == doctest::Approx(0.5));
  CHECK_THROWS_AS(trace(m2, x), PreconditionError);
}

TEST_CASE("hs_dist") {
  TracialAlgebra m2 = TracialAlgebra::matrix(2);
  AlgElement id = AlgElement::identity(m2), z = AlgElement::zero(m2);
  CHECK(hs_dist(m2, z, id) == doctest::Approx(1.0));
  CHECK(hs_dist(m2, e12_m2(), z) == doctest::Approx(std::sqrt(0.5)));
  CHECK(hs_dist(m2, id, id) == 0.0);
}

TEST_CASE("hs_dist is a metric on random triples") {
  Rng rng(5);
  TracialAlgebra mix({{1, Dyadic(BigInt(1), 2)}, {2, Dyadic(BigInt(3), 2)}});
  for (int i = 0; i < 200; ++i) {
    AlgElement a = random_unit_ball(mix, rng.next_u64());
    AlgElement b = random_unit_ball(mix, rng.next_u64());
    AlgElement c = random_unit_ball(mix, rng.next_u64());
    CHECK(hs_dist(mix, a, b) == doctest::Approx(hs_dist(mix, b, a)).epsilon(1e-12));
    CHECK(hs_dist(mix, a, c) <= hs_dist(mix, a, b) + hs_dist(mix, b, c) + 1e-9);
    // Cauchy-Schwarz chain: |tr(x)| <= ||x||_2 <= 1
    double tr = std::abs(trace(mix, a));
    CHECK(tr <= hs_dist(mix, a, AlgElement::zero(mix)) + 1e-9);
    CHECK(hs_dist(mix, a, AlgElement::zero(mix)) <= 1.0 + 1e-9);
  }
}

TEST_CASE("in_unit_ball") {
  TracialAlgebra m2 = TracialAlgebra::matrix(2);
  CHECK(in_unit_ball(m2, AlgElement::identity(m2), 0));
  CHECK(!in_unit_ball(m2, scale(2.0, AlgElement::identity(m2)), 1e-3));
  // e12 + e21 has both singular values 1
  AlgElement flip = add(e12_m2(), adjoint(e12_m2()));
  CHECK(in_unit_ball(m2, flip, 1e-12));
  CHECK(op_norm(flip) == doctest::Approx(1.0));
}

TEST_CASE("project_unit_ball clips singular values") {
  Rng rng(17);
  TracialAlgebra m3 = TracialAlgebra::matrix(3);
  for (int i = 0; i < 50; ++i) {
    AlgElement x = scale(3.0, random_unit_ball(m3, rng.next_u64()));
    AlgElement p = project_unit_ball(x);
    CHECK(op_norm(p) <= 1.0 + 1e-9);
    // projection is the identity on ball elements
    AlgElement q = project_unit_ball(p);
    CHECK(hs_dist(m3, p, q) <= 1e-9);
  }
}

TEST_CASE("interpolate") {
  TracialAlgebra m1 = TracialAlgebra::matrix(1);
  TracialAlgebra m2 = TracialAlgebra::matrix(2);

  CHECK(interpolate(m1, m2, Dyadic(1)) == m1);  // collapse at t = 1
  CHECK(interpolate(m1, m2, Dyadic(0)) == m2);  // collapse at t = 0

  TracialAlgebra half = interpolate(m1, m2, Dyadic(BigInt(1), 1));
  CHECK(half.block_count() == 2);
  CHECK(half.blocks()[0].dim == 1);
  CHECK(half.blocks()[0].weight == Dyadic(BigInt(1), 1));
  CHECK(half.blocks()[1].dim == 2);
  CHECK(half.blocks()[1].weight == Dyadic(BigInt(1), 1));

  // trace of the identity is exactly 1 for all dyadic t
  for (long long j = 0; j <= 16; ++j) {
    TracialAlgebra at = interpolate(m1, m2, Dyadic(BigInt(j), 4));
    CHECK(trace(at, AlgElement::identity(at)) == std::complex<double>(1, 0));
  }
  CHECK_THROWS_AS(interpolate(m1, m2, Dyadic(2)), PreconditionError);
  CHECK_THROWS_AS(interpolate(m1, m2, Dyadic(-1)), PreconditionError);
}

TEST_CASE("double_embed preserves trace, norm, and star-term values") {
  Rng rng(23);
  TracialAlgebra m2 = TracialAlgebra::matrix(2);
  TracialAlgebra m4 = doubled(m2);
  CHECK(m4.blocks()[0].dim == 4);

  CHECK(double_embed(AlgElement::identity(m2)) == AlgElement::identity(m4));

  for (int i = 0; i < 100; ++i) {
    AlgElement a = random_unit_ball(m2, rng.next_u64());
    AlgElement b = random_unit_ball(m2, rng.next_u64());
    AlgElement ea = double_embed(a), eb = double_embed(b);
    std::complex<double> t1 = trace(m2, a), t2 = trace(m4, ea);
    CHECK(t1.real() == doctest::Approx(t2.real()).epsilon(1e-12));
    CHECK(t1.imag() == doctest::Approx(t2.imag()).epsilon(1e-12));
    CHECK(hs_dist(m2, a, b) == doctest::Approx(hs_dist(m4, ea, eb)).epsilon(1e-12));
    CHECK(op_norm(a) == doctest::Approx(op_norm(ea)).epsilon(1e-12));
    // multiplicativity: embed(ab) = embed(a) embed(b)
    CHECK(hs_dist(m4, double_embed(mul(a, b)), mul(ea, eb)) <= 1e-12);
  }
  TracialAlgebra mix({{1, Dyadic(BigInt(1), 1)}, {2, Dyadic(BigInt(1), 1)}});
  CHECK_THROWS_AS(double_embed(AlgElement::identity(mix)), PreconditionError);
}

TEST_CASE("random_unit_ball: determinism, membership, symmetry") {
  TracialAlgebra m2 = TracialAlgebra::matrix(2);
  CHECK(random_unit_ball(m2, 9) == random_unit_ball(m2, 9));
  CHECK(!(random_unit_ball(m2, 9) == random_unit_ball(m2, 10)));

  double mean = 0;
  int n = 10000;
  for (int i = 0; i < n; ++i) {
    AlgElement x = random_unit_ball(m2, 1000 + i);
    CHECK(in_unit_ball(m2, x, 0));
    mean += trace(m2, x).real();
  }
  mean /= n;
  CHECK(std::abs(mean) < 0.05);  // symmetric sampler
}

TEST_CASE("eval_term examples") {
  TracialAlgebra m2 = TracialAlgebra::matrix(2);
  Assignment asg{{"x", e12_m2()}};
  AlgElement r = eval_term(m2, *StarTerm::adj(StarTerm::var("x")), asg);
  CHECK(r == adjoint(e12_m2()));

  // avg(1, -1) = 0
  AlgElement z = eval_term(
      m2, *StarTerm::average(StarTerm::one(),
                             StarTerm::scale({Dyadic(-1), Dyadic()}, StarTerm::one())), {});
  CHECK(hs_dist(m2, z, AlgElement::zero(m2)) == 0.0);

  CHECK_THROWS_AS(eval_term(m2, *StarTerm::var("w"), asg), PreconditionError);
}
