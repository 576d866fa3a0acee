#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "vna/dyadic.hpp"

namespace vna {

// Default operator-norm tolerance; optimizer projections produce boundary
// elements, so exact ball membership tests need a little room.
inline constexpr double kOpNormTol = 1e-9;

struct Block {
  int dim;        // n >= 1, the block is M_n
  Dyadic weight;  // > 0, weights sum to 1
};

// Finite direct sum of matrix algebras with a normalized weighted trace.
// Weights are exact dyadics and sum to 1, so the trace is faithful.
class TracialAlgebra {
public:
  explicit TracialAlgebra(std::vector<Block> blocks);
  static TracialAlgebra matrix(int n);  // M_n with weight 1

  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }

  // Sum of 2 n_i^2; drives the certified-optimizer dimension cap.
  int real_dimension() const;

  std::string str() const;  // "blocks: [n @ w, ...]"
  bool operator==(const TracialAlgebra& o) const;

private:
  std::vector<Block> blocks_;
};

// One complex matrix per block of some TracialAlgebra.
class AlgElement {
public:
  AlgElement() = default;
  explicit AlgElement(std::vector<Eigen::MatrixXcd> blocks);

  static AlgElement zero(const TracialAlgebra& a);
  static AlgElement identity(const TracialAlgebra& a);

  const std::vector<Eigen::MatrixXcd>& blocks() const { return blocks_; }
  std::vector<Eigen::MatrixXcd>& blocks() { return blocks_; }
  bool shaped_for(const TracialAlgebra& a) const;

  bool operator==(const AlgElement& o) const;

private:
  std::vector<Eigen::MatrixXcd> blocks_;
};

// Weighted normalized trace: sum_i w_i tr(x_i) / n_i; trace(1) = 1.
std::complex<double> trace(const TracialAlgebra& a, const AlgElement& x);

// ||x||_2 = sqrt(Re trace(x* x)) and the metric d(x, y) = ||x - y||_2.
double hs_norm(const TracialAlgebra& a, const AlgElement& x);
double hs_dist(const TracialAlgebra& a, const AlgElement& x, const AlgElement& y);

// Largest singular value across blocks.
double op_norm(const AlgElement& x);
bool in_unit_ball(const TracialAlgebra& a, const AlgElement& x, double tol = kOpNormTol);

// Singular-value clipping onto the operator-norm unit ball.
AlgElement project_unit_ball(const AlgElement& x);

AlgElement add(const AlgElement& x, const AlgElement& y);
AlgElement sub(const AlgElement& x, const AlgElement& y);
AlgElement neg(const AlgElement& x);
AlgElement scale(std::complex<double> c, const AlgElement& x);
AlgElement mul(const AlgElement& x, const AlgElement& y);
AlgElement adjoint(const AlgElement& x);
AlgElement average(const AlgElement& x, const AlgElement& y);

// Weighted direct sum t*B (+) (1-t)*A.  At the endpoints the degenerate
// zero-weight summand is dropped, so t=0 gives A and t=1 gives B and the
// trace stays faithful.
TracialAlgebra interpolate(const TracialAlgebra& b, const TracialAlgebra& a,
                           const Dyadic& t);
// Pair an element of B and an element of A into an element of the
// interior interpolation algebra (block concatenation).
AlgElement interpolate_pair(const AlgElement& xb, const AlgElement& xa);

// Unital trace-preserving embedding M_n -> M_2n, x |-> x (+) x.
// Single-block algebras only.
TracialAlgebra doubled(const TracialAlgebra& a);
AlgElement double_embed(const AlgElement& x);

// Deterministic seeded sampler with full support on the unit ball:
// Ginibre matrix scaled onto the sphere, then contracted by a uniform
// factor half of the time.
AlgElement random_unit_ball(const TracialAlgebra& a, std::uint64_t seed);

// Deterministic double-precision RNG used everywhere randomness is needed;
// raw mt19937_64 bits, so streams are identical across platforms.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double normal();
  std::complex<double> cnormal();

private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0;
};

}  // namespace vna
