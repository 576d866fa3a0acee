#include "vna/algebra.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>

#include "vna/errors.hpp"

namespace vna {

TracialAlgebra::TracialAlgebra(std::vector<Block> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw PreconditionError("algebra needs at least one block");
  Dyadic total;
  for (const auto& b : blocks_) {
    if (b.dim < 1) throw PreconditionError("block dimension must be positive");
    if (b.weight.sign() <= 0) throw PreconditionError("block weight must be positive");
    total = total + b.weight;
  }
  if (!(total == Dyadic(1))) {
    throw PreconditionError("block weights must sum to 1, got " + total.str());
  }
}

TracialAlgebra TracialAlgebra::matrix(int n) {
  return TracialAlgebra({{n, Dyadic(1)}});
}

int TracialAlgebra::real_dimension() const {
  int d = 0;
  for (const auto& b : blocks_) d += 2 * b.dim * b.dim;
  return d;
}

std::string TracialAlgebra::str() const {
  std::string s = "blocks: [";
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(blocks_[i].dim) + " @ " + blocks_[i].weight.str();
  }
  return s + "]";
}

bool TracialAlgebra::operator==(const TracialAlgebra& o) const {
  if (blocks_.size() != o.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].dim != o.blocks_[i].dim) return false;
    if (!(blocks_[i].weight == o.blocks_[i].weight)) return false;
  }
  return true;
}

AlgElement::AlgElement(std::vector<Eigen::MatrixXcd> blocks)
    : blocks_(std::move(blocks)) {}

AlgElement AlgElement::zero(const TracialAlgebra& a) {
  std::vector<Eigen::MatrixXcd> m;
  m.reserve(a.block_count());
  for (const auto& b : a.blocks()) m.push_back(Eigen::MatrixXcd::Zero(b.dim, b.dim));
  return AlgElement(std::move(m));
}

AlgElement AlgElement::identity(const TracialAlgebra& a) {
  std::vector<Eigen::MatrixXcd> m;
  m.reserve(a.block_count());
  for (const auto& b : a.blocks()) m.push_back(Eigen::MatrixXcd::Identity(b.dim, b.dim));
  return AlgElement(std::move(m));
}

bool AlgElement::shaped_for(const TracialAlgebra& a) const {
  if (blocks_.size() != a.block_count()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].rows() != a.blocks()[i].dim) return false;
    if (blocks_[i].cols() != a.blocks()[i].dim) return false;
  }
  return true;
}

bool AlgElement::operator==(const AlgElement& o) const {
  if (blocks_.size() != o.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].rows() != o.blocks_[i].rows()) return false;
    if (blocks_[i].cols() != o.blocks_[i].cols()) return false;
    if (blocks_[i] != o.blocks_[i]) return false;
  }
  return true;
}

namespace {

void check_shape(const TracialAlgebra& a, const AlgElement& x, const char* who) {
  if (!x.shaped_for(a)) throw PreconditionError(std::string(who) + ": element shape mismatch");
}

void check_same_shape(const AlgElement& x, const AlgElement& y, const char* who) {
  if (x.blocks().size() != y.blocks().size())
    throw PreconditionError(std::string(who) + ": element shape mismatch");
  for (std::size_t i = 0; i < x.blocks().size(); ++i) {
    if (x.blocks()[i].rows() != y.blocks()[i].rows())
      throw PreconditionError(std::string(who) + ": element shape mismatch");
  }
}

}  // namespace

std::complex<double> trace(const TracialAlgebra& a, const AlgElement& x) {
  check_shape(a, x, "trace");
  std::complex<double> t = 0;
  for (std::size_t i = 0; i < a.block_count(); ++i) {
    t += a.blocks()[i].weight.to_double() * x.blocks()[i].trace() /
         static_cast<double>(a.blocks()[i].dim);
  }
  return t;
}

double hs_norm(const TracialAlgebra& a, const AlgElement& x) {
  check_shape(a, x, "hs_norm");
  double s = 0;
  for (std::size_t i = 0; i < a.block_count(); ++i) {
    s += a.blocks()[i].weight.to_double() * x.blocks()[i].squaredNorm() /
         static_cast<double>(a.blocks()[i].dim);
  }
  return std::sqrt(s);
}

double hs_dist(const TracialAlgebra& a, const AlgElement& x, const AlgElement& y) {
  check_shape(a, x, "hs_dist");
  check_shape(a, y, "hs_dist");
  double s = 0;
  for (std::size_t i = 0; i < a.block_count(); ++i) {
    s += a.blocks()[i].weight.to_double() *
         (x.blocks()[i] - y.blocks()[i]).squaredNorm() /
         static_cast<double>(a.blocks()[i].dim);
  }
  return std::sqrt(s);
}

double op_norm(const AlgElement& x) {
  double m = 0;
  for (const auto& b : x.blocks()) {
    if (b.rows() == 1) {
      m = std::max(m, std::abs(b(0, 0)));
    } else {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b);
      m = std::max(m, svd.singularValues()(0));
    }
  }
  return m;
}

bool in_unit_ball(const TracialAlgebra& a, const AlgElement& x, double tol) {
  check_shape(a, x, "in_unit_ball");
  if (tol < 0) throw PreconditionError("in_unit_ball: negative tolerance");
  return op_norm(x) <= 1.0 + tol;
}

AlgElement project_unit_ball(const AlgElement& x) {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(x.blocks().size());
  for (const auto& b : x.blocks()) {
    if (b.rows() == 1) {
      double m = std::abs(b(0, 0));
      out.push_back(m <= 1.0 ? b : b / m);
      continue;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::VectorXd sv = svd.singularValues();
    if (sv(0) <= 1.0) {
      out.push_back(b);
      continue;
    }
    for (int i = 0; i < sv.size(); ++i) sv(i) = std::min(sv(i), 1.0);
    out.push_back(svd.matrixU() * sv.asDiagonal() * svd.matrixV().adjoint());
  }
  return AlgElement(std::move(out));
}

AlgElement add(const AlgElement& x, const AlgElement& y) {
  check_same_shape(x, y, "add");
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(x.blocks().size());
  for (std::size_t i = 0; i < x.blocks().size(); ++i) out.push_back(x.blocks()[i] + y.blocks()[i]);
  return AlgElement(std::move(out));
}

AlgElement sub(const AlgElement& x, const AlgElement& y) {
  check_same_shape(x, y, "sub");
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(x.blocks().size());
  for (std::size_t i = 0; i < x.blocks().size(); ++i) out.push_back(x.blocks()[i] - y.blocks()[i]);
  return AlgElement(std::move(out));
}

AlgElement neg(const AlgElement& x) {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(x.blocks().size());
  for (const auto& b : x.blocks()) out.push_back(-b);
  return AlgElement(std::move(out));
}

AlgElement scale(std::complex<double> c, const AlgElement& x) {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(x.blocks().size());
  for (const auto& b : x.blocks()) out.push_back(c * b);
  return AlgElement(std::move(out));
}

AlgElement mul(const AlgElement& x, const AlgElement& y) {
  check_same_shape(x, y, "mul");
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(x.blocks().size());
  for (std::size_t i = 0; i < x.blocks().size(); ++i) out.push_back(x.blocks()[i] * y.blocks()[i]);
  return AlgElement(std::move(out));
}

AlgElement adjoint(const AlgElement& x) {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(x.blocks().size());
  for (const auto& b : x.blocks()) out.push_back(b.adjoint());
  return AlgElement(std::move(out));
}

AlgElement average(const AlgElement& x, const AlgElement& y) {
  check_same_shape(x, y, "average");
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(x.blocks().size());
  for (std::size_t i = 0; i < x.blocks().size(); ++i)
    out.push_back(0.5 * (x.blocks()[i] + y.blocks()[i]));
  return AlgElement(std::move(out));
}

TracialAlgebra interpolate(const TracialAlgebra& b, const TracialAlgebra& a,
                           const Dyadic& t) {
  if (t.sign() < 0 || t > Dyadic(1)) throw PreconditionError("interpolate: t outside [0,1]");
  if (t.is_zero()) return a;
  if (t == Dyadic(1)) return b;
  std::vector<Block> blocks;
  Dyadic s = Dyadic(1) - t;
  for (const auto& bb : b.blocks()) blocks.push_back({bb.dim, t * bb.weight});
  for (const auto& ab : a.blocks()) blocks.push_back({ab.dim, s * ab.weight});
  return TracialAlgebra(std::move(blocks));
}

AlgElement interpolate_pair(const AlgElement& xb, const AlgElement& xa) {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(xb.blocks().size() + xa.blocks().size());
  for (const auto& m : xb.blocks()) out.push_back(m);
  for (const auto& m : xa.blocks()) out.push_back(m);
  return AlgElement(std::move(out));
}

TracialAlgebra doubled(const TracialAlgebra& a) {
  if (a.block_count() != 1) throw PreconditionError("doubled: single-block algebras only");
  return TracialAlgebra::matrix(2 * a.blocks()[0].dim);
}

AlgElement double_embed(const AlgElement& x) {
  if (x.blocks().size() != 1) throw PreconditionError("double_embed: single-block input required");
  const auto& b = x.blocks()[0];
  Eigen::Index n = b.rows();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = b;
  m.bottomRightCorner(n, n) = b;
  return AlgElement({std::move(m)});
}

std::uint64_t Rng::next_u64() {
  // splitmix64; fixed bit stream for every platform
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  while (u1 <= 1e-300) u1 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

std::complex<double> Rng::cnormal() {
  constexpr double inv_sqrt2 = 0.7071067811865476;
  double re = normal(), im = normal();
  return {re * inv_sqrt2, im * inv_sqrt2};
}

AlgElement random_unit_ball(const TracialAlgebra& a, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(a.block_count());
  for (const auto& blk : a.blocks()) {
    Eigen::MatrixXcd g(blk.dim, blk.dim);
    for (int r = 0; r < blk.dim; ++r)
      for (int c = 0; c < blk.dim; ++c) g(r, c) = {rng.normal(), rng.normal()};
    out.push_back(std::move(g));
  }
  AlgElement x(std::move(out));
  double nrm = op_norm(x);
  if (nrm == 0) return x;  // all-zero draw, measure zero but handle it
  x = scale((1.0 - 1e-9) / nrm, x);
  if (rng.uniform() < 0.5) {
    x = scale(rng.uniform(), x);  // interior contraction
  }
  return x;
}

}  // namespace vna
