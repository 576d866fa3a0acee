// Shared test utilities: seeded random terms/formulas and an independent
// one-dimensional evaluator used as an oracle (plain complex arithmetic,
// no shared code with the engine under test).
#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "vna/algebra.hpp"
#include "vna/formula.hpp"

namespace vnatest {

using namespace vna;

struct GenProfile {
  int max_degree = 6;
  int max_term_depth = 4;
  int max_conn_depth = 3;
  bool allow_sqrt = false;
  bool allow_dist = true;
};

inline DyadicComplex random_unit_scalar(Rng& rng) {
  for (;;) {
    long long j = static_cast<long long>(rng.next_u64() % 33) - 16;
    long long k = static_cast<long long>(rng.next_u64() % 33) - 16;
    if (j * j + k * k <= 256) return {Dyadic(BigInt(j), 4), Dyadic(BigInt(k), 4)};
  }
}

inline TermPtr random_term(Rng& rng, const std::vector<std::string>& vars, int max_degree,
                           int depth) {
  double u = rng.uniform();
  if (depth <= 0 || u < 0.45) {
    double v = rng.uniform();
    if (v < 0.7 && !vars.empty())
      return StarTerm::var(vars[rng.next_u64() % vars.size()]);
    if (v < 0.9) return StarTerm::one();
    return StarTerm::zero();
  }
  if (u < 0.55) return StarTerm::adj(random_term(rng, vars, max_degree, depth - 1));
  if (u < 0.68)
    return StarTerm::scale(random_unit_scalar(rng), random_term(rng, vars, max_degree, depth - 1));
  if (u < 0.88 && max_degree >= 2) {
    int dl = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_degree - 1));
    return StarTerm::product(random_term(rng, vars, dl, depth - 1),
                             random_term(rng, vars, max_degree - dl, depth - 1));
  }
  return StarTerm::average(random_term(rng, vars, max_degree, depth - 1),
                           random_term(rng, vars, max_degree, depth - 1));
}

inline FormulaPtr random_qf(Rng& rng, const std::vector<std::string>& vars,
                            const GenProfile& prof, int depth) {
  double u = rng.uniform();
  if (depth <= 0 || u < 0.4) {
    double v = rng.uniform();
    if (v < 0.5)
      return Formula::basic(rng.uniform() < 0.8 ? TracePart::Re : TracePart::Im,
                            random_term(rng, vars, prof.max_degree, prof.max_term_depth));
    if (v < 0.75 && prof.allow_dist)
      return Formula::dist(random_term(rng, vars, prof.max_degree, prof.max_term_depth),
                           random_term(rng, vars, prof.max_degree, prof.max_term_depth));
    long long c = static_cast<long long>(rng.next_u64() % 9) - 4;
    return Formula::constant(Dyadic(BigInt(c), 2));
  }
  double w = rng.uniform();
  if (w < 0.2)
    return Formula::add(random_qf(rng, vars, prof, depth - 1),
                        random_qf(rng, vars, prof, depth - 1));
  if (w < 0.4)
    return Formula::monus(random_qf(rng, vars, prof, depth - 1),
                          random_qf(rng, vars, prof, depth - 1));
  if (w < 0.6)
    return Formula::fmax(random_qf(rng, vars, prof, depth - 1),
                         random_qf(rng, vars, prof, depth - 1));
  if (w < 0.75)
    return Formula::fmin(random_qf(rng, vars, prof, depth - 1),
                         random_qf(rng, vars, prof, depth - 1));
  if (w < 0.85) return Formula::abs(random_qf(rng, vars, prof, depth - 1));
  if (w < 0.93) {
    DyadicComplex s = random_unit_scalar(rng);
    return Formula::scale(s.re, random_qf(rng, vars, prof, depth - 1));
  }
  if (prof.allow_sqrt) return Formula::sqrt(random_qf(rng, vars, prof, depth - 1));
  return Formula::abs(random_qf(rng, vars, prof, depth - 1));
}

inline FormulaPtr random_universal(Rng& rng, int nvars, const GenProfile& prof) {
  std::vector<std::string> vars;
  for (int i = 0; i < nvars; ++i) vars.push_back("x" + std::to_string(i + 1));
  FormulaPtr f = random_qf(rng, vars, prof, prof.max_conn_depth);
  for (auto it = vars.rbegin(); it != vars.rend(); ++it)
    f = Formula::quantifier(Quant::Sup, *it, std::move(f));
  return f;
}

// ---------------------------------------------------------------------
// independent M_1 oracle: terms are complex numbers, traces are identity
// ---------------------------------------------------------------------

using M1Assignment = std::map<std::string, std::complex<double>>;

inline std::complex<double> m1_term(const StarTerm& t, const M1Assignment& asg) {
  switch (t.kind()) {
    case StarTerm::Kind::Var:
      return asg.at(t.name());
    case StarTerm::Kind::Zero:
      return 0;
    case StarTerm::Kind::One:
      return 1;
    case StarTerm::Kind::ConstElem:
      return t.const_value().blocks()[0](0, 0);
    case StarTerm::Kind::Adjoint:
      return std::conj(m1_term(*t.left(), asg));
    case StarTerm::Kind::Scale:
      return t.scalar().to_complex() * m1_term(*t.left(), asg);
    case StarTerm::Kind::Product:
      return m1_term(*t.left(), asg) * m1_term(*t.right(), asg);
    case StarTerm::Kind::Average:
      return 0.5 * (m1_term(*t.left(), asg) + m1_term(*t.right(), asg));
  }
  return 0;
}

inline double m1_qf(const Formula& f, const M1Assignment& asg) {
  switch (f.kind()) {
    case Formula::Kind::Basic: {
      std::complex<double> z = m1_term(*f.term(), asg);
      return f.trace_part() == TracePart::Re ? z.real() : z.imag();
    }
    case Formula::Kind::Dist:
      return std::abs(m1_term(*f.term(), asg) - m1_term(*f.term2(), asg));
    case Formula::Kind::Const:
      return f.value().to_double();
    case Formula::Kind::Add:
      return m1_qf(*f.left(), asg) + m1_qf(*f.right(), asg);
    case Formula::Kind::Scale:
      return f.value().to_double() * m1_qf(*f.left(), asg);
    case Formula::Kind::Monus:
      return std::max(m1_qf(*f.left(), asg) - m1_qf(*f.right(), asg), 0.0);
    case Formula::Kind::Max:
      return std::max(m1_qf(*f.left(), asg), m1_qf(*f.right(), asg));
    case Formula::Kind::Min:
      return std::min(m1_qf(*f.left(), asg), m1_qf(*f.right(), asg));
    case Formula::Kind::Abs:
      return std::abs(m1_qf(*f.left(), asg));
    case Formula::Kind::Sqrt:
      return std::sqrt(std::max(m1_qf(*f.left(), asg), 0.0));
    case Formula::Kind::Quantifier:
      break;
  }
  throw std::runtime_error("m1_qf: quantifier");
}

// Dense grid over the closed unit disk, boundary circle included.
inline std::vector<std::complex<double>> disk_grid(int n, int circle) {
  std::vector<std::complex<double>> pts;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      double re = -1.0 + 2.0 * i / n;
      double im = -1.0 + 2.0 * j / n;
      if (re * re + im * im <= 1.0) pts.emplace_back(re, im);
    }
  }
  for (int k = 0; k < circle; ++k) {
    double a = 2.0 * 3.14159265358979323846 * k / circle;
    pts.emplace_back(std::cos(a), std::sin(a));
  }
  return pts;
}

// Brute-force sup (or inf) of a quantifier-free matrix on M_1 over a dense
// grid; the module's independent oracle.
inline double m1_brute(const Formula& matrix, const std::vector<std::string>& vars,
                       bool maximize, int n, int circle) {
  auto pts = disk_grid(n, circle);
  double best = maximize ? -1e300 : 1e300;
  if (vars.size() == 1) {
    M1Assignment asg;
    for (auto& z : pts) {
      asg[vars[0]] = z;
      double v = m1_qf(matrix, asg);
      best = maximize ? std::max(best, v) : std::min(best, v);
    }
    return best;
  }
  if (vars.size() == 2) {
    M1Assignment asg;
    for (auto& z1 : pts) {
      for (auto& z2 : pts) {
        asg[vars[0]] = z1;
        asg[vars[1]] = z2;
        double v = m1_qf(matrix, asg);
        best = maximize ? std::max(best, v) : std::min(best, v);
      }
    }
    return best;
  }
  throw std::runtime_error("m1_brute: 1 or 2 variables only");
}

}  // namespace vnatest
