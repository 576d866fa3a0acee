#include "vna/cep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "vna/errors.hpp"
#include "vna/parser.hpp"

namespace vna {

namespace {

// letters x_1 < x_1* < x_2 < x_2* < ...
struct Letter {
  int var;
  bool star;
};

TermPtr letter_term(const Letter& l) {
  TermPtr v = StarTerm::var("x" + std::to_string(l.var + 1));
  return l.star ? StarTerm::adj(std::move(v)) : v;
}

Dyadic round_to(double x, unsigned bits) {
  return Dyadic::floor_to(x + std::ldexp(1.0, -static_cast<int>(bits) - 1), bits);
}

}  // namespace

SeparationSentence build_separation(int degree_bound, const TracialAlgebra& a,
                                    const std::vector<AlgElement>& tuple,
                                    const SeparationOptions& opts) {
  if (degree_bound < 1) throw PreconditionError("build_separation: degree bound must be >= 1");
  if (tuple.empty()) throw PreconditionError("build_separation: empty tuple");
  for (const auto& el : tuple) {
    if (!in_unit_ball(a, el))
      throw PreconditionError("build_separation: tuple element outside the unit ball");
  }

  const int letters = 2 * static_cast<int>(tuple.size());
  std::size_t total = 0;
  std::size_t pow = 1;
  for (int d = 1; d <= degree_bound; ++d) {
    pow *= letters;
    total += pow;
    if (total > opts.monomial_limit)
      throw ResourceLimitError("build_separation: monomial count exceeds limit");
  }

  Assignment ref;
  for (std::size_t i = 0; i < tuple.size(); ++i)
    ref.emplace("x" + std::to_string(i + 1), tuple[i]);

  SeparationSentence out;
  out.degree_bound = degree_bound;
  out.algebra = a;
  out.tuple = tuple;

  FormulaPtr matrix;
  // canonical order: by degree, then lexicographic in the letters
  for (int d = 1; d <= degree_bound; ++d) {
    std::vector<int> word(d, 0);
    for (;;) {
      TermPtr mono;
      for (int i = 0; i < d; ++i) {
        Letter l{word[i] / 2, word[i] % 2 == 1};
        TermPtr lt = letter_term(l);
        mono = mono ? StarTerm::product(mono, std::move(lt)) : std::move(lt);
      }
      out.monomials.push_back(format_term(*mono));

      std::complex<double> tr = trace(a, eval_term(a, *mono, ref));
      Dyadic cre = round_to(tr.real(), opts.constant_bits);
      Dyadic cim = round_to(tr.imag(), opts.constant_bits);
      FormulaPtr dre = Formula::abs(
          Formula::add(Formula::basic(TracePart::Re, mono), Formula::constant(-cre)));
      FormulaPtr dim = Formula::abs(
          Formula::add(Formula::basic(TracePart::Im, mono), Formula::constant(-cim)));
      FormulaPtr piece = Formula::fmax(std::move(dre), std::move(dim));
      matrix = matrix ? Formula::fmax(matrix, std::move(piece)) : std::move(piece);

      // next word
      int pos = d - 1;
      while (pos >= 0 && word[pos] == letters - 1) word[pos--] = 0;
      if (pos < 0) break;
      ++word[pos];
    }
  }

  FormulaPtr sentence = matrix;
  for (int i = static_cast<int>(tuple.size()); i >= 1; --i)
    sentence = Formula::quantifier(Quant::Inf, "x" + std::to_string(i), std::move(sentence));
  out.sentence = std::move(sentence);
  return out;
}

std::vector<std::pair<Dyadic, CertifiedValue>> interpolation_scan(
    const FormulaPtr& sentence, const TracialAlgebra& b, const TracialAlgebra& a,
    std::span<const Dyadic> grid, const Dyadic& eps, const EvalOptions& opts) {
  std::vector<std::pair<Dyadic, CertifiedValue>> out;
  for (const Dyadic& t : grid) {
    if (t.sign() < 0 || t > Dyadic(1))
      throw PreconditionError("interpolation_scan: grid point outside [0,1]");
    TracialAlgebra at = interpolate(b, a, t);
    out.emplace_back(t, certify(at, sentence, eps, opts));
  }
  return out;
}

double scan_continuity_coeff(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Basic:
    case Formula::Kind::Dist:
      // trace and squared-distance leaves are affine in t with slope at
      // most 2 resp. 4; the sqrt trick turns the latter into 2 sqrt(dt)
      return 2.0;
    case Formula::Kind::Const:
      return 0.0;
    case Formula::Kind::Add:
    case Formula::Kind::Monus:
      return scan_continuity_coeff(*f.left()) + scan_continuity_coeff(*f.right());
    case Formula::Kind::Scale:
      return std::abs(f.value().to_double()) * scan_continuity_coeff(*f.left());
    case Formula::Kind::Max:
    case Formula::Kind::Min:
      return std::max(scan_continuity_coeff(*f.left()), scan_continuity_coeff(*f.right()));
    case Formula::Kind::Abs:
      return scan_continuity_coeff(*f.left());
    case Formula::Kind::Sqrt:
      return std::numeric_limits<double>::infinity();
    case Formula::Kind::Quantifier:
      return scan_continuity_coeff(*f.left());
  }
  return std::numeric_limits<double>::infinity();
}

DistinctValues distinct_values_demo(const FormulaPtr& sentence, const TracialAlgebra& b,
                                    const TracialAlgebra& a, int count, const Dyadic& eps,
                                    const EvalOptions& opts) {
  if (count < 1) throw PreconditionError("distinct_values_demo: count must be >= 1");
  DistinctValues out;
  out.requested = count;

  CertifiedValue at_a = certify(a, sentence, eps, opts);  // t = 0
  CertifiedValue at_b = certify(b, sentence, eps, opts);  // t = 1
  Dyadic gap = Dyadic::max(at_b.interval.lo() - at_a.interval.hi(),
                           at_a.interval.lo() - at_b.interval.hi());
  if (!(gap > eps * Dyadic(2)))
    throw PreconditionError(
        "distinct_values_demo: certified endpoint gap too small at this eps");

  std::map<Dyadic, DyadicInterval> scanned;
  scanned.emplace(Dyadic(0), at_a.interval);
  scanned.emplace(Dyadic(1), at_b.interval);

  unsigned level = 2;
  while (static_cast<std::size_t>(1) << level < 2 * static_cast<std::size_t>(count)) ++level;
  for (unsigned round = 0; round < 4; ++round, ++level) {
    std::size_t n = static_cast<std::size_t>(1) << level;
    for (std::size_t j = 1; j < n; ++j) {
      Dyadic t(BigInt(static_cast<long long>(j)), level);
      if (scanned.contains(t)) continue;
      TracialAlgebra at = interpolate(b, a, t);
      scanned.emplace(t, certify(at, sentence, eps, opts).interval);
    }

    // greedy disjoint selection over the scanned values
    std::vector<std::pair<Dyadic, DyadicInterval>> pts(scanned.begin(), scanned.end());
    std::sort(pts.begin(), pts.end(),
              [](const auto& x, const auto& y) { return x.second.lo() < y.second.lo(); });
    std::vector<std::pair<Dyadic, DyadicInterval>> kept;
    for (const auto& p : pts) {
      if (kept.empty() || p.second.lo() > kept.back().second.hi()) kept.push_back(p);
    }
    if (static_cast<int>(kept.size()) >= count) {
      out.points = std::move(kept);
      out.achieved = true;
      return out;
    }
    out.points = std::move(kept);  // best so far
  }
  out.achieved = false;
  return out;
}

std::string scan_to_text(std::span<const std::pair<Dyadic, CertifiedValue>> scan) {
  std::string s;
  for (const auto& [t, cv] : scan) {
    s += "t=" + t.str() + " lo=" + cv.interval.lo().str() + " hi=" + cv.interval.hi().str() +
         (cv.certified ? "" : " tag=heuristic") + "\n";
  }
  return s;
}

}  // namespace vna
