#include "vna/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <vector>

#include "vna/errors.hpp"

namespace vna {

Dyadic eval_slack(const Formula& f) {
  return Dyadic(static_cast<long long>(f.node_count() + 4)).div_pow2(20);
}

int resolve_workers(const EvalOptions& opts) {
  if (opts.workers > 0) return opts.workers;
  if (const char* env = std::getenv("VNA_WORKERS")) {
    int w = std::atoi(env);
    if (w > 0) return w;
  }
  return 1;
}

AlgElement eval_term(const TracialAlgebra& a, const StarTerm& t, const Assignment& asg) {
  switch (t.kind()) {
    case StarTerm::Kind::Var: {
      auto it = asg.find(t.name());
      if (it == asg.end()) throw PreconditionError("eval_term: missing variable " + t.name());
      if (!it->second.shaped_for(a)) throw PreconditionError("eval_term: element shape mismatch");
      return it->second;
    }
    case StarTerm::Kind::Zero:
      return AlgElement::zero(a);
    case StarTerm::Kind::One:
      return AlgElement::identity(a);
    case StarTerm::Kind::ConstElem:
      if (!t.const_value().shaped_for(a))
        throw PreconditionError("eval_term: constant @" + t.name() + " shape mismatch");
      return t.const_value();
    case StarTerm::Kind::Adjoint:
      return adjoint(eval_term(a, *t.left(), asg));
    case StarTerm::Kind::Scale:
      return scale(t.scalar().to_complex(), eval_term(a, *t.left(), asg));
    case StarTerm::Kind::Product:
      return mul(eval_term(a, *t.left(), asg), eval_term(a, *t.right(), asg));
    case StarTerm::Kind::Average:
      return average(eval_term(a, *t.left(), asg), eval_term(a, *t.right(), asg));
  }
  throw PreconditionError("eval_term: malformed term");
}

double eval_qf(const TracialAlgebra& a, const Formula& f, const Assignment& asg) {
  switch (f.kind()) {
    case Formula::Kind::Basic: {
      std::complex<double> tr = trace(a, eval_term(a, *f.term(), asg));
      return f.trace_part() == TracePart::Re ? tr.real() : tr.imag();
    }
    case Formula::Kind::Dist:
      return hs_dist(a, eval_term(a, *f.term(), asg), eval_term(a, *f.term2(), asg));
    case Formula::Kind::Const:
      return f.value().to_double();
    case Formula::Kind::Add:
      return eval_qf(a, *f.left(), asg) + eval_qf(a, *f.right(), asg);
    case Formula::Kind::Scale:
      return f.value().to_double() * eval_qf(a, *f.left(), asg);
    case Formula::Kind::Monus:
      return monus(eval_qf(a, *f.left(), asg), eval_qf(a, *f.right(), asg));
    case Formula::Kind::Max:
      return std::max(eval_qf(a, *f.left(), asg), eval_qf(a, *f.right(), asg));
    case Formula::Kind::Min:
      return std::min(eval_qf(a, *f.left(), asg), eval_qf(a, *f.right(), asg));
    case Formula::Kind::Abs:
      return std::abs(eval_qf(a, *f.left(), asg));
    case Formula::Kind::Sqrt:
      return std::sqrt(std::max(eval_qf(a, *f.left(), asg), 0.0));
    case Formula::Kind::Quantifier:
      throw PreconditionError("eval_qf: quantifier present");
  }
  throw PreconditionError("eval_qf: malformed AST");
}

namespace {

// ---------------------------------------------------------------------
// heuristic witness search
// ---------------------------------------------------------------------

std::vector<AlgElement> special_elements(const TracialAlgebra& a) {
  using cplx = std::complex<double>;
  auto per_block = [&](auto&& fill) {
    std::vector<Eigen::MatrixXcd> blocks;
    for (const auto& b : a.blocks()) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(b.dim, b.dim);
      fill(m, b.dim);
      blocks.push_back(std::move(m));
    }
    return AlgElement(std::move(blocks));
  };
  std::vector<AlgElement> out;
  out.push_back(AlgElement::zero(a));
  out.push_back(AlgElement::identity(a));
  out.push_back(per_block([](Eigen::MatrixXcd& m, int n) {
    for (int i = 0; i < n; ++i) m(i, i) = (i % 2 == 0) ? 1.0 : -1.0;
  }));
  out.push_back(per_block([](Eigen::MatrixXcd& m, int n) {
    if (n == 1) {
      m(0, 0) = 1.0;
      return;
    }
    for (int i = 0; i + 1 < n; i += 2) m(i, i + 1) = m(i + 1, i) = 1.0;
  }));
  out.push_back(per_block([](Eigen::MatrixXcd& m, int n) {
    if (n == 1) {
      m(0, 0) = cplx(0, 1);
      return;
    }
    for (int i = 0; i + 1 < n; i += 2) {
      m(i, i + 1) = cplx(0, 1);
      m(i + 1, i) = cplx(0, -1);
    }
  }));
  out.push_back(per_block([](Eigen::MatrixXcd& m, int n) {
    for (int i = 0; i < n; ++i) m(i, i) = cplx(0, 1);
  }));
  out.push_back(per_block([](Eigen::MatrixXcd& m, int n) {
    for (int i = 0; i < n; ++i) m(i, i) = -1.0;
  }));
  return out;
}

AlgElement random_direction(const TracialAlgebra& a, Rng& rng) {
  std::vector<Eigen::MatrixXcd> blocks;
  for (const auto& b : a.blocks()) {
    Eigen::MatrixXcd m(b.dim, b.dim);
    for (int r = 0; r < b.dim; ++r)
      for (int c = 0; c < b.dim; ++c) m(r, c) = {rng.normal(), rng.normal()};
    blocks.push_back(std::move(m));
  }
  return AlgElement(std::move(blocks));
}

struct HeurResult {
  double best = 0;
  Assignment asg;
  std::uint64_t evals = 0;
};

// Multi-start projected local search for sup (or inf) of a quantifier-free
// matrix over unit-ball tuples.  Deterministic in the seed; first
// incumbent wins ties.
HeurResult heuristic_opt(const TracialAlgebra& a, const std::vector<std::string>& vars,
                         const FormulaPtr& matrix, bool maximize,
                         std::uint64_t budget, std::uint64_t seed) {
  Rng rng(seed ^ 0xa5b35705u);
  HeurResult res;
  double best_score = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Assignment& asg) {
    double v = eval_qf(a, *matrix, asg);
    ++res.evals;
    double score = maximize ? v : -v;
    if (score > best_score) {
      best_score = score;
      res.best = v;
      res.asg = asg;
    }
    return score;
  };

  // deterministic special starts: diagonal sign patterns, flips, phases
  std::vector<AlgElement> specials = special_elements(a);
  std::size_t combos = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    combos *= specials.size();
    if (combos > 128) {
      combos = 128;
      break;
    }
  }
  for (std::size_t c = 0; c < combos && res.evals < budget; ++c) {
    Assignment asg;
    std::size_t idx = c;
    for (const auto& v : vars) {
      asg.emplace(v, specials[idx % specials.size()]);
      idx /= specials.size();
    }
    consider(asg);
  }

  // random starts on a quarter of the budget
  std::uint64_t random_starts = std::max<std::uint64_t>(4, budget / 4 / std::max<std::size_t>(1, vars.size()));
  for (std::uint64_t i = 0; i < random_starts && res.evals < budget; ++i) {
    Assignment asg;
    for (const auto& v : vars) asg.emplace(v, random_unit_ball(a, rng.next_u64()));
    consider(asg);
  }

  if (res.asg.empty()) {
    Assignment asg;
    for (const auto& v : vars) asg.emplace(v, AlgElement::zero(a));
    consider(asg);
  }

  // projected local search from the incumbent
  Assignment cur = res.asg;
  double cur_score = best_score;
  double step = 0.4;
  while (res.evals < budget && step > 1e-9) {
    Assignment prop = cur;
    for (auto& [name, el] : prop) {
      AlgElement dir = random_direction(a, rng);
      el = project_unit_ball(add(el, scale(step, dir)));
    }
    double s = consider(prop);
    if (s > cur_score) {
      cur = std::move(prop);
      cur_score = s;
      step = std::min(0.8, step * 1.25);
    } else {
      step *= 0.85;
    }
  }
  return res;
}

// ---------------------------------------------------------------------
// certified branch-and-bound
// ---------------------------------------------------------------------

// Coordinate layout: for each variable, for each block, row-major entries,
// two real coordinates (re, im) per complex entry.
struct Layout {
  const TracialAlgebra* alg = nullptr;
  std::vector<std::string> vars;
  int coords_per_var = 0;
  std::vector<double> metric_w;   // per in-var coordinate: weight/dim of its block
  std::vector<int> block_of;      // per in-var coordinate: block index
  std::vector<double> var_scale;  // per variable: modulus proxy for splitting
  std::vector<Modulus> moduli;    // per variable

  int total_coords() const { return coords_per_var * static_cast<int>(vars.size()); }
};

Layout make_layout(const TracialAlgebra& a, const std::vector<std::string>& vars,
                   const FormulaPtr& matrix) {
  Layout lay;
  lay.alg = &a;
  lay.vars = vars;
  for (std::size_t b = 0; b < a.block_count(); ++b) {
    const auto& blk = a.blocks()[b];
    double w = blk.weight.to_double() / blk.dim;
    for (int i = 0; i < 2 * blk.dim * blk.dim; ++i) {
      lay.metric_w.push_back(w);
      lay.block_of.push_back(static_cast<int>(b));
    }
  }
  lay.coords_per_var = static_cast<int>(lay.metric_w.size());
  for (const auto& v : vars) {
    Modulus m = continuity_modulus(*matrix, v);
    lay.var_scale.push_back(m.is_linear() ? m.linear_coeff() : m(1.0));
    lay.moduli.push_back(std::move(m));
  }
  return lay;
}

AlgElement coords_to_element(const Layout& lay, const double* c) {
  std::vector<Eigen::MatrixXcd> blocks;
  int at = 0;
  for (const auto& blk : lay.alg->blocks()) {
    Eigen::MatrixXcd m(blk.dim, blk.dim);
    for (int r = 0; r < blk.dim; ++r)
      for (int col = 0; col < blk.dim; ++col) {
        m(r, col) = {c[at], c[at + 1]};
        at += 2;
      }
    blocks.push_back(std::move(m));
  }
  return AlgElement(std::move(blocks));
}

void element_to_coords(const AlgElement& el, double* c) {
  int at = 0;
  for (const auto& m : el.blocks()) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index col = 0; col < m.cols(); ++col) {
        c[at] = m(r, col).real();
        c[at + 1] = m(r, col).imag();
        at += 2;
      }
  }
}

struct BnbBox {
  std::vector<double> lo, hi;
};

struct BoxEval {
  bool infeasible = false;
  double center_value = 0;
  double ub = 0;
  std::vector<double> proj_center;  // projected per-variable centers
};

// Sound upper bound for sup of the matrix over (box ∩ unit-ball tuples).
BoxEval evaluate_box(const Layout& lay, const TracialAlgebra& a, const FormulaPtr& matrix,
                     double global_hi, const BnbBox& box) {
  BoxEval ev;
  const int cpv = lay.coords_per_var;
  const int k = static_cast<int>(lay.vars.size());

  // ball-miss test: min Frobenius norm over the box exceeding sqrt(n)
  // proves every matrix in the block region has operator norm > 1
  for (int v = 0; v < k; ++v) {
    const double* lo = box.lo.data() + v * cpv;
    const double* hi = box.hi.data() + v * cpv;
    std::size_t nblocks = a.block_count();
    std::vector<double> min_frob_sq(nblocks, 0.0);
    for (int c = 0; c < cpv; ++c) {
      double m = 0;
      if (lo[c] > 0) m = lo[c];
      else if (hi[c] < 0) m = -hi[c];
      min_frob_sq[lay.block_of[c]] += m * m;
    }
    for (std::size_t b = 0; b < nblocks; ++b) {
      double dim = a.blocks()[b].dim;
      double lim = dim * (1.0 + kOpNormTol) * (1.0 + kOpNormTol);
      if (min_frob_sq[b] > lim) {
        ev.infeasible = true;
        return ev;
      }
    }
  }

  // project the center into the ball and evaluate there
  ev.proj_center.resize(box.lo.size());
  Assignment asg;
  for (int v = 0; v < k; ++v) {
    std::vector<double> mid(cpv);
    const double* lo = box.lo.data() + v * cpv;
    const double* hi = box.hi.data() + v * cpv;
    for (int c = 0; c < cpv; ++c) mid[c] = 0.5 * (lo[c] + hi[c]);
    AlgElement el = project_unit_ball(coords_to_element(lay, mid.data()));
    element_to_coords(el, ev.proj_center.data() + v * cpv);
    asg.emplace(lay.vars[v], std::move(el));
  }
  ev.center_value = eval_qf(a, *matrix, asg);

  // distance from the projected center to the farthest box corner, in d
  double spread = 0;
  for (int v = 0; v < k; ++v) {
    const double* lo = box.lo.data() + v * cpv;
    const double* hi = box.hi.data() + v * cpv;
    const double* pc = ev.proj_center.data() + v * cpv;
    double dsq = 0;
    for (int c = 0; c < cpv; ++c) {
      double away = std::max(std::abs(lo[c] - pc[c]), std::abs(hi[c] - pc[c]));
      dsq += lay.metric_w[c] * away * away;
    }
    spread += lay.moduli[v](std::sqrt(dsq));
  }
  ev.ub = std::min(global_hi, ev.center_value + spread);
  return ev;
}

struct BnbOutcome {
  double best = 0;
  Assignment witness;
  double residual_ub = 0;  // sound upper bound for the sup at stop
  bool complete = false;
  WorkCounters work;
};

// Branch and bound for sup over unit-ball tuples.  Splits the widest
// metric-weighted coordinate; prunes boxes that provably miss the ball or
// cannot beat the incumbent by delta.  With allow_partial the search stops
// at the node budget and reports the (still sound) residual upper bound.
BnbOutcome bnb_sup(const TracialAlgebra& a, const Layout& lay, const FormulaPtr& matrix,
                   double delta, const EvalOptions& opts, bool allow_partial,
                   double seed_best, const Assignment& seed_witness) {
  BnbOutcome out;
  out.best = seed_best;
  out.witness = seed_witness;

  DyadicInterval glob = bounds(*matrix);
  const double global_hi = glob.hi().to_double();
  const int workers = resolve_workers(opts);
  const int total = lay.total_coords();

  BnbBox root;
  root.lo.assign(total, -1.0);
  root.hi.assign(total, 1.0);
  std::vector<BnbBox> stack;
  stack.push_back(std::move(root));

  double residual = -std::numeric_limits<double>::infinity();
  const std::size_t chunk = 128;
  std::vector<BnbBox> round;
  std::vector<BoxEval> evals;

  while (!stack.empty()) {
    if (out.work.boxes >= opts.node_budget) {
      if (!allow_partial) throw ResourceLimitError("certify: branch-and-bound node budget exhausted");
      for (const auto& b : stack) {
        BoxEval ev = evaluate_box(lay, a, matrix, global_hi, b);
        if (!ev.infeasible) residual = std::max(residual, ev.ub);
      }
      out.residual_ub = std::max(residual, out.best + delta);
      out.complete = false;
      return out;
    }

    round.clear();
    std::size_t take = std::min(chunk, stack.size());
    for (std::size_t i = 0; i < take; ++i) {
      round.push_back(std::move(stack.back()));
      stack.pop_back();
    }
    evals.assign(round.size(), {});
    if (workers > 1 && round.size() > 1) {
      std::vector<std::future<void>> futs;
      std::size_t per = (round.size() + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        std::size_t b = w * per, e = std::min(round.size(), b + per);
        if (b >= e) break;
        futs.push_back(std::async(std::launch::async, [&, b, e] {
          for (std::size_t i = b; i < e; ++i)
            evals[i] = evaluate_box(lay, a, matrix, global_hi, round[i]);
        }));
      }
      for (auto& f : futs) f.get();
    } else {
      for (std::size_t i = 0; i < round.size(); ++i)
        evals[i] = evaluate_box(lay, a, matrix, global_hi, round[i]);
    }

    // merge sequentially in deterministic order; workers only filled in
    // pure evaluations, so the outcome does not depend on scheduling
    for (std::size_t i = 0; i < round.size(); ++i) {
      ++out.work.boxes;
      ++out.work.point_evals;
      const BoxEval& ev = evals[i];
      if (ev.infeasible) continue;
      if (ev.center_value > out.best) {
        out.best = ev.center_value;
        out.witness.clear();
        const int cpv = lay.coords_per_var;
        for (std::size_t v = 0; v < lay.vars.size(); ++v) {
          out.witness.emplace(lay.vars[v],
                              coords_to_element(lay, ev.proj_center.data() + v * cpv));
        }
      }
      if (ev.ub <= out.best + delta) continue;  // cannot beat incumbent by delta

      // split the coordinate with the largest modulus-weighted width
      const BnbBox& box = round[i];
      const int cpv = lay.coords_per_var;
      int best_c = 0;
      double best_score = -1;
      for (int c = 0; c < total; ++c) {
        int v = c / cpv;
        double half = 0.5 * (box.hi[c] - box.lo[c]);
        double score = half * std::sqrt(lay.metric_w[c % cpv]) * lay.var_scale[v];
        if (score > best_score) {
          best_score = score;
          best_c = c;
        }
      }
      double mid = 0.5 * (box.lo[best_c] + box.hi[best_c]);
      BnbBox left = box, right = box;
      left.hi[best_c] = mid;
      right.lo[best_c] = mid;
      stack.push_back(std::move(left));
      stack.push_back(std::move(right));
    }
  }

  out.complete = true;
  out.residual_ub = out.best + delta;
  return out;
}

// ---------------------------------------------------------------------
// certification drivers
// ---------------------------------------------------------------------

void check_dimension_cap(const TracialAlgebra& a, const EvalOptions& opts) {
  if (a.real_dimension() > opts.dimension_cap) {
    throw ResourceLimitError("certify: algebra real dimension " +
                             std::to_string(a.real_dimension()) +
                             " exceeds the per-variable cap " +
                             std::to_string(opts.dimension_cap));
  }
}

FormulaPtr negated(const FormulaPtr& f) { return Formula::scale(Dyadic(-1), f); }

struct SupSpec {
  std::vector<std::string> vars;
  FormulaPtr matrix;
};

bool is_abelian(const TracialAlgebra& a) {
  for (const auto& b : a.blocks())
    if (b.dim != 1) return false;
  return true;
}

// Certified sup of a quantifier-free matrix over unit-ball tuples.
CertifiedValue certify_sup(const TracialAlgebra& a, const SupSpec& spec, const Dyadic& eps,
                           const EvalOptions& opts) {
  FormulaPtr matrix =
      is_abelian(a) ? abelian_normalize(spec.matrix) : simplify(spec.matrix);
  if (matrix->kind() == Formula::Kind::Const) {
    CertifiedValue cv;
    cv.interval = DyadicInterval::point(matrix->value());
    Assignment asg;
    for (const auto& v : spec.vars) asg.emplace(v, AlgElement::zero(a));
    cv.witness = std::move(asg);
    return cv;
  }
  check_dimension_cap(a, opts);

  const Dyadic eta = eval_slack(*matrix);
  const double eta_d = eta.to_double();
  const double eps_d = eps.to_double();
  if (!(eta * Dyadic(6) <= eps)) {
    throw ResourceLimitError("certify: tolerance " + eps.str() +
                             " is below the declared numeric slack floor " +
                             (eta * Dyadic(6)).str());
  }
  const double delta = eps_d / 2;

  HeurResult heur =
      heuristic_opt(a, spec.vars, matrix, /*maximize=*/true, opts.heuristic_budget, opts.seed);

  Layout lay = make_layout(a, spec.vars, matrix);
  BnbOutcome bb = bnb_sup(a, lay, matrix, delta, opts, /*allow_partial=*/false,
                          heur.best, heur.asg);

  DyadicInterval glob = bounds(*matrix);
  Dyadic lo = Dyadic::max(glob.lo(), Dyadic::floor_to(bb.best - eta_d, kHullBits));
  Dyadic hi = Dyadic::min(glob.hi(), Dyadic::ceil_to(bb.best + delta + eta_d, kHullBits));
  if (lo > hi) lo = hi;  // exact bound beat the slack margin

  CertifiedValue cv;
  cv.interval = DyadicInterval(lo, hi);
  cv.witness = std::move(bb.witness);
  cv.work = bb.work;
  cv.work.heuristic_steps = heur.evals;
  return cv;
}

Assignment negate_keep(const Assignment& asg) { return asg; }

CertifiedValue certify_inf(const TracialAlgebra& a, const SupSpec& spec, const Dyadic& eps,
                           const EvalOptions& opts) {
  SupSpec neg{spec.vars, negated(spec.matrix)};
  CertifiedValue cv = certify_sup(a, neg, eps, opts);
  cv.interval = iv_neg(cv.interval);
  cv.witness = negate_keep(*cv.witness);
  return cv;
}

// Restrict every embedded constant of a term to one block, so the term can
// be evaluated on the single-block factor of a direct sum.
TermPtr restrict_term(const TermPtr& t, std::size_t block) {
  switch (t->kind()) {
    case StarTerm::Kind::ConstElem: {
      const auto& blocks = t->const_value().blocks();
      return StarTerm::constant(t->name(), AlgElement({blocks.at(block)}));
    }
    case StarTerm::Kind::Adjoint:
      return StarTerm::adj(restrict_term(t->left(), block));
    case StarTerm::Kind::Scale:
      return StarTerm::scale(t->scalar(), restrict_term(t->left(), block));
    case StarTerm::Kind::Product:
      return StarTerm::product(restrict_term(t->left(), block),
                               restrict_term(t->right(), block));
    case StarTerm::Kind::Average:
      return StarTerm::average(restrict_term(t->left(), block),
                               restrict_term(t->right(), block));
    default:
      return t;
  }
}

// d(s, t) on a direct sum splits as a weighted sum of independent
// per-block squared distances: with u = avg(s, -t),
//   d(s,t)^2 = sum_i 4 w_i trRe(u* u) evaluated in the block factor M_{n_i},
// and sup/inf distribute over the blocks since the unit ball of the sum is
// the product of the block balls.  This certifies Dist sentences on
// interpolation algebras without branching the joint entry space.
CertifiedValue certify_dist_blockwise(const TracialAlgebra& a, Quant dir,
                                      const std::vector<std::string>& vars,
                                      const FormulaPtr& matrix, const Dyadic& eps,
                                      const EvalOptions& opts) {
  const Dyadic eps_block = (eps * eps).div_pow2(3);
  DyadicInterval sum_sq = DyadicInterval::point(Dyadic());
  Assignment combined;
  WorkCounters work;
  std::vector<Assignment> block_witness(a.block_count());

  for (std::size_t b = 0; b < a.block_count(); ++b) {
    TermPtr u = StarTerm::average(restrict_term(matrix->term(), b),
                                  StarTerm::scale({Dyadic(-1), Dyadic()},
                                                  restrict_term(matrix->term2(), b)));
    FormulaPtr sq = Formula::basic(TracePart::Re, StarTerm::product(StarTerm::adj(u), u));
    TracialAlgebra factor = TracialAlgebra::matrix(a.blocks()[b].dim);
    SupSpec spec{vars, sq};
    CertifiedValue cv = dir == Quant::Sup ? certify_sup(factor, spec, eps_block, opts)
                                          : certify_inf(factor, spec, eps_block, opts);
    work.point_evals += cv.work.point_evals;
    work.boxes += cv.work.boxes;
    work.heuristic_steps += cv.work.heuristic_steps;
    Dyadic w4 = Dyadic(4) * a.blocks()[b].weight;
    sum_sq = iv_add(sum_sq, iv_scale(w4, cv.interval));
    block_witness[b] = std::move(*cv.witness);
  }

  // per-variable direct sums of the block witnesses
  for (const auto& v : vars) {
    std::vector<Eigen::MatrixXcd> blocks;
    for (std::size_t b = 0; b < a.block_count(); ++b)
      blocks.push_back(block_witness[b].at(v).blocks()[0]);
    combined.emplace(v, AlgElement(std::move(blocks)));
  }

  // squared sums can dip below zero only through the slack margin
  Dyadic lo_sq = Dyadic::max(sum_sq.lo(), Dyadic());
  CertifiedValue cv;
  cv.interval = iv_sqrt(DyadicInterval(lo_sq, Dyadic::max(lo_sq, sum_sq.hi())), kHullBits);
  cv.witness = std::move(combined);
  cv.work = work;
  return cv;
}

// ---------------------------------------------------------------------
// exists-forall: saddle bracketing with recursive inner certification
// ---------------------------------------------------------------------

struct EaSplit {
  std::vector<std::string> inf_vars, sup_vars;
  FormulaPtr matrix;
};

EaSplit split_ea(const FormulaPtr& f) {
  PrefixSplit p = strip_prefix(f);
  EaSplit out;
  std::size_t i = 0;
  while (i < p.prefix.size() && p.prefix[i].first == Quant::Inf)
    out.inf_vars.push_back(p.prefix[i++].second);
  while (i < p.prefix.size() && p.prefix[i].first == Quant::Sup)
    out.sup_vars.push_back(p.prefix[i++].second);
  out.matrix = p.matrix;
  return out;
}

CertifiedValue certify_ea(const TracialAlgebra& a, const FormulaPtr& sentence,
                          const Dyadic& eps, const EvalOptions& opts) {
  check_dimension_cap(a, opts);
  EaSplit ea = split_ea(sentence);
  const Dyadic half = eps.div_pow2(1);

  auto mk_assignment = [&](const std::vector<std::string>& names, const AlgElement& el) {
    Assignment asg;
    for (const auto& n : names) asg.emplace(n, el);
    return asg;
  };

  std::vector<Assignment> cand_x = {mk_assignment(ea.inf_vars, AlgElement::identity(a)),
                                    mk_assignment(ea.inf_vars, AlgElement::zero(a))};
  std::vector<Assignment> cand_y = {mk_assignment(ea.sup_vars, AlgElement::identity(a)),
                                    mk_assignment(ea.sup_vars, AlgElement::zero(a))};

  // heuristic outer candidate: minimize the heuristic inner sup
  {
    Rng rng(opts.seed ^ 0x5151u);
    double best = std::numeric_limits<double>::infinity();
    Assignment best_x;
    std::uint64_t outer = std::max<std::uint64_t>(8, opts.heuristic_budget / 128);
    for (std::uint64_t i = 0; i < outer; ++i) {
      Assignment xs;
      for (const auto& n : ea.inf_vars) xs.emplace(n, random_unit_ball(a, rng.next_u64()));
      HeurResult inner = heuristic_opt(a, ea.sup_vars, substitute(ea.matrix, xs), true,
                                       std::max<std::uint64_t>(32, opts.heuristic_budget / 64),
                                       rng.next_u64());
      if (inner.best < best) {
        best = inner.best;
        best_x = std::move(xs);
      }
    }
    if (!best_x.empty()) cand_x.push_back(std::move(best_x));
  }

  WorkCounters work;
  std::vector<std::optional<DyadicInterval>> upper_cache(cand_x.size());
  // per-candidate budget slice; one stubborn candidate must not starve the rest
  EvalOptions slice = opts;
  slice.node_budget = std::min<std::uint64_t>(opts.node_budget, 400'000);

  Dyadic u_best;
  std::size_t u_arg = 0;
  bool have_u = false;

  for (int round = 0; round < opts.saddle_rounds; ++round) {
    // L: certified lower bound through the finite sup-candidate envelope
    FormulaPtr envelope;
    for (const auto& ys : cand_y) {
      FormulaPtr inst = substitute(ea.matrix, ys);
      envelope = envelope ? Formula::fmax(envelope, inst) : inst;
    }
    Dyadic l_best = bounds(*ea.matrix).lo();  // trivially sound fallback
    try {
      CertifiedValue lower = certify_inf(a, SupSpec{ea.inf_vars, envelope}, half, slice);
      work.point_evals += lower.work.point_evals;
      work.boxes += lower.work.boxes;
      l_best = lower.interval.lo();
    } catch (const ResourceLimitError&) {
    }

    // U: lazily certify inner sups over outer candidates, cheapest first,
    // and stop as soon as the bracket closes
    for (std::size_t i = 0; i < cand_x.size(); ++i) {
      if (!upper_cache[i]) {
        SupSpec spec{ea.sup_vars, substitute(ea.matrix, cand_x[i])};
        FormulaPtr smat = simplify(spec.matrix);
        try {
          CertifiedValue cv;
          if (smat->kind() == Formula::Kind::Dist && a.block_count() >= 2) {
            cv = certify_dist_blockwise(a, Quant::Sup, ea.sup_vars, smat, half, slice);
          } else {
            cv = certify_sup(a, spec, half, slice);
          }
          work.point_evals += cv.work.point_evals;
          work.boxes += cv.work.boxes;
          upper_cache[i] = cv.interval;
        } catch (const ResourceLimitError&) {
          continue;  // no tight upper bound from this candidate
        }
      }
      if (!have_u || upper_cache[i]->hi() < u_best) {
        u_best = upper_cache[i]->hi();
        u_arg = i;
        have_u = true;
      }
      if (have_u && u_best - l_best <= eps) {
        CertifiedValue cv;
        cv.interval = DyadicInterval(Dyadic::min(l_best, u_best), u_best);
        cv.witness = cand_x[u_arg];
        cv.work = work;
        return cv;
      }
    }

    // enrich both candidate sets and try again
    if (cand_y.size() < 8 && have_u) {
      HeurResult inner = heuristic_opt(a, ea.sup_vars, substitute(ea.matrix, cand_x[u_arg]),
                                       true, opts.heuristic_budget / 4,
                                       opts.seed + 977 * (round + 1));
      cand_y.push_back(std::move(inner.asg));
    }
    if (cand_x.size() < 8) {
      HeurResult outer = heuristic_opt(a, ea.inf_vars, envelope, false,
                                       opts.heuristic_budget / 4,
                                       opts.seed + 499 * (round + 1));
      cand_x.push_back(std::move(outer.asg));
      upper_cache.push_back(std::nullopt);
    }
  }
  throw ResourceLimitError("certify: exists-forall saddle gap did not close at this tolerance");
}

}  // namespace

CertifiedValue optimize(const TracialAlgebra& a, const FormulaPtr& sentence,
                        const EvalOptions& opts) {
  if (opts.heuristic_budget == 0) throw PreconditionError("optimize: zero budget");
  SentenceClass cls = classify(*sentence);
  PrefixSplit split = strip_prefix(sentence);
  std::vector<std::string> vars;
  for (auto& [q, n] : split.prefix) vars.push_back(n);
  const Dyadic eta = eval_slack(*split.matrix);
  DyadicInterval glob = bounds(*split.matrix);

  CertifiedValue cv;
  cv.certified = false;
  switch (cls) {
    case SentenceClass::QuantifierFree: {
      double v = eval_qf(a, *split.matrix, {});
      cv.interval = interval_hull(std::span(&v, 1), eta);
      cv.witness = Assignment{};
      cv.work.point_evals = 1;
      return cv;
    }
    case SentenceClass::Universal: {
      HeurResult h = heuristic_opt(a, vars, split.matrix, true, opts.heuristic_budget, opts.seed);
      Dyadic lo = Dyadic::max(glob.lo(), Dyadic::floor_to(h.best, kHullBits) - eta);
      cv.interval = DyadicInterval(Dyadic::min(lo, glob.hi()), glob.hi());
      cv.witness = std::move(h.asg);
      cv.work.heuristic_steps = h.evals;
      return cv;
    }
    case SentenceClass::Existential: {
      HeurResult h = heuristic_opt(a, vars, split.matrix, false, opts.heuristic_budget, opts.seed);
      Dyadic hi = Dyadic::min(glob.hi(), Dyadic::ceil_to(h.best, kHullBits) + eta);
      cv.interval = DyadicInterval(glob.lo(), Dyadic::max(hi, glob.lo()));
      cv.witness = std::move(h.asg);
      cv.work.heuristic_steps = h.evals;
      return cv;
    }
    case SentenceClass::ExistsForall: {
      EaSplit ea = split_ea(sentence);
      Rng rng(opts.seed ^ 0x77aa11u);
      double best = std::numeric_limits<double>::infinity();
      Assignment best_x = [&] {
        Assignment asg;
        for (const auto& n : ea.inf_vars) asg.emplace(n, AlgElement::identity(a));
        return asg;
      }();
      std::uint64_t outer = std::max<std::uint64_t>(8, opts.heuristic_budget / 64);
      std::uint64_t inner_budget = std::max<std::uint64_t>(32, opts.heuristic_budget / 64);
      std::vector<Assignment> starts = {best_x};
      Assignment zeros;
      for (const auto& n : ea.inf_vars) zeros.emplace(n, AlgElement::zero(a));
      starts.push_back(std::move(zeros));
      for (std::uint64_t i = 0; i < outer; ++i) {
        Assignment xs;
        for (const auto& n : ea.inf_vars) xs.emplace(n, random_unit_ball(a, rng.next_u64()));
        starts.push_back(std::move(xs));
      }
      for (auto& xs : starts) {
        HeurResult inner = heuristic_opt(a, ea.sup_vars, substitute(ea.matrix, xs), true,
                                         inner_budget, rng.next_u64());
        cv.work.heuristic_steps += inner.evals;
        if (inner.best < best) {
          best = inner.best;
          best_x = std::move(xs);
        }
      }
      // honest upper end: a sound (possibly partial) certified bound for
      // the inner sup at the chosen witness
      SupSpec spec{ea.sup_vars, simplify(substitute(ea.matrix, best_x))};
      EvalOptions inner_opts = opts;
      inner_opts.node_budget = std::min<std::uint64_t>(opts.node_budget, 200'000);
      double ub;
      if (spec.matrix->kind() == Formula::Kind::Const) {
        ub = spec.matrix->value().to_double();
      } else {
        HeurResult h = heuristic_opt(a, ea.sup_vars, spec.matrix, true, opts.heuristic_budget / 4,
                                     opts.seed ^ 0x3141u);
        Layout lay = make_layout(a, ea.sup_vars, spec.matrix);
        BnbOutcome bb = bnb_sup(a, lay, spec.matrix, 1.0 / 64, inner_opts, true, h.best, h.asg);
        cv.work.boxes += bb.work.boxes;
        ub = bb.residual_ub;
      }
      Dyadic hi = Dyadic::min(glob.hi(), Dyadic::ceil_to(ub, kHullBits) + eval_slack(*ea.matrix));
      cv.interval = DyadicInterval(glob.lo(), Dyadic::max(hi, glob.lo()));
      cv.witness = std::move(best_x);
      return cv;
    }
    default:
      throw PreconditionError("optimize: unsupported sentence class");
  }
}

CertifiedValue certify(const TracialAlgebra& a, const FormulaPtr& sentence, const Dyadic& eps,
                       const EvalOptions& opts) {
  if (eps.sign() <= 0) throw PreconditionError("certify: eps must be positive");
  SentenceClass cls = classify(*sentence);
  PrefixSplit split = strip_prefix(sentence);
  std::vector<std::string> vars;
  for (auto& [q, n] : split.prefix) vars.push_back(n);

  switch (cls) {
    case SentenceClass::QuantifierFree: {
      FormulaPtr m = simplify(split.matrix);
      if (m->kind() == Formula::Kind::Const) {
        CertifiedValue cv;
        cv.interval = DyadicInterval::point(m->value());
        cv.witness = Assignment{};
        return cv;
      }
      const Dyadic eta = eval_slack(*m);
      if (!(eta * Dyadic(6) <= eps))
        throw ResourceLimitError("certify: tolerance below the declared numeric slack floor");
      double v = eval_qf(a, *m, {});
      CertifiedValue cv;
      cv.interval = interval_hull(std::span(&v, 1), eta);
      cv.witness = Assignment{};
      cv.work.point_evals = 1;
      return cv;
    }
    case SentenceClass::Universal:
    case SentenceClass::Existential: {
      Quant dir = cls == SentenceClass::Universal ? Quant::Sup : Quant::Inf;
      FormulaPtr m = simplify(split.matrix);
      if (m->kind() == Formula::Kind::Dist && a.block_count() >= 2) {
        check_dimension_cap(a, opts);
        return certify_dist_blockwise(a, dir, vars, m, eps, opts);
      }
      SupSpec spec{vars, split.matrix};
      return dir == Quant::Sup ? certify_sup(a, spec, eps, opts)
                               : certify_inf(a, spec, eps, opts);
    }
    case SentenceClass::ExistsForall:
      return certify_ea(a, sentence, eps, opts);
    default:
      throw PreconditionError("certify: unsupported quantifier prefix");
  }
}

}  // namespace vna
