#include "vna/presentation.hpp"

#include <algorithm>
#include <cmath>

#include "vna/errors.hpp"

namespace vna {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t z = seed + (i + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Presentation Presentation::finite(TracialAlgebra carrier, std::vector<AlgElement> gens,
                                  int tuple_arity, bool cycle) {
  if (gens.empty()) throw PreconditionError("presentation: empty generator list");
  if (tuple_arity < 1) throw PreconditionError("presentation: arity must be >= 1");
  for (const auto& g : gens) {
    if (!in_unit_ball(carrier, g))
      throw PreconditionError("presentation: generator outside the unit ball");
  }
  Presentation p;
  p.carrier_ = std::move(carrier);
  p.arity_ = tuple_arity;
  p.kind_ = cycle ? GenKind::FiniteCycled : GenKind::Finite;
  p.gens_ = std::move(gens);
  return p;
}

Presentation Presentation::seeded_rule(TracialAlgebra carrier, std::uint64_t seed,
                                       int tuple_arity) {
  if (tuple_arity < 1) throw PreconditionError("presentation: arity must be >= 1");
  Presentation p;
  p.carrier_ = std::move(carrier);
  p.arity_ = tuple_arity;
  p.kind_ = GenKind::SeededRule;
  p.seed_ = seed;
  return p;
}

std::optional<AlgElement> Presentation::generator(std::size_t i) const {
  switch (kind_) {
    case GenKind::Finite:
      if (i >= gens_.size()) return std::nullopt;
      return gens_[i];
    case GenKind::FiniteCycled:
      return gens_[i % gens_.size()];
    case GenKind::SeededRule:
      // rule stream: index 0 is the identity (so 1 generates), then
      // full-support unit-ball samples
      if (i == 0) return AlgElement::identity(carrier_);
      return random_unit_ball(carrier_, mix_seed(seed_, i));
  }
  return std::nullopt;
}

std::optional<std::vector<std::size_t>> Presentation::tuple_indices(std::size_t i) const {
  const int m = arity_;
  std::size_t limit = kind_ == GenKind::Finite ? gens_.size() : SIZE_MAX;
  std::size_t remaining = i;
  for (std::size_t top = 0; top < limit; ++top) {
    // tuples whose largest index is exactly `top`, in lexicographic order
    std::size_t inner = 1, outer = 1;
    for (int j = 0; j < m; ++j) {
      inner = (top == 0) ? 0 : inner * top;
      outer *= top + 1;
    }
    std::size_t block = outer - inner;
    if (remaining >= block) {
      remaining -= block;
      continue;
    }
    std::vector<std::size_t> word(m, 0);
    for (std::size_t v = 0;; ++v) {
      bool has_top = std::any_of(word.begin(), word.end(),
                                 [&](std::size_t x) { return x == top; });
      if (has_top) {
        if (remaining == 0) return word;
        --remaining;
      }
      (void)v;
      int pos = m - 1;
      while (pos >= 0 && word[pos] == top) word[pos--] = 0;
      if (pos < 0) break;
      ++word[pos];
    }
  }
  return std::nullopt;
}

DyadicInterval Presentation::enumerate_value(const TermPtr& f,
                                             std::span<const std::size_t> indices,
                                             unsigned n, TracePart channel) const {
  std::set<std::string> fv = f->free_vars();
  if (fv.size() != indices.size())
    throw PreconditionError("enumerate_value: index count does not match free variables");
  if (n > max_precision(f))
    throw PreconditionError("enumerate_value: precision beyond the declared slack floor");
  Assignment asg;
  std::size_t at = 0;
  for (const auto& v : fv) {
    auto g = generator(indices[at++]);
    if (!g) throw PreconditionError("enumerate_value: generator index out of range");
    asg.emplace(v, std::move(*g));
  }
  std::complex<double> tr = trace(carrier_, eval_term(carrier_, *f, asg));
  double value = channel == TracePart::Re ? tr.real() : tr.imag();
  // symmetric window around the fixed evaluation point: widths 2^-n, nested
  Dyadic center = Dyadic::from_double(value);
  Dyadic half = Dyadic(1).div_pow2(n + 1);
  return {center - half, center + half};
}

unsigned Presentation::max_precision(const TermPtr& f) const {
  Dyadic slack = Dyadic(static_cast<long long>(f->node_count() + 4)).div_pow2(20);
  unsigned n = 0;
  while (n < 40 && Dyadic(1).div_pow2(n + 2) >= slack) ++n;
  return n;
}

bool Presentation::operator==(const Presentation& o) const {
  if (!(carrier_ == o.carrier_) || arity_ != o.arity_ || kind_ != o.kind_) return false;
  if (kind_ == GenKind::SeededRule) return seed_ == o.seed_;
  if (gens_.size() != o.gens_.size()) return false;
  for (std::size_t i = 0; i < gens_.size(); ++i)
    if (!(gens_[i] == o.gens_[i])) return false;
  return true;
}

// ---------------------------------------------------------------------
// goedel codes
// ---------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'V', 'N', 'A', 'P'};
constexpr std::uint8_t kVersion = 1;

void put_u32(GoedelCode& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(GoedelCode& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_dyadic(GoedelCode& out, const Dyadic& d) {
  std::string m = d.mantissa().str();
  put_u32(out, static_cast<std::uint32_t>(m.size()));
  for (char c : m) out.push_back(static_cast<std::uint8_t>(c));
  put_u32(out, d.exponent());
}

void put_element(GoedelCode& out, const AlgElement& el) {
  for (const auto& blk : el.blocks()) {
    for (Eigen::Index r = 0; r < blk.rows(); ++r)
      for (Eigen::Index c = 0; c < blk.cols(); ++c) {
        put_dyadic(out, Dyadic::from_double(blk(r, c).real()));
        put_dyadic(out, Dyadic::from_double(blk(r, c).imag()));
      }
  }
}

struct Reader {
  const GoedelCode& buf;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("goedel code: " + msg, {pos, std::min(pos + 1, buf.size())});
  }
  std::uint8_t u8() {
    if (pos >= buf.size()) fail("truncated");
    return buf[pos++];
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  Dyadic dyadic() {
    std::uint32_t len = u32();
    if (len == 0 || len > 20000) fail("bad mantissa length");
    std::string m;
    m.reserve(len);
    for (std::uint32_t i = 0; i < len; ++i) m.push_back(static_cast<char>(u8()));
    std::uint32_t e = u32();
    BigInt mant;
    try {
      mant = BigInt(m);
    } catch (...) {
      fail("bad mantissa digits");
    }
    return Dyadic(mant, e);
  }
};

}  // namespace

GoedelCode encode(const Presentation& p) {
  GoedelCode out;
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(kVersion);
  put_u32(out, static_cast<std::uint32_t>(p.carrier().block_count()));
  for (const auto& b : p.carrier().blocks()) {
    put_u32(out, static_cast<std::uint32_t>(b.dim));
    put_dyadic(out, b.weight);
  }
  put_u32(out, static_cast<std::uint32_t>(p.tuple_arity()));
  out.push_back(static_cast<std::uint8_t>(p.gen_kind()));
  if (p.gen_kind() == Presentation::GenKind::SeededRule) {
    put_u64(out, p.rule_seed());
  } else {
    put_u32(out, static_cast<std::uint32_t>(p.finite_gens().size()));
    for (const auto& g : p.finite_gens()) put_element(out, g);
  }
  return out;
}

Presentation decode(const GoedelCode& code) {
  Reader r{code};
  for (char c : kMagic)
    if (static_cast<char>(r.u8()) != c) r.fail("bad magic");
  if (r.u8() != kVersion) r.fail("unsupported version");

  std::uint32_t nblocks = r.u32();
  if (nblocks == 0 || nblocks > 64) r.fail("bad block count");
  std::vector<Block> blocks;
  for (std::uint32_t i = 0; i < nblocks; ++i) {
    std::uint32_t dim = r.u32();
    if (dim == 0 || dim > 64) r.fail("bad block dimension");
    Dyadic w = r.dyadic();
    blocks.push_back({static_cast<int>(dim), std::move(w)});
  }
  TracialAlgebra carrier = [&] {
    try {
      return TracialAlgebra(std::move(blocks));
    } catch (const PreconditionError& e) {
      r.fail(e.what());
    }
  }();

  std::uint32_t arity = r.u32();
  if (arity == 0 || arity > 16) r.fail("bad arity");
  std::uint8_t kind = r.u8();
  if (kind > 2) r.fail("bad generator kind");

  if (kind == static_cast<std::uint8_t>(Presentation::GenKind::SeededRule)) {
    std::uint64_t seed = r.u64();
    if (r.pos != code.size()) r.fail("trailing bytes");
    return Presentation::seeded_rule(std::move(carrier), seed, static_cast<int>(arity));
  }

  std::uint32_t count = r.u32();
  if (count == 0 || count > 4096) r.fail("bad generator count");
  std::vector<AlgElement> gens;
  for (std::uint32_t g = 0; g < count; ++g) {
    std::vector<Eigen::MatrixXcd> mats;
    for (const auto& b : carrier.blocks()) {
      Eigen::MatrixXcd m(b.dim, b.dim);
      for (int row = 0; row < b.dim; ++row)
        for (int col = 0; col < b.dim; ++col) {
          double re = r.dyadic().to_double();
          double im = r.dyadic().to_double();
          m(row, col) = {re, im};
        }
      mats.push_back(std::move(m));
    }
    AlgElement el(std::move(mats));
    if (!in_unit_ball(carrier, el)) r.fail("generator outside the unit ball");
    gens.push_back(std::move(el));
  }
  if (r.pos != code.size()) r.fail("trailing bytes");
  return Presentation::finite(std::move(carrier), std::move(gens), static_cast<int>(arity),
                              kind == static_cast<std::uint8_t>(Presentation::GenKind::FiniteCycled));
}

// ---------------------------------------------------------------------
// oracle-side interval evaluation
// ---------------------------------------------------------------------

namespace {

DyadicInterval oracle_term_trace(const Presentation& p, const TermPtr& t,
                                 const std::vector<std::pair<std::string, std::size_t>>& binding,
                                 unsigned n, TracePart channel) {
  std::set<std::string> fv = t->free_vars();
  std::vector<std::size_t> indices;
  for (const auto& v : fv) {
    auto it = std::find_if(binding.begin(), binding.end(),
                           [&](const auto& kv) { return kv.first == v; });
    if (it == binding.end())
      throw PreconditionError("oracle_eval_qf: unbound variable " + v);
    indices.push_back(it->second);
  }
  unsigned cap = p.max_precision(t);
  return p.enumerate_value(t, indices, std::min(n, cap), channel);
}

}  // namespace

DyadicInterval oracle_eval_qf(const Presentation& p, const Formula& f,
                              const std::vector<std::pair<std::string, std::size_t>>& binding,
                              unsigned n) {
  switch (f.kind()) {
    case Formula::Kind::Basic:
      return oracle_term_trace(p, f.term(), binding, n, f.trace_part());
    case Formula::Kind::Dist: {
      // d(s,t) = 2 sqrt(tr(u* u)) with u = avg(s, -t)
      TermPtr u = StarTerm::average(f.term(),
                                    StarTerm::scale({Dyadic(-1), Dyadic()}, f.term2()));
      TermPtr sq = StarTerm::product(StarTerm::adj(u), u);
      DyadicInterval j = oracle_term_trace(p, sq, binding, n, TracePart::Re);
      return iv_scale(Dyadic(2), iv_sqrt(j, n + 2));
    }
    case Formula::Kind::Const:
      return DyadicInterval::point(f.value());
    case Formula::Kind::Add:
      return iv_add(oracle_eval_qf(p, *f.left(), binding, n),
                    oracle_eval_qf(p, *f.right(), binding, n));
    case Formula::Kind::Scale:
      return iv_scale(f.value(), oracle_eval_qf(p, *f.left(), binding, n));
    case Formula::Kind::Monus:
      return iv_monus(oracle_eval_qf(p, *f.left(), binding, n),
                      oracle_eval_qf(p, *f.right(), binding, n));
    case Formula::Kind::Max:
      return iv_max(oracle_eval_qf(p, *f.left(), binding, n),
                    oracle_eval_qf(p, *f.right(), binding, n));
    case Formula::Kind::Min:
      return iv_min(oracle_eval_qf(p, *f.left(), binding, n),
                    oracle_eval_qf(p, *f.right(), binding, n));
    case Formula::Kind::Abs:
      return iv_abs(oracle_eval_qf(p, *f.left(), binding, n));
    case Formula::Kind::Sqrt:
      return iv_sqrt(oracle_eval_qf(p, *f.left(), binding, n), n + 2);
    case Formula::Kind::Quantifier:
      throw PreconditionError("oracle_eval_qf: quantifier present");
  }
  throw PreconditionError("oracle_eval_qf: malformed AST");
}

// ---------------------------------------------------------------------
// dovetailing algorithms
// ---------------------------------------------------------------------

WitnessResult good_witness(const GoedelCode& code, const FormulaPtr& sentence,
                           const Dyadic& eps, const EvalOptions& opts,
                           std::size_t step_cap) {
  if (eps.sign() <= 0) throw PreconditionError("good_witness: eps must be positive");
  Presentation p = decode(code);
  if (classify(*sentence) != SentenceClass::Universal)
    throw PreconditionError("good_witness: sentence must be universal");
  PrefixSplit split = strip_prefix(sentence);
  if (static_cast<int>(split.prefix.size()) != p.tuple_arity())
    throw PreconditionError("good_witness: quantified tuple does not match presentation arity");

  WitnessResult res;
  CertifiedValue ref = certify(p.carrier(), sentence, eps.div_pow2(1), opts);
  res.reference = ref.interval;
  res.work = ref.work;
  Dyadic threshold = ref.interval.lo() - eps.div_pow2(1);  // c - eps/2

  for (std::size_t i = 0; i < step_cap; ++i) {
    auto idx = p.tuple_indices(i);
    if (!idx) {
      throw PreconditionError(
          "good_witness: generator sequence exhausted without reaching the threshold; "
          "the enumerated set does not approach the supremum at this tolerance");
    }
    std::vector<std::pair<std::string, std::size_t>> binding;
    for (std::size_t v = 0; v < split.prefix.size(); ++v)
      binding.emplace_back(split.prefix[v].second, (*idx)[v]);

    // dovetail in precision until the comparison against the threshold
    // resolves; ties at the precision floor count as misses
    for (unsigned n = 4;; n += 3) {
      DyadicInterval j = oracle_eval_qf(p, *split.matrix, binding, n);
      ++res.work.point_evals;
      if (j.lo() >= threshold) {
        res.index = i;
        res.achieved = j;
        return res;
      }
      if (j.hi() < threshold) break;
      if (n >= 40) break;
    }
  }
  throw ResourceLimitError("good_witness: step cap reached");
}

EaRun upper_enumerate_ea(const Presentation& p, const FormulaPtr& sentence,
                         const Dyadic& eps, std::size_t steps, const EvalOptions& opts) {
  if (classify(*sentence) != SentenceClass::ExistsForall)
    throw PreconditionError("upper_enumerate_ea: sentence must be exists-forall");
  PrefixSplit split = strip_prefix(sentence);
  std::vector<std::string> inf_vars, sup_vars;
  for (auto& [q, name] : split.prefix)
    (q == Quant::Inf ? inf_vars : sup_vars).push_back(name);
  if (static_cast<int>(inf_vars.size()) != p.tuple_arity())
    throw PreconditionError("upper_enumerate_ea: inf-tuple does not match presentation arity");

  EaRun run;
  for (std::size_t i = 0; i < steps; ++i) {
    auto idx = p.tuple_indices(i);
    if (!idx) break;  // finite stream exhausted; emitted bounds stand
    Assignment env;
    for (std::size_t v = 0; v < inf_vars.size(); ++v) {
      auto g = p.generator((*idx)[v]);
      env.emplace(inf_vars[v], std::move(*g));
    }
    FormulaPtr inner = substitute(split.matrix, env);
    for (auto it = sup_vars.rbegin(); it != sup_vars.rend(); ++it)
      inner = Formula::quantifier(Quant::Sup, *it, std::move(inner));
    CertifiedValue cv = certify(p.carrier(), inner, eps, opts);
    EaBound b;
    b.step = i;
    b.indices = *idx;
    b.inner = cv.interval;
    b.upper = cv.interval.hi();
    run.bounds.push_back(std::move(b));
  }
  return run;
}

std::string EaRun::to_text() const {
  std::string s;
  Dyadic running;
  bool first = true;
  for (const auto& b : bounds) {
    running = first ? b.upper : Dyadic::min(running, b.upper);
    first = false;
    s += "step=" + std::to_string(b.step) + " bound <= " + b.upper.str() +
         " running-min=" + running.str() + "\n";
  }
  return s;
}

}  // namespace vna
