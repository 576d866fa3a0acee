#include "vna/interval.hpp"

#include <algorithm>

#include "vna/errors.hpp"

namespace vna {

DyadicInterval::DyadicInterval(Dyadic lo, Dyadic hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_ > hi_) throw PreconditionError("interval endpoints out of order");
}

std::string DyadicInterval::str() const {
  return "[" + lo_.str() + ", " + hi_.str() + "]";
}

DyadicInterval interval_hull(std::span<const double> values, const Dyadic& slack,
                             unsigned bits) {
  if (values.empty()) throw PreconditionError("interval_hull: empty value set");
  if (slack.sign() < 0) throw PreconditionError("interval_hull: negative slack");
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {Dyadic::floor_to(lo, bits) - slack, Dyadic::ceil_to(hi, bits) + slack};
}

DyadicInterval iv_neg(const DyadicInterval& a) { return {-a.hi(), -a.lo()}; }

DyadicInterval iv_add(const DyadicInterval& a, const DyadicInterval& b) {
  return {a.lo() + b.lo(), a.hi() + b.hi()};
}

DyadicInterval iv_scale(const Dyadic& c, const DyadicInterval& a) {
  if (c.sign() >= 0) return {c * a.lo(), c * a.hi()};
  return {c * a.hi(), c * a.lo()};
}

DyadicInterval iv_monus(const DyadicInterval& a, const DyadicInterval& b) {
  return {monus(a.lo(), b.hi()), monus(a.hi(), b.lo())};
}

DyadicInterval iv_max(const DyadicInterval& a, const DyadicInterval& b) {
  return {Dyadic::max(a.lo(), b.lo()), Dyadic::max(a.hi(), b.hi())};
}

DyadicInterval iv_min(const DyadicInterval& a, const DyadicInterval& b) {
  return {Dyadic::min(a.lo(), b.lo()), Dyadic::min(a.hi(), b.hi())};
}

DyadicInterval iv_abs(const DyadicInterval& a) {
  if (a.lo().sign() >= 0) return a;
  if (a.hi().sign() <= 0) return iv_neg(a);
  return {Dyadic(), Dyadic::max(-a.lo(), a.hi())};
}

DyadicInterval iv_sqrt(const DyadicInterval& a, unsigned bits) {
  Dyadic lo = Dyadic::max(a.lo(), Dyadic());
  Dyadic hi = Dyadic::max(a.hi(), Dyadic());
  return {sqrt_lower(lo, bits), sqrt_upper(hi, bits)};
}

}  // namespace vna
