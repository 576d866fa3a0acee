#pragma once

#include <span>
#include <string>

#include "vna/dyadic.hpp"

namespace vna {

// Endpoint grid used when doubles are hulled into certified intervals.
inline constexpr unsigned kHullBits = 48;

// Closed interval with exact dyadic endpoints, lo <= hi.  The output
// currency of every certified computation in this project.
class DyadicInterval {
public:
  DyadicInterval() = default;
  DyadicInterval(Dyadic lo, Dyadic hi);

  static DyadicInterval point(const Dyadic& v) { return {v, v}; }

  const Dyadic& lo() const { return lo_; }
  const Dyadic& hi() const { return hi_; }
  Dyadic width() const { return hi_ - lo_; }
  double mid() const { return (lo_.to_double() + hi_.to_double()) / 2; }

  bool contains(const Dyadic& v) const { return lo_ <= v && v <= hi_; }
  bool contains(double v) const { return contains(Dyadic::from_double(v)); }
  bool contains(const DyadicInterval& o) const {
    return lo_ <= o.lo_ && o.hi_ <= hi_;
  }
  bool disjoint(const DyadicInterval& o) const {
    return hi_ < o.lo_ || o.hi_ < lo_;
  }

  DyadicInterval widened(const Dyadic& slack) const {
    return {lo_ - slack, hi_ + slack};
  }

  std::string str() const;  // "[lo, hi]" in m/2^e notation

  bool operator==(const DyadicInterval& o) const = default;

private:
  Dyadic lo_, hi_;
};

// Smallest interval with endpoints on the 2^-bits grid containing every
// input value, widened outward by `slack` on each side.
DyadicInterval interval_hull(std::span<const double> values, const Dyadic& slack,
                             unsigned bits = kHullBits);

// Exact interval arithmetic for the connective layer.
DyadicInterval iv_neg(const DyadicInterval& a);
DyadicInterval iv_add(const DyadicInterval& a, const DyadicInterval& b);
DyadicInterval iv_scale(const Dyadic& c, const DyadicInterval& a);
DyadicInterval iv_monus(const DyadicInterval& a, const DyadicInterval& b);
DyadicInterval iv_max(const DyadicInterval& a, const DyadicInterval& b);
DyadicInterval iv_min(const DyadicInterval& a, const DyadicInterval& b);
DyadicInterval iv_abs(const DyadicInterval& a);
// sqrt(max(x, 0)) with endpoints rounded outward on the 2^-bits grid.
DyadicInterval iv_sqrt(const DyadicInterval& a, unsigned bits = kHullBits);

}  // namespace vna
