#include "vna/dyadic.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace vna {

namespace {

// floor(m / 2^k) for possibly negative m.
BigInt floor_shift(const BigInt& m, unsigned k) {
  if (k == 0) return m;
  BigInt div = BigInt(1) << k;
  BigInt q, r;
  boost::multiprecision::divide_qr(m, div, q, r);
  if (r < 0) --q;
  return q;
}

BigInt ceil_shift(const BigInt& m, unsigned k) {
  if (k == 0) return m;
  BigInt div = BigInt(1) << k;
  BigInt q, r;
  boost::multiprecision::divide_qr(m, div, q, r);
  if (r > 0) ++q;
  return q;
}

}  // namespace

Dyadic::Dyadic(BigInt mantissa, unsigned exponent)
    : m_(std::move(mantissa)), e_(exponent) {
  if (m_.is_zero()) {
    e_ = 0;
    return;
  }
  if (e_ > 0) {
    unsigned tz = boost::multiprecision::lsb(boost::multiprecision::abs(m_));
    unsigned shift = tz < e_ ? tz : e_;
    if (shift > 0) {
      m_ >>= shift;  // m_ has its low `shift` bits zero, so this is exact
      e_ -= shift;
    }
  }
}

Dyadic Dyadic::from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("from_double: non-finite input");
  if (x == 0.0) return Dyadic();
  int exp2 = 0;
  double frac = std::frexp(x, &exp2);       // x = frac * 2^exp2, 0.5 <= |frac| < 1
  auto m = static_cast<long long>(std::ldexp(frac, 53));  // integral, |m| < 2^53
  int e = exp2 - 53;
  if (e >= 0) return Dyadic(BigInt(m) << e, 0);
  return Dyadic(BigInt(m), static_cast<unsigned>(-e));
}

Dyadic Dyadic::floor_to(double x, unsigned bits) {
  Dyadic d = from_double(x);
  if (d.e_ <= bits) return d;
  return Dyadic(floor_shift(d.m_, d.e_ - bits), bits);
}

Dyadic Dyadic::ceil_to(double x, unsigned bits) {
  Dyadic d = from_double(x);
  if (d.e_ <= bits) return d;
  return Dyadic(ceil_shift(d.m_, d.e_ - bits), bits);
}

double Dyadic::to_double() const {
  return std::ldexp(m_.convert_to<double>(), -static_cast<int>(e_));
}

std::string Dyadic::str() const {
  return m_.str() + "/2^" + std::to_string(e_);
}

Dyadic Dyadic::operator-() const {
  Dyadic r;
  r.m_ = -m_;
  r.e_ = e_;
  return r;
}

Dyadic Dyadic::operator+(const Dyadic& o) const {
  unsigned e = e_ > o.e_ ? e_ : o.e_;
  return Dyadic((m_ << (e - e_)) + (o.m_ << (e - o.e_)), e);
}

Dyadic Dyadic::operator-(const Dyadic& o) const { return *this + (-o); }

Dyadic Dyadic::operator*(const Dyadic& o) const {
  return Dyadic(m_ * o.m_, e_ + o.e_);
}

Dyadic Dyadic::div_pow2(unsigned k) const {
  return Dyadic(m_, e_ + k);
}

std::strong_ordering Dyadic::operator<=>(const Dyadic& o) const {
  unsigned e = e_ > o.e_ ? e_ : o.e_;
  BigInt a = m_ << (e - e_);
  BigInt b = o.m_ << (e - o.e_);
  if (a < b) return std::strong_ordering::less;
  if (a > b) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool Dyadic::operator==(const Dyadic& o) const {
  return e_ == o.e_ && m_ == o.m_;  // canonical form makes this exact
}

Dyadic monus(const Dyadic& x, const Dyadic& y) {
  Dyadic diff = x - y;
  return diff.sign() > 0 ? diff : Dyadic();
}

double monus(double x, double y) { return std::max(x - y, 0.0); }

Dyadic sqrt_lower(const Dyadic& x, unsigned bits) {
  if (x.sign() < 0) throw std::invalid_argument("sqrt_lower: negative input");
  if (x.is_zero()) return Dyadic();
  // floor(2^b sqrt(x)) = floor(sqrt(m * 2^(2b - e))) once 2b >= e.
  unsigned b = bits;
  while (2 * b < x.exponent()) ++b;
  BigInt shifted = x.mantissa() << (2 * b - x.exponent());
  BigInt s = boost::multiprecision::sqrt(shifted);
  return Dyadic(s, b);
}

Dyadic sqrt_upper(const Dyadic& x, unsigned bits) {
  if (x.sign() < 0) throw std::invalid_argument("sqrt_upper: negative input");
  if (x.is_zero()) return Dyadic();
  unsigned b = bits;
  while (2 * b < x.exponent()) ++b;
  BigInt shifted = x.mantissa() << (2 * b - x.exponent());
  BigInt s = boost::multiprecision::sqrt(shifted);
  if (s * s != shifted) ++s;
  return Dyadic(s, b);
}

std::optional<Dyadic> try_parse_dyadic(std::string_view text) {
  std::size_t i = 0;
  auto digits = [&](BigInt& out) -> bool {
    bool neg = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
      neg = text[i] == '-';
      ++i;
    }
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) return false;
    BigInt v = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      v = v * 10 + (text[i] - '0');
      ++i;
    }
    out = neg ? -v : v;
    return true;
  };
  BigInt m;
  if (!digits(m)) return std::nullopt;
  if (i == text.size()) return Dyadic(m, 0);
  if (text.compare(i, 3, "/2^") != 0) return std::nullopt;
  i += 3;
  BigInt e;
  if (!digits(e) || e < 0 || i != text.size()) return std::nullopt;
  if (e > 1000000) return std::nullopt;
  return Dyadic(m, e.convert_to<unsigned>());
}

}  // namespace vna
