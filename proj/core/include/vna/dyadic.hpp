#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace vna {

using BigInt = boost::multiprecision::cpp_int;

// Exact dyadic rational m / 2^e with unbounded mantissa.
//
// Canonical form: the mantissa is odd whenever e > 0, and m == 0 forces
// e == 0, so each value has exactly one representation.  All arithmetic
// here is exact; there is no rounding anywhere in this class.
class Dyadic {
public:
  Dyadic() : m_(0), e_(0) {}
  Dyadic(long long n) : m_(n), e_(0) {}  // NOLINT: implicit by design
  Dyadic(BigInt mantissa, unsigned exponent);

  // Exact conversion; every finite double is a dyadic rational.
  static Dyadic from_double(double x);

  // Largest multiple of 2^-bits that is <= x (resp. smallest >= x).
  static Dyadic floor_to(double x, unsigned bits);
  static Dyadic ceil_to(double x, unsigned bits);

  const BigInt& mantissa() const { return m_; }
  unsigned exponent() const { return e_; }

  bool is_zero() const { return m_.is_zero(); }
  int sign() const { return m_.sign(); }

  double to_double() const;  // nearest double
  std::string str() const;   // canonical "m/2^e"

  Dyadic operator-() const;
  Dyadic operator+(const Dyadic& o) const;
  Dyadic operator-(const Dyadic& o) const;
  Dyadic operator*(const Dyadic& o) const;

  // Exact division by 2^k (the only division dyadics are closed under).
  Dyadic div_pow2(unsigned k) const;

  std::strong_ordering operator<=>(const Dyadic& o) const;
  bool operator==(const Dyadic& o) const;

  static Dyadic min(const Dyadic& a, const Dyadic& b) { return a <= b ? a : b; }
  static Dyadic max(const Dyadic& a, const Dyadic& b) { return a >= b ? a : b; }

private:
  BigInt m_;
  unsigned e_;
};

// Truncated subtraction max(x - y, 0); exact on dyadics.
Dyadic monus(const Dyadic& x, const Dyadic& y);
double monus(double x, double y);

// Bounds for sqrt(x) on the grid of multiples of 2^-bits (x >= 0):
// sqrt_lower(x) <= sqrt(x) <= sqrt_upper(x), gap at most 2^-bits.
Dyadic sqrt_lower(const Dyadic& x, unsigned bits);
Dyadic sqrt_upper(const Dyadic& x, unsigned bits);

// Accepts the canonical "m/2^e" form or a bare integer.
std::optional<Dyadic> try_parse_dyadic(std::string_view text);

}  // namespace vna
