#ifndef PATCHLOC_RATIONAL_H_
#define PATCHLOC_RATIONAL_H_

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>

namespace patchloc {

// Exact fraction of arbitrary precision, always in lowest terms. Min-max
// normalization and squaring multiply denominators together, which outgrows
// 64-bit integers on suites of a few thousand cases.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t value);  // NOLINT: implicit by design of a number type
  // Throws Error(kInvalidArgument) on a zero denominator.
  Rational(std::int64_t numerator, std::int64_t denominator);

  bool is_zero() const { return sgn(value_) == 0; }

  double ToDouble() const { return value_.get_d(); }
  // "n/d", or just "n" when the denominator is 1.
  std::string ToString() const { return value_.get_str(); }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  // Throws Error(kInvalidArgument) when b is zero.
  friend Rational operator/(const Rational& a, const Rational& b);

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b);

 private:
  explicit Rational(mpq_class value) : value_(std::move(value)) {}

  mpq_class value_;
};

}  // namespace patchloc

#endif  // PATCHLOC_RATIONAL_H_
