#include "patchloc/rational.h"

#include <utility>

#include "patchloc/error.h"

namespace patchloc {
namespace {

mpz_class FromInt64(std::int64_t v) {
  // mpz_class has no portable int64 constructor; go through the string
  // form to stay exact for every value including INT64_MIN.
  return mpz_class(std::to_string(v));
}

}  // namespace

Rational::Rational(std::int64_t value) : value_(FromInt64(value)) {}

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) {
    throw Error(ErrorCode::kInvalidArgument, "rational with zero denominator");
  }
  value_ = mpq_class(FromInt64(numerator), FromInt64(denominator));
  value_.canonicalize();
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(mpq_class(a.value_ + b.value_));
}

Rational operator-(const Rational& a, const Rational& b) {
  return Rational(mpq_class(a.value_ - b.value_));
}

Rational operator*(const Rational& a, const Rational& b) {
  return Rational(mpq_class(a.value_ * b.value_));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) {
    throw Error(ErrorCode::kInvalidArgument, "division by zero");
  }
  return Rational(mpq_class(a.value_ / b.value_));
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  int c = cmp(a.value_, b.value_);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace patchloc
