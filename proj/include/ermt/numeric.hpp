#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ermt {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;
// 50 decimal digits; wide exponent range for products like 4^400.
using HighFloat = boost::multiprecision::mpfr_float_50;

// Error hierarchy. Every failure raised by the library derives from Error so
// callers (the CLI in particular) can map them to a validation exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidProfile : public Error {
 public:
  using Error::Error;
};
class DimensionError : public Error {
 public:
  using Error::Error;
};
class CapExceeded : public Error {
 public:
  using Error::Error;
};
class NotACrossing : public Error {
 public:
  using Error::Error;
};
class DegenerateProfile : public Error {
 public:
  using Error::Error;
};
class OutOfWindow : public Error {
 public:
  using Error::Error;
};
class TransposeRequired : public Error {
 public:
  using Error::Error;
};
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// Parses "3", "-2/7", "0.125", "1e-3", "2.5E2" into an exact rational.
// Throws InvalidProfile on malformed input.
Rational parse_rational(std::string_view text);

// "num/den" (or just "num" when den == 1).
std::string to_fraction_string(const Rational& q);

// Fixed 17-significant-digit rendering; round-trips any double.
std::string format_double(double x);

// Decimal rendering of an exact rational to the given number of significant
// digits (via the high-precision float type).
std::string to_decimal_string(const Rational& q, int digits = 20);

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline HighFloat to_high(const Rational& q) { return HighFloat(q); }

// Smallest integer >= q.
BigInt ceil(const Rational& q);

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// 64-bit FNV-1a, used for configuration hashes in run manifests.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace ermt
