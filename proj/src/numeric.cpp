#include "ermt/numeric.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

namespace ermt {

namespace {

BigInt pow10(long e) {
  BigInt r = 1;
  for (long i = 0; i < e; ++i) r *= 10;
  return r;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw InvalidProfile("empty numeric literal");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_rational(s.substr(0, slash));
    const Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw InvalidProfile("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6) {
      throw InvalidProfile("malformed exponent in '" + std::string(text) + "'");
    }
    exponent = std::stol(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
    s = s.substr(0, e);
  }

  std::string digits;
  long frac_digits = 0;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    if ((!int_part.empty() && !all_digits(int_part)) ||
        (!frac_part.empty() && !all_digits(frac_part)) ||
        (int_part.empty() && frac_part.empty())) {
      throw InvalidProfile("malformed number '" + std::string(text) + "'");
    }
    digits = std::string(int_part) + std::string(frac_part);
    frac_digits = static_cast<long>(frac_part.size());
  } else {
    if (!all_digits(s)) throw InvalidProfile("malformed number '" + std::string(text) + "'");
    digits = std::string(s);
  }

  Rational value{BigInt(digits)};
  const long shift = exponent - frac_digits;
  if (shift > 0) {
    value *= Rational(pow10(shift));
  } else if (shift < 0) {
    value /= Rational(pow10(-shift));
  }
  return negative ? Rational(-value) : value;
}

std::string to_fraction_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_decimal_string(const Rational& q, int digits) {
  std::ostringstream os;
  os.precision(digits);
  os << HighFloat(q);
  return os.str();
}

BigInt ceil(const Rational& q) {
  const BigInt& num = numerator(q);
  const BigInt& den = denominator(q);  // always positive
  BigInt quotient = num / den;          // truncates toward zero
  if (quotient * den < num) quotient += 1;
  return quotient;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ermt
