#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace usp {

using Rational = mpq_class;
using BigInt = mpz_class;

// Parses "p/q", "-p/q" or an integer string. Throws std::invalid_argument.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational");
  auto ok_digits = [](const std::string& part, bool allow_sign) {
    if (part.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (part[0] == '-' || part[0] == '+')) i = 1;
    if (i == part.size()) return false;
    for (; i < part.size(); ++i)
      if (part[i] < '0' || part[i] > '9') return false;
    return true;
  };
  auto slash = s.find('/');
  std::string num = slash == std::string::npos ? s : s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!ok_digits(num, true) || !ok_digits(den, false))
    throw std::invalid_argument("malformed rational '" + s + "'");
  if (num[0] == '+') num.erase(0, 1);
  BigInt n(num, 10), d(den, 10);
  if (d == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

// Canonical text form: "p/q" or "p" when q == 1.
inline std::string to_string(const Rational& r) { return r.get_str(10); }

inline std::string to_string(const BigInt& z) { return z.get_str(10); }

inline void lcm_accumulate(BigInt& acc, const Rational& r) {
  mpz_lcm(acc.get_mpz_t(), acc.get_mpz_t(), r.get_den_mpz_t());
}

}  // namespace usp
