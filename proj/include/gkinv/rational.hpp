#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "gkinv/error.hpp"

namespace gkinv {

using Rational = boost::rational<std::int64_t>;

inline bool is_integer(const Rational& r) { return r.denominator() == 1; }

inline std::int64_t floor_of(const Rational& r) {
  std::int64_t q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
  return q;
}

inline std::int64_t ceil_of(const Rational& r) {
  return -floor_of(-r);
}

// Serialized form is always "num/den", so integers print as "3/1".
inline std::string to_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Accepts "n" or "n/d" with optional sign on the numerator.
inline Rational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view s) -> std::int64_t {
    if (s.empty()) throw DomainError("empty integer in rational '" + std::string(text) + "'");
    std::size_t pos = 0;
    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
      neg = s[0] == '-';
      pos = 1;
    }
    if (pos == s.size()) throw DomainError("malformed rational '" + std::string(text) + "'");
    std::int64_t value = 0;
    for (; pos < s.size(); ++pos) {
      char c = s[pos];
      if (c < '0' || c > '9') throw DomainError("malformed rational '" + std::string(text) + "'");
      value = value * 10 + (c - '0');
    }
    return neg ? -value : value;
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  std::int64_t num = parse_int(text.substr(0, slash));
  std::int64_t den = parse_int(text.substr(slash + 1));
  if (den == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

}  // namespace gkinv
