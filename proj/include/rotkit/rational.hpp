#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace rotkit {

using Rational = boost::rational<std::int64_t>;

// Parses "7", "-3/4" or "+2/6" (reduced on construction). Throws
// std::invalid_argument on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

// "num/den", or just "num" when the denominator is 1.
std::string to_string(const Rational& r);

inline double to_double(const Rational& r) {
  return boost::rational_cast<double>(r);
}

inline Rational abs(const Rational& r) { return r < 0 ? -r : r; }

inline int sign(const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

}  // namespace rotkit
