#include "rotkit/rational.hpp"

#include <charconv>
#include <stdexcept>

namespace rotkit {

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto first = text.find_first_not_of(" \t");
  auto last = text.find_last_not_of(" \t");
  if (first == std::string_view::npos) {
    throw std::invalid_argument("empty rational");
  }
  std::string_view s = text.substr(first, last - first + 1);
  auto slash = s.find('/');
  std::int64_t num = parse_int(s.substr(0, slash), text);
  std::int64_t den = 1;
  if (slash != std::string_view::npos) {
    den = parse_int(s.substr(slash + 1), text);
    if (den == 0) {
      throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    }
  }
  return Rational(num, den);
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace rotkit
