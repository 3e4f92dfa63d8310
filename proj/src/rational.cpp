#include "bgc/rational.hpp"

#include <cctype>

namespace bgc {

Rational parse_rational(const std::string& text) {
  std::string s = text;
  // trim
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (s.empty()) throw std::invalid_argument("empty rational literal");

  bool negative = false;
  if (s[0] == '+' || s[0] == '-') {
    negative = s[0] == '-';
    s.erase(s.begin());
  }
  if (s.empty()) throw std::invalid_argument("malformed rational: " + text);

  Rational result;
  auto digits_only = [](const std::string& d) {
    if (d.empty()) return false;
    for (char c : d)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };

  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string p = s.substr(0, slash), q = s.substr(slash + 1);
    if (!digits_only(p) || !digits_only(q) || q == "0")
      throw std::invalid_argument("malformed rational: " + text);
    // Base must be pinned to 10: GMP's auto-detection would read a
    // leading zero as octal.
    result = Rational(mpz_class(p, 10), mpz_class(q, 10));
  } else if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!digits_only(whole) || (!frac.empty() && !digits_only(frac)))
      throw std::invalid_argument("malformed rational: " + text);
    mpz_class num(whole + frac, 10);
    mpz_class den(1);
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    result = Rational(num, den);
  } else {
    if (!digits_only(s)) throw std::invalid_argument("malformed rational: " + text);
    result = Rational(mpz_class(s, 10));
  }
  result.canonicalize();
  return negative ? Rational(-result) : result;
}

std::string format_rational(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

}  // namespace bgc
