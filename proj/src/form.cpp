#include "halfflat/form.hpp"

#include <cctype>

namespace halfflat {

Form<Rational> parse_form(const std::string &s, int dim, int degree) {
  std::size_t i = 0;
  auto skip = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  auto fail = [&](const std::string &what) -> void {
    throw std::invalid_argument("parse_form: " + what + " in \"" + s + "\"");
  };
  Form<Rational> out(dim, degree);
  skip();
  if (s.compare(i, std::string::npos, "0") == 0) return out;
  bool first = true;
  while (true) {
    skip();
    if (i >= s.size()) break;
    Rational sign(1);
    if (s[i] == '+' || s[i] == '-') {
      if (s[i] == '-') sign = -1;
      ++i;
      skip();
    } else if (!first) {
      fail("expected '+' or '-'");
    }
    first = false;
    Rational coeff(1);
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      std::size_t start = i;
      while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '/')) ++i;
      coeff = Rational(s.substr(start, i - start));
      coeff.canonicalize();
      skip();
      if (i < s.size() && s[i] == '*') {
        ++i;
        skip();
      } else {
        if (degree != 0) fail("expected '*'");
        out.at(0) += sign * coeff;
        continue;
      }
    }
    if (i >= s.size() || s[i] != 'e') fail("expected monomial");
    ++i;
    std::vector<int> idx;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) idx.push_back(s[i++] - '1');
    if (static_cast<int>(idx.size()) != degree) fail("wrong degree");
    Mask m = 0;
    int inversions = 0;
    for (std::size_t p = 0; p < idx.size(); ++p) {
      if (idx[p] < 0 || idx[p] >= dim) fail("index out of range");
      if (m & (1u << idx[p])) fail("repeated index");
      m |= static_cast<Mask>(1u << idx[p]);
      for (std::size_t q = p + 1; q < idx.size(); ++q)
        if (idx[p] > idx[q]) ++inversions;
    }
    out[m] += (inversions % 2 ? -sign : sign) * coeff;
  }
  return out;
}

}  // namespace halfflat
