#include "halfflat/liealg.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace halfflat {

namespace {

using Tables = std::vector<std::vector<std::vector<LieAlgebra::Term>>>;

// d(e^I) by the graded Leibniz rule over the positions of I.
Form<Rational> monomial_derivative(int n, const std::vector<Form<Rational>> &d1, Mask m) {
  const int k = degree_of(m);
  Form<Rational> out(n, k + 1);
  if (k + 1 > n) return out;
  int pos = 0;
  for (int i = 0; i < n; ++i) {
    if (!(m & (1u << i))) continue;
    const Mask before = static_cast<Mask>(m & ((1u << i) - 1));
    const Mask after = static_cast<Mask>(m & ~((1u << (i + 1)) - 1));
    Form<Rational> term = wedge(wedge(Form<Rational>::monomial(n, before), d1[i]),
                                Form<Rational>::monomial(n, after));
    if (pos % 2) out -= term;
    else out += term;
    ++pos;
  }
  return out;
}

std::shared_ptr<const Tables> build_tables(int n, const std::vector<Form<Rational>> &d1) {
  auto tables = std::make_shared<Tables>(n + 1);
  for (int k = 0; k <= n; ++k) {
    const auto &masks = MaskTable::masks(n, k);
    auto &tab = (*tables)[k];
    tab.resize(masks.size());
    if (k == n) continue;
    for (std::size_t i = 0; i < masks.size(); ++i) {
      const Form<Rational> dm = monomial_derivative(n, d1, masks[i]);
      for (std::size_t j = 0; j < dm.size(); ++j)
        if (sgn(dm.at(j)) != 0)
          tab[i].push_back({static_cast<int>(j), dm.at(j), dm.at(j).get_d()});
    }
  }
  return tables;
}

}  // namespace

LieAlgebra::LieAlgebra(int dim, std::vector<Form<Rational>> d1, std::string name,
                       std::optional<int> coordinate)
    : dim_(dim), d1_(std::move(d1)), name_(std::move(name)), coordinate_(coordinate) {
  if (dim < 0 || dim > kMaxDim) throw std::invalid_argument("Lie algebra dimension out of range");
  if (static_cast<int>(d1_.size()) != dim) throw std::invalid_argument("need one differential per generator");
  for (const auto &f : d1_)
    if (f.dim() != dim || f.degree() != 2) throw std::invalid_argument("d of a generator must be a 2-form");
  if (coordinate_) {
    if (*coordinate_ < 0 || *coordinate_ >= dim) throw std::invalid_argument("coordinate index out of range");
    if (!d1_[*coordinate_].is_zero()) throw std::invalid_argument("coordinate direction must be closed");
  }
  tables_ = build_tables(dim_, d1_);
}

LieAlgebra LieAlgebra::with_coordinate(std::optional<int> c) const {
  return LieAlgebra(dim_, d1_, name_, c);
}

LieAlgebra LieAlgebra::with_name(std::string name) const {
  LieAlgebra g = *this;
  g.name_ = std::move(name);
  return g;
}

LieAlgebra LieAlgebra::change_basis(const Matrix<Rational> &p) const {
  auto q = inverse(p);
  if (!q) throw std::invalid_argument("change_basis: singular matrix");
  // e^i = sum_a Q(i,a) f^a
  std::vector<std::vector<Rational>> sub(dim_, std::vector<Rational>(dim_));
  for (int i = 0; i < dim_; ++i)
    for (int a = 0; a < dim_; ++a) sub[i][a] = (*q)(i, a);
  std::vector<Form<Rational>> d1;
  for (int a = 0; a < dim_; ++a) {
    Form<Rational> df(dim_, 2);
    for (int i = 0; i < dim_; ++i)
      if (sgn(p(a, i)) != 0) df += d1_[i] * p(a, i);
    d1.push_back(substitute(df, sub));
  }
  return LieAlgebra(dim_, std::move(d1), name_);
}

// ---------------------------------------------------------------------------
// Notation.

namespace {

struct Cursor {
  const std::string &s;
  std::size_t i = 0;
  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eof() {
    skip_ws();
    return i >= s.size();
  }
  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++i;
      return true;
    }
    return false;
  }
  bool accept_middle_dot() {
    skip_ws();
    if (s.compare(i, 2, "\xC2\xB7") == 0) {
      i += 2;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string &what) {
    throw ParseError(what + " at position " + std::to_string(i) + " in \"" + s + "\"");
  }
  std::string digits() {
    skip_ws();
    std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(start, i - start);
  }
};

// term := [coefficient ['*'|'·']] pair ; coefficient := int ['/' int]
// Without '*' the last two digits of a run form the pair.
void parse_term(Cursor &c, int dim, const Rational &sign, Form<Rational> &out) {
  std::string run = c.digits();
  if (run.empty()) c.fail("expected a term");
  Rational coeff(1);
  std::string pair;
  if (c.peek() == '/') {
    ++c.i;
    std::string den = c.digits();
    if (den.empty()) c.fail("expected denominator");
    coeff = Rational(mpz_class(run), mpz_class(den));
    if (sgn(coeff.get_den()) == 0) c.fail("zero denominator");
    coeff.canonicalize();
    if (!c.accept('*') && !c.accept_middle_dot()) c.fail("expected '*' after rational coefficient");
    pair = c.digits();
  } else if (c.accept('*') || c.accept_middle_dot()) {
    coeff = Rational(mpz_class(run));
    pair = c.digits();
  } else if (run.size() > 2) {
    coeff = Rational(mpz_class(run.substr(0, run.size() - 2)));
    pair = run.substr(run.size() - 2);
  } else {
    pair = run;
  }
  if (pair.size() != 2) c.fail("expected a pair of generator digits");
  const int i = pair[0] - '0';
  const int j = pair[1] - '0';
  if (i < 1 || i > dim || j < 1 || j > dim) c.fail("generator index out of range");
  if (i >= j) c.fail("pair indices must satisfy i < j");
  out[static_cast<Mask>((1u << (i - 1)) | (1u << (j - 1)))] += sign * coeff;
}

Form<Rational> parse_entry(Cursor &c, int dim) {
  Form<Rational> out(dim, 2);
  if (c.peek() == '0') {
    const std::size_t save = c.i;
    std::string run = c.digits();
    if (run == "0" && (c.peek() == ',' || c.peek() == ')')) return out;
    c.i = save;
  }
  Rational sign(1);
  if (c.accept('-')) sign = -1;
  else c.accept('+');
  parse_term(c, dim, sign, out);
  while (true) {
    if (c.accept('+')) sign = 1;
    else if (c.accept('-')) sign = -1;
    else break;
    parse_term(c, dim, sign, out);
  }
  return out;
}

}  // namespace

LieAlgebra parse_structure_notation(const std::string &s, int dim) {
  Cursor c{s};
  if (!c.accept('(')) c.fail("expected '('");
  // count entries first so that the range check knows the dimension
  int entries = 1;
  for (char ch : s)
    if (ch == ',') ++entries;
  if (dim < 0) dim = entries;
  if (entries != dim) throw ParseError("expected " + std::to_string(dim) + " entries in \"" + s + "\"");
  if (dim < 1 || dim > kMaxDim) throw ParseError("dimension out of range in \"" + s + "\"");
  std::vector<Form<Rational>> d1;
  for (int k = 0; k < dim; ++k) {
    if (k > 0 && !c.accept(',')) c.fail("expected ','");
    d1.push_back(parse_entry(c, dim));
  }
  if (!c.accept(')')) c.fail("expected ')'");
  if (!c.eof()) c.fail("trailing characters");
  return LieAlgebra(dim, std::move(d1), s);
}

std::string print_structure_notation(const LieAlgebra &g) {
  std::ostringstream os;
  os << "(";
  for (int k = 0; k < g.dim(); ++k) {
    if (k) os << ",";
    const Form<Rational> &f = g.d(k);
    bool first = true;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Rational &c = f.at(i);
      if (sgn(c) == 0) continue;
      const Rational a = abs(c);
      if (sgn(c) < 0) os << "-";
      else if (!first) os << "+";
      if (a != 1) os << a.get_str() << "*";
      os << mask_digits(f.mask_at(i));
      first = false;
    }
    if (first) os << "0";
  }
  os << ")";
  return os.str();
}

std::string LieAlgebra::notation() const { return print_structure_notation(*this); }

JacobiResult jacobi_check(const LieAlgebra &g) {
  for (int k = 0; k < g.dim(); ++k) {
    Form<Rational> dd = exterior_derivative(g, g.d(k));
    if (!dd.is_zero()) return {false, k, dd};
  }
  return {};
}

std::vector<Vector<Rational>> center(const LieAlgebra &g) {
  const int n = g.dim();
  // rows: for each generator k and each index j, coefficient of e^j in xi _| d e^k
  Matrix<Rational> a(static_cast<std::size_t>(n * n), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Vector<Rational> v = basis_vector<Rational>(n, i);
    for (int k = 0; k < n; ++k) {
      const Form<Rational> c = interior(v, g.d(k));
      for (int j = 0; j < n; ++j) a(k * n + j, i) = c.at(j);
    }
  }
  return kernel(a);
}

LieAlgebra extend_with_coordinate(const LieAlgebra &g) {
  const int n = g.dim() + 1;
  std::vector<Form<Rational>> d1;
  for (int k = 0; k < g.dim(); ++k) d1.push_back(extend(g.d(k), n));
  d1.emplace_back(n, 2);
  return LieAlgebra(n, std::move(d1), g.name(), n - 1);
}

LieAlgebra extend_with_connection(const LieAlgebra &g, const Form<Rational> &phi) {
  if (phi.dim() != g.dim() || phi.degree() != 2) throw std::invalid_argument("curvature form must be a 2-form on the base");
  const int n = g.dim() + 1;
  std::vector<Form<Rational>> d1;
  for (int k = 0; k < g.dim(); ++k) d1.push_back(extend(g.d(k), n));
  d1.push_back(extend(phi, n));
  return LieAlgebra(n, std::move(d1), "", g.coordinate());
}

std::vector<CatalogEntry> builtin_catalog() {
  return {
      {"abelian5", "(0,0,0,0,0)", 5},
      {"h3_x_R2", "(0,0,0,0,12)", 5},
      {"n5_12_13", "(0,0,0,12,13)", 5},
      {"abelian6", "(0,0,0,0,0,0)", 6},
      {"n6_12_13", "(0,0,0,0,12,13)", 6},
      {"n6_12_13_23", "(0,0,0,12,13,23)", 6},
  };
}

std::vector<CatalogEntry> load_catalog(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open catalog file " + path);
  const nlohmann::json j = nlohmann::json::parse(in);
  std::vector<CatalogEntry> out;
  for (const auto &e : j) out.push_back({e.at("name").get<std::string>(), e.at("notation").get<std::string>(), e.at("dim").get<int>()});
  return out;
}

}  // namespace halfflat
