#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "halfflat/form.hpp"
#include "halfflat/linalg.hpp"
#include "halfflat/scalar.hpp"

namespace halfflat {

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Nilpotent Lie algebra given by d on the dual generators. An optional
/// `coordinate` generator marks a closed direction ds along which jet-valued
/// coefficients vary; the total differential then picks up ds ^ d/ds terms.
class LieAlgebra {
public:
  struct Term {
    int target;
    Rational c;
    double cd;
  };

  LieAlgebra() : LieAlgebra(0, {}) {}
  LieAlgebra(int dim, std::vector<Form<Rational>> d1, std::string name = "",
             std::optional<int> coordinate = std::nullopt);

  int dim() const { return dim_; }
  const Form<Rational> &d(int k) const { return d1_[k]; }
  const std::vector<Form<Rational>> &differentials() const { return d1_; }
  const std::string &name() const { return name_; }
  std::optional<int> coordinate() const { return coordinate_; }

  LieAlgebra with_coordinate(std::optional<int> c) const;
  LieAlgebra with_name(std::string name) const;

  /// Sparse matrix of d on monomials of degree k: entry i lists the images
  /// of the i-th degree-k monomial in degree k+1.
  const std::vector<std::vector<Term>> &table(int k) const { return (*tables_)[k]; }

  /// Canonical structure notation, e.g. "(0,0,0,12,13,23)".
  std::string notation() const;

  /// The same algebra in the coframe f^a = sum_i P(a,i) e^i.
  LieAlgebra change_basis(const Matrix<Rational> &p) const;

private:
  int dim_ = 0;
  std::vector<Form<Rational>> d1_;
  std::string name_;
  std::optional<int> coordinate_;
  std::shared_ptr<const std::vector<std::vector<std::vector<Term>>>> tables_;
};

LieAlgebra parse_structure_notation(const std::string &s, int dim = -1);
std::string print_structure_notation(const LieAlgebra &g);

struct JacobiResult {
  bool pass = true;
  int generator = -1;  // 0-based, -1 when passing
  Form<Rational> witness;
};
JacobiResult jacobi_check(const LieAlgebra &g);

/// Basis of the center {xi : xi _| d(beta) = 0 for all 1-forms beta}.
std::vector<Vector<Rational>> center(const LieAlgebra &g);

/// Direct sum with a closed coordinate generator appended at the end.
LieAlgebra extend_with_coordinate(const LieAlgebra &g);

/// Extension g* = V* + <e^(n+1)> with d e^(n+1) = phi.
LieAlgebra extend_with_connection(const LieAlgebra &g, const Form<Rational> &phi);

struct CatalogEntry {
  std::string name;
  std::string notation;
  int dim = 0;
};

/// The six algebras appearing in the classification, always available.
std::vector<CatalogEntry> builtin_catalog();
std::vector<CatalogEntry> load_catalog(const std::string &path);

// ---------------------------------------------------------------------------
// Exterior derivative.

namespace detail {
template <class S>
S table_coeff(const LieAlgebra::Term &t) {
  if constexpr (std::is_same_v<S, Rational>) return t.c;
  else return S(t.cd);
}
}  // namespace detail

template <class S>
Form<S> exterior_derivative(const LieAlgebra &g, const Form<S> &a) {
  if (a.dim() != g.dim()) throw std::invalid_argument("exterior_derivative: dimension mismatch");
  const int n = g.dim();
  const int k = a.degree();
  Form<S> out(n, k + 1);
  if (k + 1 > n) return out;
  const auto &tab = g.table(k);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (is_zero(a.at(i))) continue;
    for (const auto &t : tab[i]) out.at(t.target) += a.at(i) * detail::table_coeff<S>(t);
  }
  if constexpr (std::is_same_v<S, Jet>) {
    if (auto c = g.coordinate()) {
      const Mask ds = static_cast<Mask>(1u << *c);
      for (std::size_t i = 0; i < a.size(); ++i) {
        const Mask m = a.mask_at(i);
        if (m & ds) continue;
        const Jet da = derivative(a.at(i));
        if (da.v == 0.0 && (da.d1 == 0.0 || std::isnan(da.d1))) continue;
        if (wedge_sign(ds, m) > 0) out[m | ds] += da;
        else out[m | ds] -= da;
      }
    }
  }
  return out;
}

}  // namespace halfflat
