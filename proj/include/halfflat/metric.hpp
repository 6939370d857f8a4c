#pragma once

#include <optional>
#include <vector>

#include "halfflat/form.hpp"
#include "halfflat/linalg.hpp"

namespace halfflat {

/// Riemannian metric on the generator basis. `vol` is the coefficient of
/// e^1^...^e^n in the oriented Riemannian volume form; `ginv` is the dual
/// metric on 1-forms.
template <class S>
struct Metric {
  Matrix<S> g;
  Matrix<S> ginv;
  S vol = S(1);

  int dim() const { return static_cast<int>(g.rows()); }
};

class DegenerateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Coefficient matrix C(a,i) of a coframe E^a = sum_i C(a,i) e^i.
template <class S>
Matrix<S> coframe_matrix(const std::vector<Form<S>> &coframe) {
  const std::size_t n = coframe.size();
  Matrix<S> c(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    if (coframe[a].degree() != 1 || static_cast<std::size_t>(coframe[a].dim()) != n)
      throw std::invalid_argument("coframe must consist of n 1-forms in dimension n");
    for (std::size_t i = 0; i < n; ++i) c(a, i) = coframe[a].at(i);
  }
  return c;
}

/// The metric making the coframe orthonormal, oriented by E^1^...^E^n.
template <class S>
Metric<S> metric_from_coframe(const std::vector<Form<S>> &coframe) {
  const Matrix<S> c = coframe_matrix(coframe);
  auto cinv = inverse(c);
  if (!cinv) throw DegenerateError("degenerate coframe");
  Metric<S> m;
  m.g = c.transpose() * c;
  m.ginv = (*cinv) * cinv->transpose();
  m.vol = determinant(c);
  return m;
}

/// Metric from a matrix; the volume coefficient is sign * sqrt(det g), which
/// at the rational level requires det g to be a square.
template <class S>
Metric<S> metric_from_matrix(const Matrix<S> &g, int orientation = 1) {
  auto ginv = inverse(g);
  if (!ginv) throw DegenerateError("degenerate metric");
  Metric<S> m;
  m.g = g;
  m.ginv = *ginv;
  m.vol = sqrt_scalar(determinant(g));
  if (orientation < 0) m.vol = -m.vol;
  return m;
}

/// Leading principal minors test.
template <class S>
bool positive_definite(const Matrix<S> &g, double tol = 0.0) {
  for (std::size_t k = 1; k <= g.rows(); ++k) {
    Matrix<S> sub(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) sub(i, j) = g(i, j);
    const S d = determinant(sub);
    if constexpr (ScalarTraits<S>::exact) {
      if (sign_of(d) <= 0) return false;
    } else if (!(to_double(d) > tol)) {
      return false;
    }
  }
  return true;
}

template <class S>
Form<S> flat(const Vector<S> &v, const Metric<S> &m) {
  return one_form(m.g.apply(v));
}

template <class S>
Vector<S> sharp(const Form<S> &beta, const Metric<S> &m) {
  return m.ginv.apply(one_form_coeffs(beta));
}

namespace detail {
// determinant of ginv restricted to rows I, columns J
template <class S>
S minor_of(const Matrix<S> &a, Mask rows, Mask cols) {
  std::vector<int> r, c;
  for (int i = 0; i < 8; ++i) {
    if (rows & (1u << i)) r.push_back(i);
    if (cols & (1u << i)) c.push_back(i);
  }
  const std::size_t k = r.size();
  if (k == 0) return S(1);
  if (k == 1) return a(r[0], c[0]);
  Matrix<S> sub(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) sub(i, j) = a(r[i], c[j]);
  return determinant(sub);
}
}  // namespace detail

/// Induced inner product on k-forms.
template <class S>
S inner_product(const Form<S> &a, const Form<S> &b, const Metric<S> &m) {
  if (a.degree() != b.degree() || a.dim() != b.dim()) throw std::invalid_argument("inner_product: degree mismatch");
  S s(0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (is_zero(a.at(i))) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (is_zero(b.at(j))) continue;
      s += a.at(i) * b.at(j) * detail::minor_of(m.ginv, a.mask_at(i), b.mask_at(j));
    }
  }
  return s;
}

template <class S>
S norm_squared(const Form<S> &a, const Metric<S> &m) {
  return inner_product(a, a, m);
}

/// Hodge star characterised by a ^ *b = <a, b> vol.
template <class S>
Form<S> hodge_star(const Form<S> &b, const Metric<S> &m) {
  const int n = b.dim();
  const int k = b.degree();
  const Mask top = static_cast<Mask>((1u << n) - 1);
  Form<S> out(n, n - k);
  for (Mask mi : MaskTable::masks(n, k)) {
    S ip(0);
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (is_zero(b.at(j))) continue;
      ip += b.at(j) * detail::minor_of(m.ginv, mi, b.mask_at(j));
    }
    if (is_zero(ip)) continue;
    const Mask comp = static_cast<Mask>(top & ~mi);
    const S c = ip * m.vol;
    if (wedge_sign(mi, comp) > 0) out[comp] += c;
    else out[comp] -= c;
  }
  return out;
}

/// Oriented volume form of the metric.
template <class S>
Form<S> volume_form(const Metric<S> &m) {
  const int n = m.dim();
  return Form<S>::monomial(n, static_cast<Mask>((1u << n) - 1), m.vol);
}

}  // namespace halfflat
