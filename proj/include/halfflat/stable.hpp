#pragma once

#include <array>
#include <optional>

#include "halfflat/form.hpp"
#include "halfflat/linalg.hpp"
#include "halfflat/metric.hpp"
#include "halfflat/report.hpp"

namespace halfflat {

class NotStableError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Constant c in psi+ ^ psi- = c omega^3. Derived from the model pair
/// omega = e14+e23+e65, Psi = (e1+ie4)(e2+ie3)(e6+ie5).
inline const Rational kNormalization(2, 3);

template <class S>
struct HitchinInvariant {
  Matrix<S> K;
  S lambda;
};

/// K(v) = A((v _| rho) ^ rho) with A(zeta) the vector w such that
/// w _| vol = zeta; lambda = trace(K^2) / 6. `vol` is the coefficient of
/// e^123456 in the chosen volume form.
template <class S>
HitchinInvariant<S> hitchin_invariant(const Form<S> &rho, const S &vol) {
  if (rho.dim() != 6 || rho.degree() != 3) throw std::invalid_argument("hitchin_invariant: need a 3-form in dimension 6");
  HitchinInvariant<S> h{Matrix<S>(6, 6), S(0)};
  const auto &masks5 = MaskTable::masks(6, 5);
  const S inv_vol = S(1) / vol;
  for (int i = 0; i < 6; ++i) {
    const Form<S> zeta = wedge(interior(basis_vector<S>(6, i), rho), rho);
    for (std::size_t s = 0; s < masks5.size(); ++s) {
      if (is_zero(zeta.at(s))) continue;
      const int j = std::countr_zero(static_cast<unsigned>(0x3F & ~masks5[s]));
      // e_j _| e^123456 = (-1)^j e^(all but j)
      h.K(j, i) = (j % 2 ? -zeta.at(s) : zeta.at(s)) * inv_vol;
    }
  }
  const Matrix<S> k2 = h.K * h.K;
  for (int i = 0; i < 6; ++i) h.lambda += k2(i, i);
  h.lambda /= S(6);
  return h;
}

/// psi^-(X,Y,Z) = -psi^+(JX,Y,Z), assembled as -(1/3) sum_a e^a ^ (J e_a _| psi^+).
template <class S>
Form<S> psi_minus_from_J(const Form<S> &psi_plus, const Matrix<S> &J) {
  const int n = psi_plus.dim();
  Form<S> out(n, 3);
  for (int a = 0; a < n; ++a) {
    Vector<S> je(n);
    for (int b = 0; b < n; ++b) je[b] = J(b, a);
    out += wedge(Form<S>::generator(n, a), interior(je, psi_plus));
  }
  out *= S(-1) / S(3);
  return out;
}

/// Almost-complex structure J = -K / sqrt(-lambda) for the orientation
/// `orientation` * e^123456 and the resulting psi^-.
template <class S>
struct AlmostComplex {
  Matrix<S> J;
  Form<S> psi_minus;
  S lambda;
};

template <class S>
AlmostComplex<S> almost_complex_from_psi(const Form<S> &psi_plus, int orientation = 1) {
  const auto h = hitchin_invariant(psi_plus, S(orientation < 0 ? -1 : 1));
  if (!(to_double(h.lambda) < 0.0)) throw NotStableError("3-form is not stable of complex type (lambda >= 0)");
  const S root = sqrt_scalar(S(-h.lambda));
  AlmostComplex<S> out{h.K * (S(-1) / root), Form<S>(6, 3), h.lambda};
  out.psi_minus = psi_minus_from_J(psi_plus, out.J);
  return out;
}

/// Antisymmetric matrix W(a,b) = w(e_a, e_b) of a 2-form.
template <class S>
Matrix<S> two_form_matrix(const Form<S> &w) {
  const int n = w.dim();
  Matrix<S> m(n, n);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Mask mk = w.mask_at(i);
    const int a = std::countr_zero(static_cast<unsigned>(mk));
    const int b = std::countr_zero(static_cast<unsigned>(mk & (mk - 1)));
    m(a, b) = w.at(i);
    m(b, a) = -w.at(i);
  }
  return m;
}

template <class S>
struct SU3Structure {
  Form<S> omega;
  Form<S> psi_plus;
  Form<S> psi_minus;
  Matrix<S> J;
  Matrix<S> g;  // g(X,Y) = omega(X, JY)
  S lambda;
  int orientation = 1;
};

/// Sign of omega^3 relative to e^123456; the default orientation.
template <class S>
int omega_orientation(const Form<S> &omega) {
  return sign_of(top_coefficient(power(omega, 3)));
}

/// Builds the derived data; the orientation defaults to the sign of omega^3.
template <class S>
SU3Structure<S> make_su3(const Form<S> &omega, const Form<S> &psi_plus, std::optional<int> orientation = std::nullopt) {
  if (omega.dim() != 6 || omega.degree() != 2 || psi_plus.degree() != 3)
    throw std::invalid_argument("make_su3: need a 2-form and a 3-form in dimension 6");
  SU3Structure<S> s;
  s.omega = omega;
  s.psi_plus = psi_plus;
  s.orientation = orientation ? *orientation : omega_orientation(omega);
  if (s.orientation == 0) throw DegenerateError("omega is degenerate");
  auto ac = almost_complex_from_psi(psi_plus, s.orientation);
  s.J = std::move(ac.J);
  s.psi_minus = std::move(ac.psi_minus);
  s.lambda = ac.lambda;
  s.g = two_form_matrix(omega) * s.J;
  return s;
}

template <class S>
Metric<S> su3_metric(const SU3Structure<S> &s) {
  return metric_from_matrix(s.g, s.orientation);
}

namespace detail {
template <class S>
bool small(const S &x, double tol) {
  if constexpr (ScalarTraits<S>::exact) return is_zero(x);
  else return magnitude(x) <= tol;
}
template <class S>
double residual_of(const Form<S> &f) {
  return f.max_abs();
}
}  // namespace detail

/// Checks the compatibility conditions, the normalisation with the fixed
/// constant and definiteness of the induced metric. Failures are reported,
/// never thrown (except for a degenerate omega, reported too).
template <class S>
ValidationReport su3_validate(const Form<S> &omega, const Form<S> &psi_plus, std::optional<int> orientation = std::nullopt,
                              double tol = kDefaultTol) {
  ValidationReport r;
  auto ok = [&](double res) { return ScalarTraits<S>::exact ? res == 0.0 : res <= tol; };
  const S top = top_coefficient(power(omega, 3));
  r.add("omega_nondegenerate", !detail::small(top, tol), magnitude(top));
  if (!r.checks.back().pass) return r;
  const int orient = orientation ? *orientation : sign_of(top);
  const auto h = hitchin_invariant(psi_plus, S(orient));
  r.add("stable_complex_type", to_double(h.lambda) < 0.0, to_double(h.lambda));
  if (!r.checks.back().pass) return r;
  SU3Structure<S> s;
  try {
    s = make_su3(omega, psi_plus, orient);
  } catch (const NotExact &e) {
    r.add("exact_square_root", false, 0.0, e.what());
    return r;
  }
  const double pw = detail::residual_of(wedge(psi_plus, omega));
  r.add("psi_plus_wedge_omega", ok(pw), pw);
  const double mw = detail::residual_of(wedge(s.psi_minus, omega));
  r.add("psi_minus_wedge_omega", ok(mw), mw);
  const Form<S> norm = wedge(psi_plus, s.psi_minus) - power(omega, 3) * promote<S>(kNormalization);
  const double nr = detail::residual_of(norm);
  r.add("normalization", ok(nr), nr);
  const Matrix<S> j2 = s.J * s.J + Matrix<S>::identity(6);
  r.add("J_squared", ok(j2.max_abs()), j2.max_abs());
  const Matrix<S> asym = s.g - s.g.transpose();
  r.add("metric_symmetric", ok(asym.max_abs()), asym.max_abs());
  r.add("metric_positive", positive_definite(s.g, tol), 0.0);
  return r;
}

// ---------------------------------------------------------------------------
// SU(2)-structures in dimension 5.

template <class S>
struct SU2Structure {
  Form<S> alpha;
  std::array<Form<S>, 3> omega;
  Vector<S> reeb;  // common kernel of the omega_i with alpha(R) = 1
  Matrix<S> g;     // alpha (x) alpha + G

  Form<S> psi(int i) const { return wedge(omega[i], alpha); }
};

/// G(X,Y) alpha^omega_1^2/2 = (1/6) alpha ^ sum eps_ijk (X_|omega_i)^(Y_|omega_j)^omega_k.
template <class S>
Matrix<S> su2_transverse_metric(const Form<S> &alpha, const std::array<Form<S>, 3> &omega) {
  const int n = alpha.dim();
  const S vol = top_coefficient(wedge(alpha, wedge(omega[0], omega[0]))) / S(2);
  if (is_zero(vol)) throw DegenerateError("alpha ^ omega_1^2 vanishes");
  // M_k(p,q) = top(e^p ^ e^q ^ alpha ^ omega_k); alpha commutes past the two 1-forms
  std::array<Matrix<S>, 3> M{Matrix<S>(n, n), Matrix<S>(n, n), Matrix<S>(n, n)};
  for (int k = 0; k < 3; ++k) {
    const Form<S> t = wedge(alpha, omega[k]);
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const S v = top_coefficient(wedge(Form<S>::monomial(n, Mask((1u << p) | (1u << q))), t));
        M[k](p, q) = v;
        M[k](q, p) = -v;
      }
  }
  std::vector<std::array<Vector<S>, 3>> contr(n);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < 3; ++i) contr[a][i] = interior(basis_vector<S>(n, a), omega[i]).coefficients();
  static constexpr int perms[6][4] = {{0, 1, 2, 1}, {1, 2, 0, 1}, {2, 0, 1, 1},
                                      {1, 0, 2, -1}, {0, 2, 1, -1}, {2, 1, 0, -1}};
  Matrix<S> G(n, n);
  const S scale = S(1) / (S(6) * vol);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      S acc(0);
      for (const auto &pm : perms) {
        const auto &x = contr[a][pm[0]];
        const auto &y = contr[b][pm[1]];
        const auto &m = M[pm[2]];
        S term(0);
        for (int p = 0; p < n; ++p) {
          if (is_zero(x[p])) continue;
          S row(0);
          for (int q = 0; q < n; ++q) row += m(p, q) * y[q];
          term += x[p] * row;
        }
        if (pm[3] > 0) acc += term;
        else acc -= term;
      }
      const S val = acc * scale;
      G(a, b) = val;
      G(b, a) = val;
    }
  return G;
}

template <class S>
SU2Structure<S> make_su2(const Form<S> &alpha, const std::array<Form<S>, 3> &omega, double tol = 1e-10) {
  const int n = alpha.dim();
  if (n != 5) throw std::invalid_argument("make_su2: dimension must be 5");
  SU2Structure<S> s{alpha, omega, {}, Matrix<S>(n, n)};
  Matrix<S> stack(3 * n, n);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < 3; ++i) {
      const Form<S> c = interior(basis_vector<S>(n, a), omega[i]);
      for (int j = 0; j < n; ++j) stack(i * n + j, a) = c.at(j);
    }
  auto ker = kernel(stack, tol);
  if (ker.size() != 1) throw DegenerateError("the omega_i do not have a one-dimensional common kernel");
  const S ar = evaluate(alpha, ker[0]);
  if (is_zero(ar, tol)) throw DegenerateError("alpha vanishes on the common kernel of the omega_i");
  s.reeb = ker[0];
  for (auto &x : s.reeb) x /= ar;
  const Matrix<S> G = su2_transverse_metric(alpha, omega);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s.g(a, b) = alpha.at(a) * alpha.at(b) + G(a, b);
  return s;
}

template <class S>
Metric<S> su2_metric(const SU2Structure<S> &s) {
  return metric_from_matrix(s.g, sign_of(top_coefficient(wedge(s.alpha, wedge(s.omega[0], s.omega[0])))));
}

template <class S>
ValidationReport su2_validate(const Form<S> &alpha, const std::array<Form<S>, 3> &omega, double tol = kDefaultTol) {
  ValidationReport r;
  auto ok = [&](double res) { return ScalarTraits<S>::exact ? res == 0.0 : res <= tol; };
  const Form<S> w11 = wedge(omega[0], omega[0]);
  const S vol = top_coefficient(wedge(alpha, w11));
  r.add("volume_nonzero", !detail::small(vol, tol), magnitude(vol));
  if (!r.checks.back().pass) return r;
  double prod = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      Form<S> d = wedge(omega[i], omega[j]);
      if (i == j) d -= w11;
      prod = std::max(prod, wedge(alpha, d).max_abs());
    }
  r.add("omega_products", ok(prod), prod);
  SU2Structure<S> s;
  try {
    s = make_su2(alpha, omega);
  } catch (const DegenerateError &e) {
    r.add("reeb_vector", false, 0.0, e.what());
    return r;
  }
  double kr = 0.0;
  for (int i = 0; i < 3; ++i) kr = std::max(kr, interior(s.reeb, omega[i]).max_abs());
  r.add("reeb_vector", ok(kr), kr);
  r.add("metric_positive", positive_definite(s.g, tol), 0.0);
  return r;
}

/// Vector J_k v = sharp(v _| omega_k).
template <class S>
Vector<S> su2_J(const SU2Structure<S> &s, const Matrix<S> &ginv, int k, const Vector<S> &v) {
  return ginv.apply(one_form_coeffs(interior(v, s.omega[k])));
}

/// Coframe e^1..e^5 with alpha = e^5 and the omega_i in standard form:
/// v_1 is a unit vector in ker alpha, v_(k+1) = J_k v_1, v_5 = R, and the
/// coframe is the dual basis. At the rational level v_1 must have rational
/// length; candidates are tried along the generator directions.
template <class S>
std::vector<Form<S>> adapted_coframe(const SU2Structure<S> &s) {
  const int n = 5;
  auto ginv = inverse(s.g);
  if (!ginv) throw DegenerateError("degenerate SU(2) metric");
  std::optional<Vector<S>> v1;
  std::string last_error = "no candidate direction";
  for (int i = 0; i < n && !v1; ++i) {
    Vector<S> w = basis_vector<S>(n, i);
    const S a = evaluate(s.alpha, w);
    for (int j = 0; j < n; ++j) w[j] -= a * s.reeb[j];
    S len2(0);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) len2 += w[p] * s.g(p, q) * w[q];
    if (!(to_double(len2) > 1e-6)) continue;
    try {
      const S len = sqrt_scalar(len2);
      for (auto &x : w) x /= len;
      v1 = w;
    } catch (const NotExact &e) {
      last_error = e.what();
    }
  }
  if (!v1) throw NotExact("adapted_coframe: " + last_error);
  Matrix<S> frame(n, n);  // columns are v_1..v_5
  std::array<Vector<S>, 5> v{*v1, su2_J(s, *ginv, 0, *v1), su2_J(s, *ginv, 1, *v1), su2_J(s, *ginv, 2, *v1), s.reeb};
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) frame(r, c) = v[c][r];
  auto dual = inverse(frame);
  if (!dual) throw DegenerateError("adapted frame is singular");
  std::vector<Form<S>> out;
  for (int a = 0; a < n; ++a) {
    Vector<S> row(n);
    for (int j = 0; j < n; ++j) row[j] = (*dual)(a, j);
    out.push_back(one_form(row));
  }
  return out;
}

/// The standard forms of the SU(2) model in a given coframe.
template <class S>
std::pair<Form<S>, std::array<Form<S>, 3>> su2_model_forms(const std::vector<Form<S>> &e) {
  auto w = [&](int a, int b) { return wedge(e[a], e[b]); };
  return {e[4], {w(0, 1) + w(2, 3), w(0, 2) + w(3, 1), w(0, 3) + w(1, 2)}};
}

}  // namespace halfflat
