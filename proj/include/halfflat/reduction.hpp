#pragma once

#include <array>
#include <optional>

#include "halfflat/torsion.hpp"

namespace halfflat {

class ReductionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class S>
std::vector<std::vector<S>> nested(const Matrix<Rational> &m) {
  std::vector<std::vector<S>> out(m.rows(), std::vector<S>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = promote<S>(m(i, j));
  return out;
}

/// Gram matrix of the monomial basis of k-forms.
template <class S>
Matrix<S> form_gram(const Metric<S> &m, int k) {
  const auto &masks = MaskTable::masks(m.dim(), k);
  Matrix<S> g(masks.size(), masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i)
    for (std::size_t j = 0; j < masks.size(); ++j) g(i, j) = minor_of(m.ginv, masks[i], masks[j]);
  return g;
}

}  // namespace detail

/// Contraction a _| gamma as the full tensor contraction: p! times the
/// adjoint of a ^ (.) for a of degree p, so <a _| gamma, mu> = p! <gamma, a ^ mu>.
/// For a 1-form this is the interior product with the dual vector.
template <class S>
Form<S> contract(const Form<S> &a, const Form<S> &gamma, const Metric<S> &m) {
  const int n = gamma.dim();
  const int k = gamma.degree() - a.degree();
  if (k < 0) throw std::invalid_argument("contract: degree of a exceeds degree of gamma");
  if (a.degree() == 1) return interior(sharp(a, m), gamma);
  const auto &masks = MaskTable::masks(n, k);
  std::vector<S> rhs;
  for (Mask mu : masks) rhs.push_back(inner_product(gamma, wedge(a, Form<S>::monomial(n, mu)), m));
  auto c = solve(detail::form_gram(m, k), rhs, 1e-13);
  if (!c) throw DegenerateError("contract: singular Gram matrix");
  S factorial(1);
  for (int i = 2; i <= a.degree(); ++i) factorial *= S(i);
  Form<S> out(n, k);
  for (std::size_t i = 0; i < c->size(); ++i) out.at(i) = (*c)[i] * factorial;
  return out;
}

/// Data of the circle reduction along a central vector X. The adapted basis
/// of g* is f^1..f^5 spanning ann(X) followed by f^6 with f^6(X) = 1, so X is
/// the last basis vector; forms are moved to it by `to_adapted`.
template <class S>
struct ReductionData {
  Vector<Rational> X;       // in the original basis
  Matrix<Rational> P;       // f^a = sum_i P(a,i) e^i
  Matrix<Rational> Q;       // inverse of P
  LieAlgebra adapted;       // the 6-dimensional algebra in the adapted basis
  LieAlgebra quotient;      // V^5
  S t{1};                   // |X|
  Form<S> eta{6, 1};        // connection form, adapted basis
  Form<S> eta_original{6, 1};
  Form<S> phi{5, 2};        // d eta on V^5
  Form<S> dlogt{5, 1};      // zero in the invariant setting

  Form<S> to_adapted(const Form<S> &a) const { return substitute(a, detail::nested<S>(Q)); }
};

template <class S>
struct Reduction {
  SU2Structure<S> su2;
  ReductionData<S> data;
};

/// True when X _| d(beta) = 0 for every generator.
inline bool is_central(const LieAlgebra &g, const Vector<Rational> &x) {
  for (int k = 0; k < g.dim(); ++k)
    if (!interior(x, g.d(k)).is_zero()) return false;
  return true;
}

/// alpha = X_|omega, omega_1 = X_|psi+, omega_2 = X_|psi-, omega_3 = t X_|(omega ^ eta).
template <class S>
Reduction<S> reduce(const SU3Structure<S> &s, const LieAlgebra &g, const Vector<Rational> &x) {
  const int n = g.dim();
  if (n != 6) throw std::invalid_argument("reduce: need a 6-dimensional algebra");
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("reduce: X has the wrong length");
  int k = -1;
  for (int i = n - 1; i >= 0; --i)
    if (sgn(x[i]) != 0) {
      k = i;
      break;
    }
  if (k < 0) throw ReductionError("X must be nonzero");
  if (!is_central(g, x)) throw ReductionError("X is not central");

  ReductionData<S> r;
  r.X = x;
  r.P = Matrix<Rational>(n, n);
  int row = 0;
  for (int j = 0; j < n; ++j) {
    if (j == k) continue;
    r.P(row, j) = 1;
    r.P(row, k) = -x[j] / x[k];
    ++row;
  }
  r.P(n - 1, k) = Rational(1) / x[k];
  r.Q = *inverse(r.P);
  r.adapted = g.change_basis(r.P);
  for (int a = 0; a < n; ++a)
    if (!interior(basis_vector<Rational>(n, n - 1), r.adapted.d(a)).is_zero())
      throw ReductionError("d(g*) is not contained in Lambda^2 V^5");
  std::vector<Form<Rational>> d5;
  for (int a = 0; a < n - 1; ++a) d5.push_back(restrict_to(r.adapted.d(a), n - 1));
  r.quotient = LieAlgebra(n - 1, std::move(d5));

  const Vector<S> xs = [&] {
    Vector<S> v;
    for (const auto &c : x) v.push_back(promote<S>(c));
    return v;
  }();
  const Vector<S> gx = s.g.apply(xs);
  S t2(0);
  for (int i = 0; i < n; ++i) t2 += gx[i] * xs[i];
  if (sign_of(t2) <= 0) throw ReductionError("X has non-positive norm");
  r.t = sqrt_scalar(t2);
  r.eta_original = one_form(gx) * (S(1) / t2);
  r.eta = r.to_adapted(r.eta_original);

  // X is the last adapted basis vector
  const Vector<S> xa = basis_vector<S>(n, n - 1);
  const Form<S> omega = r.to_adapted(s.omega);
  const Form<S> pp = r.to_adapted(s.psi_plus);
  const Form<S> pm = r.to_adapted(s.psi_minus);
  auto down = [&](const Form<S> &f) { return restrict_to(f, n - 1); };
  const Form<S> alpha = down(interior(xa, omega));
  const std::array<Form<S>, 3> w{down(interior(xa, pp)), down(interior(xa, pm)),
                                 down(interior(xa, wedge(omega, r.eta)) * r.t)};
  const Form<S> deta = exterior_derivative(r.adapted, r.eta);
  if (!interior(xa, deta).is_zero(ScalarTraits<S>::exact ? 0.0 : 1e-10))
    throw ReductionError("curvature form has a vertical component");
  r.phi = down(deta);
  return {make_su2(alpha, w), std::move(r)};
}

/// The 6-dimensional algebra of the lift: V^5 plus eta with d eta = phi.
inline LieAlgebra lift_algebra(const LieAlgebra &g5, const Form<Rational> &phi) {
  if (!exterior_derivative(g5, phi).is_zero()) throw ReductionError("phi is not closed");
  LieAlgebra g6 = extend_with_connection(g5, phi);
  if (!jacobi_check(g6).pass) throw ReductionError("the extension fails the Jacobi identity");
  return g6;
}

/// omega = t^-1 omega_3 + eta ^ alpha, Psi = (omega_1 + i omega_2) ^ (eta + i t^-2 alpha),
/// with eta the last generator.
template <class S>
std::pair<Form<S>, Form<S>> lift_forms(const Form<S> &alpha, const std::array<Form<S>, 3> &w, const S &t) {
  const int n = alpha.dim() + 1;
  const Form<S> eta = Form<S>::generator(n, n - 1);
  const Form<S> a = extend(alpha, n);
  const Form<S> w1 = extend(w[0], n), w2 = extend(w[1], n), w3 = extend(w[2], n);
  const S ti = S(1) / t;
  const S ti2 = ti * ti;
  const Form<S> omega = w3 * ti + wedge(eta, a);
  const Form<S> psi = wedge(w1, eta) - wedge(w2, a) * ti2;
  return {omega, psi};
}

template <class S>
struct Lift {
  LieAlgebra algebra;
  SU3Structure<S> su3;
};

template <class S>
Lift<S> lift(const SU2Structure<S> &n, const LieAlgebra &g5, const Form<Rational> &phi, const S &t) {
  if (sign_of(t) <= 0) throw std::invalid_argument("lift: t must be positive");
  LieAlgebra g6 = lift_algebra(g5, phi);
  const auto [omega, psi] = lift_forms(n.alpha, n.omega, t);
  return {std::move(g6), make_su3(omega, psi)};
}

/// Residuals of the five-dimensional conditions for the lift to be
/// symplectic half-flat: the unit-t system and its t-dependent form.
template <class S>
ValidationReport check_gcy_conditions(const SU2Structure<S> &n, const LieAlgebra &g5, const Form<S> &phi, const S &t,
                                      std::optional<Form<S>> dlogt = std::nullopt, double tol = kDefaultTol) {
  const Form<S> dl = dlogt ? *dlogt : Form<S>(5, 1);
  auto d = [&](const Form<S> &f) { return exterior_derivative(g5, f); };
  auto add = [&](ValidationReport &r, const std::string &name, const Form<S> &res) {
    const double v = res.max_abs();
    r.add(name, ScalarTraits<S>::exact ? res.is_zero() : v <= tol, v);
  };
  const Form<S> &a = n.alpha;
  const auto &w = n.omega;
  ValidationReport r;
  add(r, "d_alpha", d(a));
  add(r, "d_omega1", d(w[0]));
  add(r, "const_t_d_omega3", d(w[2]) + wedge(phi, a));
  add(r, "const_t_d_omega2_alpha", d(wedge(w[1], a)) - wedge(w[0], phi));
  add(r, "varying_t_d_omega2_alpha", wedge(d(w[1]), a) - wedge(w[0], phi) * (t * t) - wedge(wedge(dl, w[1]), a) * S(2));
  add(r, "varying_t_d_omega3", d(w[2]) - wedge(dl, w[2]) + wedge(a, phi) * t);
  return r;
}

/// Restriction of omega, psi+ and psi- to the span of three vectors; all three
/// values are returned so callers can see which calibration vanishes.
template <class S>
std::array<double, 3> fibre_restriction(const SU3Structure<S> &s, const std::array<Vector<S>, 3> &v) {
  double w = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      w = std::max(w, magnitude(evaluate(interior(v[i], s.omega), v[j])));
  auto three = [&](const Form<S> &f) {
    return magnitude(evaluate(interior(v[1], interior(v[0], f)), v[2]));
  };
  return {w, three(s.psi_plus), three(s.psi_minus)};
}

/// omega pulls back to zero and Psi restricts to a unit multiple of the
/// induced volume, i.e. the span is special Lagrangian for some phase:
/// (psi+|L)^2 + (psi-|L)^2 = det of the Gram matrix.
template <class S>
bool special_lagrangian(const SU3Structure<S> &s, const std::array<Vector<S>, 3> &v, double tol = 1e-12) {
  const auto r = fibre_restriction(s, v);
  if (r[0] > tol) return false;
  Matrix<S> gram(3, 3);
  for (int i = 0; i < 3; ++i) {
    const auto gv = s.g.apply(v[i]);
    for (int j = 0; j < 3; ++j) {
      S acc(0);
      for (std::size_t k = 0; k < gv.size(); ++k) acc += gv[k] * v[j][k];
      gram(i, j) = acc;
    }
  }
  auto three = [&](const Form<S> &f) { return evaluate(interior(v[1], interior(v[0], f)), v[2]); };
  const S p = three(s.psi_plus), m = three(s.psi_minus);
  return magnitude(S(p * p + m * m - determinant(gram))) <= tol;
}

// ---------------------------------------------------------------------------
// Torsion of the quotient in terms of the torsion upstairs.

/// W = eta ^ Xi + Delta with Xi = X _| W, all moved to V^5.
template <class S>
struct Splitting {
  Form<S> xi;
  Form<S> delta;
};

template <class S>
Splitting<S> split(const Form<S> &w, const ReductionData<S> &r) {
  const int n = w.dim();
  const Form<S> wa = r.to_adapted(w);
  const Form<S> xi = interior(basis_vector<S>(n, n - 1), wa);
  const Form<S> delta = wa - wedge(r.eta, xi);
  auto down = [&](const Form<S> &f) {
    Form<S> g = f;
    // drop numerically negligible vertical noise before restricting
    if constexpr (!ScalarTraits<S>::exact) {
      const Mask v = static_cast<Mask>(1u << (n - 1));
      for (std::size_t i = 0; i < g.size(); ++i)
        if (g.mask_at(i) & v) {
          if (magnitude(g.at(i)) > 1e-9) throw ReductionError("splitting left a vertical component");
          g.at(i) = S(0);
        }
    }
    return restrict_to(g, n - 1);
  };
  return {down(xi), down(delta)};
}

/// The quotient torsion table: every entry in terms of W1..W5 of the
/// six-dimensional structure, the splitting W = eta ^ Xi + Delta, t and phi.
template <class S>
SU2Torsion<S> quotient_torsion_table(const SU3Torsion<S> &T, const ReductionData<S> &r, const SU2Structure<S> &n,
                                     bool as_printed = false) {
  const Metric<S> m = su2_metric(n);
  const S t = r.t;
  const S ti = S(1) / t;
  const Form<S> &a = n.alpha;
  const auto &w = n.omega;
  auto ip = [&](const Form<S> &x, const Form<S> &y) { return inner_product(x, y, m); };
  auto scalar = [](const Form<S> &f) { return f.at(0); };

  const auto s2p = split(T.W2p, r), s2m = split(T.W2m, r), s3 = split(T.W3, r), s4 = split(T.W4, r),
             s5 = split(T.W5, r);
  const S xi4 = scalar(s4.xi), xi5 = scalar(s5.xi);

  SU2Torsion<S> q;
  q.lambda = -ip(s5.delta, a);
  q.lambda_lines = {q.lambda, q.lambda, q.lambda};
  q.f[0] = S(3) / S(2) * T.W1m;
  if (!as_printed) q.f[0] -= ip(s3.xi, w[0]) / S(2);  // the -Xi_3 term of d alpha also has an omega_1 part
  q.f[1] = S(-3) / S(2) * T.W1p - ip(s3.xi, w[1]) / S(2);
  q.f[2] = -ti * xi4 - ip(s3.xi, w[2]) / S(2);
  const S g12 = -ti * ti * xi5;
  // Delta_2 carries an omega_3 component -t^-1 <Xi_2, alpha>/2 forced by
  // primitivity, which halves the <Xi_2, alpha> terms
  const S half = as_printed ? S(1) : S(1) / S(2);
  const S g13 = S(-2) * ti * T.W1p - half * ti * ip(s2p.xi, a);
  const S g23 = S(-2) * ti * T.W1m - half * ti * ip(s2m.xi, a);
  q.g[0][1] = g12;
  q.g[1][0] = -g12;
  q.g[0][2] = g13;
  q.g[2][0] = -g13;
  q.g[1][2] = g23;
  q.g[2][1] = -g23;
  q.beta = -project_lambda1(n, s4.delta) - contract(a, s3.xi, m);
  q.gamma[0] = -project_lambda1(n, s5.delta) - contract(s2p.xi, w[1], m) * ti;
  q.gamma[1] = -project_lambda1(n, s5.delta) + contract(s2m.xi, w[0], m) * ti;
  q.gamma[2] = project_lambda1(n, Form<S>(s4.delta + r.dlogt + contract(w[2], s3.delta, m) * (t / S(2))));
  q.omega_minus = -project_lambda2m(n, s3.xi);
  q.sigma[0] = as_printed ? Form<S>(-s2p.delta) : Form<S>(-project_lambda2m(n, s2p.delta));
  q.sigma[1] = as_printed ? Form<S>(-s2m.delta) : Form<S>(-project_lambda2m(n, s2m.delta));
  q.sigma[2] = project_lambda2m(n, Form<S>(contract(a, s3.delta, m) - r.phi)) * t;
  return q;
}

/// Largest component-wise difference between two SU(2) torsion tables, with
/// the name of the worst entry.
template <class S>
std::pair<double, std::string> torsion_table_difference(const SU2Torsion<S> &a, const SU2Torsion<S> &b) {
  const auto ca = su2_components(a), cb = su2_components(b);
  double worst = 0.0;
  std::string name;
  for (std::size_t i = 0; i < ca.size(); ++i)
    for (std::size_t j = 0; j < ca[i].second.size(); ++j) {
      const double d = std::abs(ca[i].second[j] - cb[i].second[j]);
      if (d > worst) {
        worst = d;
        name = ca[i].first;
      }
    }
  return {worst, name};
}

}  // namespace halfflat
