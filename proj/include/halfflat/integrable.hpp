#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "halfflat/reduction.hpp"
#include "halfflat/torsion.hpp"

namespace halfflat {

class SingularError : public DomainError {
public:
  using DomainError::DomainError;
};

/// A function of the coordinate x given by its value and first two
/// x-derivatives at a point.
template <class S>
struct ParamScalar {
  S v;
  S d1;
  S d2;
};

/// t = (1 - x)^-1 with its derivatives.
template <class S>
ParamScalar<S> inverse_linear(const S &x) {
  const S r = S(1) / (S(1) - x);
  return {r, r * r, S(2) * r * r * r};
}

/// J3 on 1-forms: J3 alpha = 0 and omega_1 ^ beta = omega_2 ^ J3 beta on Lambda^1.
template <class S>
Form<S> J3(const SU2Structure<S> &s, const Form<S> &beta, double tol = 1e-10) {
  const Form<S> b = project_lambda1(s, beta);
  if (b.is_zero()) return Form<S>(5, 1);
  const auto basis = su2_lambda1_basis(s, tol);
  std::vector<Form<S>> cols;
  for (const auto &e : basis) cols.push_back(wedge(s.omega[1], e));
  const auto x = detail::decompose(cols, wedge(s.omega[0], b), tol, "J3");
  return detail::combine(basis, x, 0, basis.size(), 5, 1);
}

/// Data for the integrability conditions of a structure (alpha, omega_i) on a
/// 5-dimensional algebra with a coordinate generator x (dx = e^c) and a
/// function t of x.
template <class S>
struct IntegrableData {
  int coordinate = 0;
  S a;                  // <alpha, dx>
  S L1;                 // (log t)'
  S L2;                 // (log t)''
  Form<S> dlogt;        // L1 dx
  Form<S> dc_logt;      // J3 d log t
  Form<S> ddc_logt;     // d d^c log t
  Form<S> B;            // 2 d log t ^ d^c log t - d d^c log t
  S s;                  // d_alpha log t
  S d2_alpha_logt;      // d_alpha^2 log t
};

template <class S>
IntegrableData<S> integrable_data(const SU2Structure<S> &n, const LieAlgebra &g5, const ParamScalar<S> &t,
                                  double tol = 1e-10) {
  const auto c = g5.coordinate();
  if (!c) throw std::invalid_argument("integrable_data: the algebra has no coordinate generator");
  if (!exterior_derivative(g5, Form<Rational>::generator(5, *c)).is_zero())
    throw std::invalid_argument("integrable_data: the coordinate generator is not closed");
  if (is_zero(t.v)) throw DomainError("integrable_data: t vanishes");
  IntegrableData<S> r;
  r.coordinate = *c;
  const Metric<S> m = su2_metric(n);
  const Form<S> dx = Form<S>::generator(5, *c);
  r.a = inner_product(n.alpha, dx, m);
  r.L1 = t.d1 / t.v;
  r.L2 = t.d2 / t.v - r.L1 * r.L1;
  r.dlogt = dx * r.L1;
  const Form<S> jdx = J3(n, dx, tol);
  r.dc_logt = jdx * r.L1;
  // d(L1 J3 dx) = L2 dx ^ J3 dx + L1 d(J3 dx)
  r.ddc_logt = wedge(dx, jdx) * r.L2 + exterior_derivative(g5, jdx) * r.L1;
  r.B = wedge(r.dlogt, r.dc_logt) * S(2) - r.ddc_logt;
  r.s = r.a * r.L1;
  r.d2_alpha_logt = r.a * r.a * r.L2;
  return r;
}

/// Residual of d_alpha^2 log t - (d_alpha log t)^2 - 2 t^-1 |(d log t)_Lambda1|^2.
template <class S>
S scalar_condition_residual(const SU2Structure<S> &n, const IntegrableData<S> &d, const ParamScalar<S> &t) {
  const Form<S> h = project_lambda1(n, d.dlogt);
  return d.d2_alpha_logt - d.s * d.s - S(2) * norm_squared(h, su2_metric(n)) / t.v;
}

/// d omega_3 - (d log t)_Lambda1 ^ omega_3 - (d_alpha t)^-1 alpha ^ B_-.
template <class S>
Form<S> omega3_condition_residual(const SU2Structure<S> &n, const LieAlgebra &g5, const IntegrableData<S> &d,
                      const ParamScalar<S> &t) {
  Form<S> r = exterior_derivative(g5, n.omega[2]) - wedge(project_lambda1(n, d.dlogt), n.omega[2]);
  const S dat = d.a * t.d1;
  if (is_zero(dat)) {
    if (!project_lambda2m(n, d.B).is_zero()) throw SingularError("omega3_condition: d_alpha t vanishes");
    return r;
  }
  return r - wedge(n.alpha, project_lambda2m(n, d.B)) * (S(1) / dat);
}

/// phi = t^-1 s omega_3 - (t^2 s)^-1 B_- - 2 t^-2 alpha ^ d^c log t, s = d_alpha log t.
template <class S>
Form<S> recovered_phi(const SU2Structure<S> &n, const IntegrableData<S> &d, const ParamScalar<S> &t) {
  if (is_zero(d.s)) throw SingularError("recovered_phi: d_alpha log t vanishes");
  const S ti = S(1) / t.v;
  return n.omega[2] * (ti * d.s) - project_lambda2m(n, d.B) * (ti * ti / d.s) - wedge(n.alpha, d.dc_logt) * (S(2) * ti * ti);
}

template <class S>
struct IntegrabilityReport {
  ValidationReport checks;
  S scalar_residual;
  Form<S> omega3_residual;
  std::optional<Form<S>> phi;  // empty when d_alpha log t = 0
  std::string singular;
};

template <class S>
IntegrabilityReport<S> integrability_conditions(const SU2Structure<S> &n, const LieAlgebra &g5, const ParamScalar<S> &t,
                           double tol = kDefaultTol) {
  IntegrabilityReport<S> r;
  const bool exact = ScalarTraits<S>::exact;
  auto add = [&](const std::string &name, double v) { r.checks.add(name, exact ? v == 0.0 : v <= tol, v); };
  add("d_alpha", exterior_derivative(g5, n.alpha).max_abs());
  add("d_omega1", exterior_derivative(g5, n.omega[0]).max_abs());
  add("d_omega2", exterior_derivative(g5, n.omega[1]).max_abs());
  const auto d = integrable_data(n, g5, t);
  r.scalar_residual = scalar_condition_residual(n, d, t);
  add("scalar_condition", magnitude(r.scalar_residual));
  try {
    r.omega3_residual = omega3_condition_residual(n, g5, d, t);
    add("omega3_condition", r.omega3_residual.max_abs());
  } catch (const SingularError &e) {
    r.checks.add("omega3_condition", false, 0.0, e.what());
  }
  try {
    r.phi = recovered_phi(n, d, t);
  } catch (const SingularError &e) {
    r.singular = e.what();
  }
  return r;
}

/// Lift of (alpha, omega_i) along d eta = phi with t a function of the
/// coordinate x, evaluated at x0. Coefficients carry x-derivatives so that
/// the exterior derivative sees the x-dependence.
struct IntegrableLift {
  LieAlgebra algebra;
  SU3Structure<double> su3;
  Form<double> domega, dpsi_plus, dpsi_minus;
  SU3Torsion<double> torsion;
};

inline IntegrableLift integrable_lift(const SU2Structure<Rational> &n, const LieAlgebra &g5, const Form<Rational> &phi,
                                      const std::function<Jet(const Jet &)> &t_of_x, double x0) {
  if (!g5.coordinate()) throw std::invalid_argument("integrable_lift: the algebra has no coordinate generator");
  IntegrableLift out;
  out.algebra = lift_algebra(g5, phi);
  const Jet t = t_of_x(Jet::variable(x0));
  if (!(t.v > 0)) throw DomainError("integrable_lift: t must be positive");
  const std::array<Form<Jet>, 3> w{promote_form<Jet>(n.omega[0]), promote_form<Jet>(n.omega[1]),
                                   promote_form<Jet>(n.omega[2])};
  const auto [omega, psi] = lift_forms(promote_form<Jet>(n.alpha), w, t);
  const auto sj = make_su3(omega, psi);
  out.su3 = make_su3(jet_component(omega, 0), jet_component(psi, 0));
  out.domega = jet_component(exterior_derivative(out.algebra, omega), 0);
  out.dpsi_plus = jet_component(exterior_derivative(out.algebra, psi), 0);
  out.dpsi_minus = jet_component(exterior_derivative(out.algebra, sj.psi_minus), 0);
  out.torsion = extract_su3_torsion(out.su3, out.domega, out.dpsi_plus, out.dpsi_minus, 1e-10);
  return out;
}

/// omega = (1-x) omega_3 + eta ^ alpha, Psi = (omega_1 + i omega_2) ^ (eta + i (1-x)^2 alpha)
/// over a structure with alpha = dx and all forms closed, with d eta = omega_3.
inline IntegrableLift build_final_example(const SU2Structure<Rational> &n, const LieAlgebra &g5, double x0) {
  return integrable_lift(n, g5, n.omega[2], [](const Jet &x) { return reciprocal(Jet(1.0) - x); }, x0);
}

}  // namespace halfflat
