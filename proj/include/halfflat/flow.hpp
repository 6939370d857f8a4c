#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "halfflat/examples.hpp"
#include "halfflat/liealg.hpp"
#include "halfflat/metric.hpp"
#include "halfflat/report.hpp"
#include "halfflat/stable.hpp"

namespace halfflat {

class FlowError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// The explicit solution on (0,0,0,12,13,23).

/// t(u) = -12 + 1/(2u^3) - 1/(10u^5).
template <class S>
S explicit_time(const S &u) {
  const S u2 = u * u;
  const S u3 = u2 * u;
  return S(-12.0) + S(1.0) / (S(2.0) * u3) - S(1.0) / (S(10.0) * u3 * u2);
}

/// dt/du = (1 - 3u^2) / (2u^6).
inline double explicit_dt_du(double u) { return (1.0 - 3.0 * u * u) / (2.0 * std::pow(u, 6)); }

/// Inverse of t(u) by Newton's method from `guess`, staying on the branch of
/// `guess` relative to the critical point u^2 = 1/3.
inline double explicit_u_of_time(double t, double guess) {
  const double uc = 1.0 / std::sqrt(3.0);
  const double side = guess > uc ? 1.0 : -1.0;
  if (guess <= 0) throw std::invalid_argument("explicit_u_of_time: guess must be positive");
  double u = guess;
  for (int it = 0; it < 200; ++it) {
    const double f = explicit_time(u) - t;
    double step = f / explicit_dt_du(u);
    double next = u - step;
    while (next <= 0 || (next - uc) * side <= 0) {
      step *= 0.5;
      next = u - step;
    }
    u = next;
    if (std::fabs(step) <= 1e-15 * std::fabs(u)) break;
  }
  if (std::fabs(explicit_time(u) - t) > 1e-12 * std::max(1.0, std::fabs(t)))
    throw FlowError("explicit_u_of_time: no solution on the branch of the initial guess");
  return u;
}

/// Residuals of d omega = d/dt psi+ and d psi- = -1/2 d/dt omega^2 for the
/// explicit family at u, with t-derivatives from u-derivatives by the chain rule.
struct EvolutionResiduals {
  double first = 0.0;
  double second = 0.0;
};

inline EvolutionResiduals explicit_evolution_residuals(double u) {
  const LieAlgebra g = parse_structure_notation(kExplicitFamilyAlgebra);
  const auto [omega, psi] = explicit_family(Jet::variable(u));
  const auto s = make_su3(omega, psi);
  const double dudt = 1.0 / explicit_dt_du(u);
  const Form<double> domega = jet_component(exterior_derivative(g, omega), 0);
  const Form<double> psi_t = jet_component(psi, 1) * dudt;
  const Form<double> dpsim = jet_component(exterior_derivative(g, s.psi_minus), 0);
  const Form<double> w2_t = jet_component(wedge(omega, omega), 1) * dudt;
  return {(domega - psi_t).max_abs(), (dpsim + w2_t * 0.5).max_abs()};
}

// ---------------------------------------------------------------------------
// The flow.

/// Solves omega ^ beta = gamma for a 2-form beta (gamma a 4-form).
template <class S>
Form<S> lefschetz_inverse(const Form<S> &omega, const Form<S> &gamma, double tol = 1e-12) {
  const int n = omega.dim();
  const auto &masks = MaskTable::masks(n, 2);
  Matrix<S> a(gamma.size(), masks.size());
  for (std::size_t c = 0; c < masks.size(); ++c) {
    const Form<S> img = wedge(omega, Form<S>::monomial(n, masks[c]));
    for (std::size_t r = 0; r < img.size(); ++r) a(r, c) = img.at(r);
  }
  if (rank(a, tol) != masks.size()) throw DegenerateError("lefschetz_inverse: omega is degenerate");
  auto x = solve(a, gamma.coefficients(), tol);
  if (!x) throw DegenerateError("lefschetz_inverse: inconsistent system");
  Form<S> beta(n, 2);
  for (std::size_t i = 0; i < x->size(); ++i) beta.at(i) = (*x)[i];
  return beta;
}

struct FlowState {
  double t = 0.0;
  Form<double> omega{6, 2};
  Form<double> psi_plus{6, 3};
  int orientation = 1;

  SU3Structure<double> su3() const { return make_su3(omega, psi_plus, orientation); }
};

struct FlowRhs {
  Form<double> dpsi_plus_dt;
  Form<double> domega_dt;
};

/// d/dt psi+ = d omega, omega ^ d/dt omega = -d psi-.
inline FlowRhs flow_rhs(const LieAlgebra &g, const FlowState &s) {
  const auto su3 = s.su3();
  if (!(su3.lambda < 0)) throw DegenerateError("flow_rhs: psi+ is not of complex type");
  return {exterior_derivative(g, s.omega), lefschetz_inverse(s.omega, -exterior_derivative(g, su3.psi_minus))};
}

inline FlowState rk4_step(const LieAlgebra &g, const FlowState &s, double h) {
  auto shifted = [&](const FlowRhs &k, double c) {
    FlowState o = s;
    o.t = s.t + c * h;
    o.omega = s.omega + k.domega_dt * (c * h);
    o.psi_plus = s.psi_plus + k.dpsi_plus_dt * (c * h);
    return o;
  };
  const FlowRhs k1 = flow_rhs(g, s);
  const FlowRhs k2 = flow_rhs(g, shifted(k1, 0.5));
  const FlowRhs k3 = flow_rhs(g, shifted(k2, 0.5));
  const FlowRhs k4 = flow_rhs(g, shifted(k3, 1.0));
  FlowState o = s;
  o.t = s.t + h;
  o.omega = s.omega + (k1.domega_dt + k2.domega_dt * 2.0 + k3.domega_dt * 2.0 + k4.domega_dt) * (h / 6.0);
  o.psi_plus = s.psi_plus + (k1.dpsi_plus_dt + k2.dpsi_plus_dt * 2.0 + k3.dpsi_plus_dt * 2.0 + k4.dpsi_plus_dt) * (h / 6.0);
  return o;
}

/// Half-flat residuals |d psi+| and |d(omega^2)|.
inline std::pair<double, double> half_flat_residuals(const LieAlgebra &g, const FlowState &s) {
  return {exterior_derivative(g, s.psi_plus).max_abs(), exterior_derivative(g, wedge(s.omega, s.omega)).max_abs()};
}

struct FlowOptions {
  double residual_limit = 1e-6;
  double degeneration_limit = 1e-8;  // |omega^3| relative to its initial value
  bool keep_trajectory = true;
};

struct FlowResult {
  std::vector<FlowState> trajectory;
  FlowState final_state;
  int steps = 0;
  bool degenerated = false;
  std::string report;
  double max_dpsi_plus = 0.0;
  double max_domega2 = 0.0;
};

/// Fixed-step RK4 from s0 to t_end; the step is shortened so that t_end is hit exactly.
inline FlowResult evolve(const LieAlgebra &g, const FlowState &s0, double t_end, double step,
                         const FlowOptions &opt = {}) {
  if (!(step > 0)) throw std::invalid_argument("evolve: step must be positive");
  const auto [r0a, r0b] = half_flat_residuals(g, s0);
  if (r0a > opt.residual_limit || r0b > opt.residual_limit) throw FlowError("evolve: initial state is not half-flat");
  const double vol0 = std::fabs(top_coefficient(power(s0.omega, 3)));
  if (vol0 == 0.0) throw DegenerateError("evolve: omega is degenerate");
  const double span = t_end - s0.t;
  const int n = static_cast<int>(std::ceil(std::fabs(span) / step - 1e-9));
  const double h = n > 0 ? span / n : 0.0;
  FlowResult res;
  res.max_dpsi_plus = r0a;
  res.max_domega2 = r0b;
  FlowState s = s0;
  if (opt.keep_trajectory) res.trajectory.push_back(s);
  for (int i = 0; i < n; ++i) {
    FlowState next;
    try {
      next = rk4_step(g, s, h);
    } catch (const DegenerateError &e) {
      res.degenerated = true;
      res.report = std::string("degenerated near t = ") + format_double(s.t) + ": " + e.what();
      break;
    }
    if (i + 1 == n) next.t = t_end;
    const double vol = std::fabs(top_coefficient(power(next.omega, 3)));
    if (vol < opt.degeneration_limit * vol0) {
      res.degenerated = true;
      res.report = "omega^3 degenerates near t = " + format_double(next.t);
      break;
    }
    const auto [ra, rb] = half_flat_residuals(g, next);
    res.max_dpsi_plus = std::max(res.max_dpsi_plus, ra);
    res.max_domega2 = std::max(res.max_domega2, rb);
    if (ra > opt.residual_limit || rb > opt.residual_limit)
      throw FlowError("evolve: half-flat residual exceeded the limit at t = " + format_double(next.t));
    s = next;
    ++res.steps;
    if (opt.keep_trajectory) res.trajectory.push_back(s);
  }
  res.final_state = s;
  return res;
}

/// State of the explicit family at u.
inline FlowState explicit_state(double u) {
  const auto [omega, psi] = explicit_family(u);
  return {explicit_time(u), omega, psi, omega_orientation(omega)};
}

// ---------------------------------------------------------------------------
// G2-structures phi = omega ^ dt + psi+ on the 7-dimensional extension.

/// e147 + e257 + e367 + e123 - e156 - e426 - e453.
inline Form<Rational> standard_g2_form() {
  return parse_form("e147+e257+e367+e123-e156-e426-e453", 7, 3);
}

/// Parametric 3-form on g + <e7>, where e7 is the coordinate generator ds and
/// dt = (dt/ds) ds; coefficients are jets in s.
struct G2Data {
  LieAlgebra algebra;
  Form<Jet> phi;
  Metric<Jet> metric;
};

/// Assembles phi from jets (omega, psi+) in s and dt/ds; the metric is the
/// SU(3) metric plus dt^2.
inline G2Data assemble_g2(const LieAlgebra &g6, const Form<Jet> &omega, const Form<Jet> &psi_plus, const Jet &dt_ds,
                          std::optional<int> orientation = std::nullopt) {
  G2Data out;
  out.algebra = extend_with_coordinate(g6);
  const Form<Jet> dt = Form<Jet>::generator(7, 6, dt_ds);
  out.phi = wedge(extend(omega, 7), dt) + extend(psi_plus, 7);
  const auto s = make_su3(omega, psi_plus, orientation);
  Matrix<Jet> g7(7, 7);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) g7(i, j) = s.g(i, j);
  g7(6, 6) = dt_ds * dt_ds;
  out.metric = metric_from_matrix(g7, s.orientation * sign_of(dt_ds));
  return out;
}

/// The explicit family at u with s = u.
inline G2Data assemble_g2_explicit(double u) {
  const auto [omega, psi] = explicit_family(Jet::variable(u));
  const Jet uj = Jet::variable(u);
  const Jet dt = (Jet(1.0) - Jet(3.0) * uj * uj) / (Jet(2.0) * pow(uj, 6));
  return assemble_g2(parse_structure_notation(kExplicitFamilyAlgebra), omega, psi, dt);
}

/// A flow state with s = t; the t-derivatives come from the evolution equations.
inline G2Data assemble_g2_state(const LieAlgebra &g6, const FlowState &s) {
  const FlowRhs r = flow_rhs(g6, s);
  auto jets = [](const Form<double> &v, const Form<double> &d) {
    Form<Jet> f(v.dim(), v.degree());
    for (std::size_t i = 0; i < v.size(); ++i) f.at(i) = Jet(v.at(i), d.at(i), 0.0);
    return f;
  };
  return assemble_g2(g6, jets(s.omega, r.domega_dt), jets(s.psi_plus, r.dpsi_plus_dt), Jet(1.0), s.orientation);
}

/// Residuals of d phi and d *phi (value part).
inline ValidationReport g2_validate(const G2Data &d, double tol = 1e-7) {
  ValidationReport r;
  const double dphi = jet_component(exterior_derivative(d.algebra, d.phi), 0).max_abs();
  const Form<Jet> star = hodge_star(d.phi, d.metric);
  const double dstar = jet_component(exterior_derivative(d.algebra, star), 0).max_abs();
  r.add("d_phi", dphi <= tol, dphi);
  r.add("d_star_phi", dstar <= tol, dstar);
  return r;
}

/// Orthonormal coframe E^1..E^7 of the explicit solution, aligned with the
/// standard G2 form; E^7 = dt = (dt/du) du.
inline std::vector<Form<Jet>> explicit_orthonormal_coframe(const Jet &u) {
  const Jet u2 = u * u;
  const Jet q = Jet(3.0) * u2 - Jet(1.0);
  const Jet a = sqrt(q / (Jet(2.0) * u2 * u2));
  const Jet b = sqrt(Jet(2.0) * u2 / q);
  auto gen = [](int i, const Jet &c) { return Form<Jet>::generator(7, i, c); };
  return {gen(0, a),
          gen(1, a),
          gen(2, q / (Jet(2.0) * u2)),
          gen(5, b),
          gen(4, -b),
          gen(3, Jet(-2.0) * u),
          gen(6, (Jet(1.0) - Jet(3.0) * u2) / (Jet(2.0) * pow(u, 6)))};
}

}  // namespace halfflat
