#include <doctest.h>

#include <cmath>
#include <random>

#include "halfflat/flow.hpp"

using namespace halfflat;

namespace {
const LieAlgebra &family_algebra() {
  static const LieAlgebra g = parse_structure_notation(kExplicitFamilyAlgebra);
  return g;
}

std::vector<std::vector<Jet>> coframe_rows(const std::vector<Form<Jet>> &e) {
  std::vector<std::vector<Jet>> rows;
  for (const auto &f : e) rows.push_back(f.coefficients());
  return rows;
}
}  // namespace

TEST_CASE("reparameterization t(u)") {
  CHECK(explicit_time(1.0) == doctest::Approx(-11.6).epsilon(1e-15));
  CHECK(explicit_time(Rational(1)) == Rational(-58, 5));
  for (double u : {0.7, 0.8, 1.0, 1.3, 2.0}) {
    CAPTURE(u);
    const Jet t = explicit_time(Jet::variable(u));
    CHECK(t.d1 == doctest::Approx(explicit_dt_du(u)).epsilon(1e-13));
    CHECK(explicit_u_of_time(explicit_time(u), 1.0) == doctest::Approx(u).epsilon(1e-14));
  }
  // t(u) has a maximum at u^2 = 1/3; the small branch is reached from a small guess
  CHECK(explicit_u_of_time(explicit_time(0.4), 0.3) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK_THROWS_AS(explicit_u_of_time(explicit_time(1.0 / std::sqrt(3.0)) + 1.0, 1.0), FlowError);
}

TEST_CASE("the psi+ coefficient evolves by d omega") {
  // d/du of (3u^2-1)^2/(4u^6) is (3/2)(3u^2-1)(1-u^2)/u^7; divided by dt/du it is 3(u^2-1)/u
  for (double u : {0.8, 0.9, 1.0, 1.1, 1.5}) {
    CAPTURE(u);
    const double dpsi_du = 1.5 * (3 * u * u - 1) * (1 - u * u) / std::pow(u, 7);
    const double dt_du = (1 - 3 * u * u) / (2 * std::pow(u, 6));
    CHECK(dpsi_du / dt_du == doctest::Approx(3 * (u * u - 1) / u).epsilon(1e-13));
    const auto [omega, psi] = explicit_family(u);
    const auto dw = exterior_derivative(family_algebra(), omega);
    CHECK((dw - Form<double>::monomial(6, 0b000111, 3 * (u * u - 1) / u)).max_abs() < 1e-14);
    CHECK(exterior_derivative(family_algebra(), psi).is_zero());
  }
}

TEST_CASE("the explicit family solves both evolution equations") {
  for (double u : {0.8, 0.9, 1.0, 1.1, 1.5}) {
    CAPTURE(u);
    const auto r = explicit_evolution_residuals(u);
    CHECK(r.first < 1e-12);
    CHECK(r.second < 1e-12);
  }
}

TEST_CASE("lefschetz inverse") {
  const auto w = promote_form<double>(parse_form("e14+e25+e36", 6, 2));
  CHECK((lefschetz_inverse(w, wedge(w, w)) - w).max_abs() < 1e-14);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-1, 1);
  const auto [omega, psi] = explicit_family(1.3);
  for (int trial = 0; trial < 20; ++trial) {
    Form<double> b(6, 2);
    for (std::size_t i = 0; i < b.size(); ++i) b.at(i) = dist(rng);
    CHECK((lefschetz_inverse(omega, wedge(omega, b)) - b).max_abs() < 1e-12);
  }
  CHECK_THROWS_AS(lefschetz_inverse(promote_form<double>(parse_form("e12", 6, 2)), Form<double>(6, 4)),
                  DegenerateError);
}

TEST_CASE("flow_rhs at u = 1 has no psi+ velocity") {
  const auto s = explicit_state(1.0);
  const auto r = flow_rhs(family_algebra(), s);
  CHECK(r.dpsi_plus_dt.max_abs() < 1e-15);
  CHECK(r.domega_dt.max_abs() > 1e-3);
  // omega velocity matches d/dt of the closed form
  const auto [omega, psi] = explicit_family(Jet::variable(1.0));
  const auto w_t = jet_component(omega, 1) * (1.0 / explicit_dt_du(1.0));
  CHECK((r.domega_dt - w_t).max_abs() < 1e-12);
}

TEST_CASE("the flat torus state is stationary") {
  const LieAlgebra g = parse_structure_notation("(0,0,0,0,0,0)");
  FlowState s{0.0, promote_form<double>(parse_form("e14+e25+e36", 6, 2)),
              promote_form<double>(parse_form("e123-e156-e426-e453", 6, 3)), 1};
  const auto r = flow_rhs(g, s);
  CHECK(r.dpsi_plus_dt.is_zero());
  CHECK(r.domega_dt.is_zero());
  const auto res = evolve(g, s, 0.5, 0.1);
  CHECK(res.steps == 5);
  CHECK(res.final_state.t == 0.5);
  CHECK(res.final_state.omega == s.omega);
  CHECK(res.final_state.psi_plus == s.psi_plus);
}

TEST_CASE("RK4 reproduces the explicit solution from u = 1 to u = 0.8") {
  const auto s0 = explicit_state(1.0);
  CHECK(s0.t == doctest::Approx(-11.6));
  const double t_end = explicit_time(0.8);
  const auto res = evolve(family_algebra(), s0, t_end, 1e-3);
  REQUIRE_FALSE(res.degenerated);
  CHECK(res.final_state.t == t_end);
  CHECK(res.max_dpsi_plus < 1e-8);
  CHECK(res.max_domega2 < 1e-8);
  const auto ref = explicit_state(0.8);
  CHECK((res.final_state.omega - ref.omega).max_abs() < 1e-6);
  CHECK((res.final_state.psi_plus - ref.psi_plus).max_abs() < 1e-6);
  // intermediate states track u(t)
  double u = 1.0;
  for (std::size_t i = 0; i < res.trajectory.size(); i += 50) {
    const auto &s = res.trajectory[i];
    u = explicit_u_of_time(s.t, u);
    const auto e = explicit_state(u);
    CHECK((s.omega - e.omega).max_abs() < 1e-6);
  }
}

TEST_CASE("symplectic condition is not preserved") {
  const auto s0 = explicit_state(1.0);
  const auto res = evolve(family_algebra(), s0, explicit_time(0.9), 1e-3);
  CHECK(exterior_derivative(family_algebra(), res.final_state.omega).max_abs() > 1e-2);
}

TEST_CASE("evolve rejects non-half-flat data") {
  auto s = explicit_state(1.0);
  s.psi_plus += promote_form<double>(parse_form("e456", 6, 3)) * 0.1;
  CHECK_THROWS_AS(evolve(family_algebra(), s, -11.5, 1e-3), FlowError);
}

TEST_CASE("standard G2 form on the flat extension") {
  const LieAlgebra g = parse_structure_notation("(0,0,0,0,0,0)");
  const auto w = promote_form<Jet>(parse_form("e14+e25+e36", 6, 2));
  const auto p = promote_form<Jet>(parse_form("e123-e156-e426-e453", 6, 3));
  const auto d = assemble_g2(g, w, p, Jet(1.0));
  CHECK(jet_component(d.phi, 0) == promote_form<double>(standard_g2_form()));
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) CHECK(d.metric.g(i, j).v == doctest::Approx(i == j ? 1.0 : 0.0));
  const auto r = g2_validate(d);
  CHECK(r.pass());
  CHECK(r.find("d_phi")->residual == 0.0);
  CHECK(r.find("d_star_phi")->residual == 0.0);
}

TEST_CASE("explicit solution gives a closed and co-closed G2 form") {
  for (double u : {1.0, 1.2}) {
    CAPTURE(u);
    const auto d = assemble_g2_explicit(u);
    const auto r = g2_validate(d);
    CHECK(r.find("d_phi")->residual < 1e-12);
    CHECK(r.find("d_star_phi")->residual < 1e-7);
  }
  // without the correct reparameterization d*phi fails
  const auto [omega, psi] = explicit_family(Jet::variable(1.2));
  const auto bad = assemble_g2(family_algebra(), omega, psi, Jet(1.0));
  CHECK_FALSE(g2_validate(bad).pass());
}

TEST_CASE("orthonormal coframe aligns phi with the standard G2 form") {
  for (double u : {1.0, 1.2, 1.7}) {
    CAPTURE(u);
    const auto d = assemble_g2_explicit(u);
    const auto e = explicit_orthonormal_coframe(Jet::variable(u));
    const auto aligned = substitute(promote_form<Jet>(standard_g2_form()), coframe_rows(e));
    CHECK((jet_component(aligned, 0) - jet_component(d.phi, 0)).max_abs() < 1e-13);
    CHECK((jet_component(aligned, 1) - jet_component(d.phi, 1)).max_abs() < 1e-11);
    const auto m = metric_from_coframe(e);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) CHECK(m.g(i, j).v == doctest::Approx(d.metric.g(i, j).v).epsilon(1e-13));
  }
}

TEST_CASE("G2 form from an integrated flow state") {
  const auto s0 = explicit_state(1.0);
  const auto res = evolve(family_algebra(), s0, explicit_time(0.9), 1e-3, {1e-6, 1e-8, false});
  CHECK(res.trajectory.empty());
  const auto r = g2_validate(assemble_g2_state(family_algebra(), res.final_state));
  CHECK(r.find("d_phi")->residual < 1e-12);
  CHECK(r.find("d_star_phi")->residual < 1e-10);
}
