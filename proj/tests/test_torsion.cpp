#include <doctest.h>

#include <random>

#include "halfflat/examples.hpp"
#include "halfflat/torsion.hpp"

using namespace halfflat;

namespace {
const Form<Rational> kOmega = parse_form("e14+e23+e65", 6, 2);
const Form<Rational> kRe = parse_form("e126-e135-e436-e425", 6, 3);

std::vector<std::vector<Rational>> random_coframe(std::mt19937 &rng, int n) {
  std::uniform_int_distribution<int> dist(-2, 2);
  for (;;) {
    Matrix<Rational> m(n, n);
    std::vector<std::vector<Rational>> sub(n, std::vector<Rational>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = sub[i][j] = Rational(dist(rng) + (i == j ? 3 : 0));
    if (!is_zero(determinant(m))) return sub;
  }
}

template <class S>
void check_types(const SU3Structure<S> &s, const SU3Torsion<S> &t, double tol) {
  const Form<S> w2 = wedge(s.omega, s.omega);
  for (const auto *b : {&t.W2p, &t.W2m}) {
    CHECK((*b - J_on_two_form(*b, s.J)).max_abs() <= tol);
    CHECK(wedge(*b, w2).max_abs() <= tol);
  }
  CHECK(wedge(t.W3, s.omega).max_abs() <= tol);
  CHECK(wedge(t.W3, s.psi_plus).max_abs() <= tol);
  CHECK(wedge(t.W3, s.psi_minus).max_abs() <= tol);
}
}  // namespace

TEST_CASE("subspace dimensions") {
  const auto s = make_su3(kOmega, kRe);
  CHECK(primitive_11_basis(s).size() == 8);
  CHECK(primitive_21_basis(s).size() == 12);
}

TEST_CASE("torus: all SU(3) torsion vanishes and the structure is integrable") {
  const auto g = parse_structure_notation("(0,0,0,0,0,0)");
  const auto s = make_su3(kOmega, kRe);
  const auto t = extract_su3_torsion(s, g);
  for (const auto &[name, v] : su3_component_norms(t)) {
    CAPTURE(name);
    CHECK(v == 0.0);
  }
  const auto p = su3_predicates(s, g);
  CHECK(p.half_flat);
  CHECK(p.symplectic_half_flat);
  CHECK(p.integrable);
}

TEST_CASE("explicit family at u = 1: only W2- survives") {
  const auto g = parse_structure_notation(kExplicitFamilyAlgebra);
  const auto [omega, psi] = explicit_family(Rational(1));
  const auto s = make_su3(omega, psi);
  const auto t = extract_su3_torsion(s, g);
  CHECK(t.reconstruction_residual == 0.0);
  for (const auto &[name, v] : su3_component_norms(t)) {
    CAPTURE(name);
    if (name == "W2-") CHECK(v > 1e-3);
    else CHECK(v == 0.0);
  }
  check_types(s, t, 0.0);
  // with d omega = 0 = d psi+, d psi- is W2- ^ omega
  CHECK(exterior_derivative(g, s.psi_minus) == wedge(t.W2m, s.omega));
  const auto p = su3_predicates(s, g);
  CHECK(p.half_flat);
  CHECK(p.symplectic_half_flat);
  CHECK_FALSE(p.integrable);
}

TEST_CASE("explicit family at u = 2 (float): half-flat but not symplectic") {
  const auto g = parse_structure_notation(kExplicitFamilyAlgebra);
  const auto [omega, psi] = explicit_family(2.0);
  const auto s = make_su3(omega, psi);
  const auto t = extract_su3_torsion(s, g);
  CHECK(t.reconstruction_residual < 1e-9);
  CHECK(std::abs(t.W1p) < 1e-10);
  CHECK(t.W2p.max_abs() < 1e-10);
  CHECK(t.W5.max_abs() < 1e-10);
  CHECK(std::abs(t.W1m) > 1e-3);
  CHECK(t.W2m.max_abs() > 1e-3);
  CHECK(t.W3.max_abs() > 1e-3);
  CHECK(t.w1_consistency < 1e-9);
  check_types(s, t, 1e-9);
  // d omega = 3(u^2-1)/u e123 = 9/2 e123
  const auto dw = exterior_derivative(g, s.omega);
  CHECK((dw - Form<double>::monomial(6, 0b000111, 4.5)).max_abs() < 1e-12);
  const auto p = su3_predicates(s, g);
  CHECK(p.half_flat);
  CHECK_FALSE(p.symplectic_half_flat);
}

TEST_CASE("random rational SU(3)-structures: exact reconstruction and consistent W1") {
  std::mt19937 rng(7);
  for (const char *nota : {"(0,0,0,12,13,23)", "(0,0,0,0,12,13)", "(0,0,12,13,23,14)"}) {
    const auto g = parse_structure_notation(nota);
    for (int trial = 0; trial < 3; ++trial) {
      const auto sub = random_coframe(rng, 6);
      const auto s = make_su3(substitute(kOmega, sub), substitute(kRe, sub));
      const auto t = extract_su3_torsion(s, g);
      CAPTURE(nota);
      CHECK(t.reconstruction_residual == 0.0);
      CHECK(t.w1_consistency == 0.0);
      CHECK(t.w5_consistency == 0.0);
      check_types(s, t, 0.0);
    }
  }
}

TEST_CASE("SU(2) torsion on the abelian algebra vanishes") {
  const auto ex = hypo_examples()[0];
  const auto s = make_su2(ex.alpha, ex.omega);
  const auto t = extract_su2_torsion(s, ex.algebra());
  for (const auto &[name, v] : su2_components(t)) {
    CAPTURE(name);
    for (double x : v) CHECK(x == 0.0);
  }
  CHECK(su2_hypo(s, ex.algebra()));
}

TEST_CASE("SU(2) torsion of the listed hypo examples") {
  for (const auto &ex : hypo_examples()) {
    CAPTURE(ex.name);
    const auto g = ex.algebra();
    const auto s = make_su2(ex.alpha, ex.omega);
    CHECK(su2_hypo(s, g));
    const auto t = extract_su2_torsion(s, g);
    CHECK(t.reconstruction_residual == 0.0);
    CHECK(t.lambda_consistency == 0.0);
    CHECK(t.g_antisymmetry == 0.0);
    // alpha closed: beta, f and omega- vanish
    CHECK(t.beta.is_zero());
    for (int j = 0; j < 3; ++j) CHECK(is_zero(t.f[j]));
    CHECK(t.omega_minus.is_zero());
    // omega_1 closed: its line vanishes entirely
    CHECK(t.gamma[0].is_zero());
    CHECK(is_zero(t.lambda));
    CHECK(t.sigma[0].is_zero());
    CHECK(is_zero(t.g12()));
    CHECK(is_zero(t.g13()));
  }
}

TEST_CASE("SU(2) torsion on random rational structures") {
  std::mt19937 rng(11);
  const auto ex = hypo_examples()[0];
  for (const char *nota : {"(0,0,0,12,13)", "(0,0,0,0,12)", "(0,0,12,13,14)"}) {
    const auto g = parse_structure_notation(nota);
    for (int trial = 0; trial < 3; ++trial) {
      const auto sub = random_coframe(rng, 5);
      const auto alpha = substitute(ex.alpha, sub);
      const std::array<Form<Rational>, 3> w{substitute(ex.omega[0], sub), substitute(ex.omega[1], sub),
                                            substitute(ex.omega[2], sub)};
      const auto s = make_su2(alpha, w);
      const auto t = extract_su2_torsion(s, g);
      CAPTURE(nota);
      CHECK(t.reconstruction_residual == 0.0);
      CHECK(t.lambda_consistency == 0.0);
      CHECK(t.g_antisymmetry == 0.0);
      // projections agree with the basis constructions
      for (int i = 0; i < 3; ++i) CHECK(project_lambda2m(s, t.sigma[i]) == t.sigma[i]);
      CHECK(project_lambda1(s, t.beta) == t.beta);
    }
  }
}
