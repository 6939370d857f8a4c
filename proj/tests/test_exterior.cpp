#include <doctest.h>

#include "halfflat/form.hpp"
#include "halfflat/liealg.hpp"

using namespace halfflat;

namespace {
Form<Rational> F(const std::string &s, int dim, int deg) { return parse_form(s, dim, deg); }
}  // namespace

TEST_CASE("wedge signs") {
  const auto e1 = Form<Rational>::generator(6, 0);
  const auto e2 = Form<Rational>::generator(6, 1);
  CHECK(wedge(e1, e2) == F("e12", 6, 2));
  CHECK(wedge(e2, e1) == F("-e12", 6, 2));
  const auto a = F("e12+e34", 6, 2);
  CHECK(wedge(a, a) == F("2*e1234", 6, 4));
  const auto omega = F("e14+e23+e65", 6, 2);
  CHECK(power(omega, 3) == F("-6*e123456", 6, 6));
}

TEST_CASE("wedge beyond top degree is zero") {
  const auto a = F("e123", 5, 3);
  const auto w = wedge(a, a);
  CHECK(w.degree() == 6);
  CHECK(w.size() == 0);
  CHECK(w.is_zero());
}

TEST_CASE("form parser handles unordered indices") {
  CHECK(F("e653", 6, 3) == F("-e356", 6, 3));
  CHECK(F("e312", 6, 3) == F("e123", 6, 3));
  CHECK(F("1/2*e21", 6, 2) == F("-1/2*e12", 6, 2));
  CHECK_THROWS(F("e11", 6, 2));
  CHECK_THROWS(F("e17", 6, 2));
}

TEST_CASE("exterior derivative on (0,0,0,12,13,23)") {
  const LieAlgebra g = parse_structure_notation("(0,0,0,12,13,23)");
  CHECK(exterior_derivative(g, F("e16", 6, 2)) == F("-e123", 6, 3));
  const auto omega = F("e16-e25-2*e34", 6, 2);  // u = 1
  CHECK(exterior_derivative(g, omega).is_zero());
  CHECK(exterior_derivative(g, Form<Rational>::constant(6, Rational(5))).is_zero());
}

TEST_CASE("exterior derivative of the u-family omega") {
  const LieAlgebra g = parse_structure_notation("(0,0,0,12,13,23)");
  for (double u : {0.7, 1.0, 2.0, -1.0}) {
    Form<double> omega(6, 2);
    omega[0b100001] = 1.0 / u;
    omega[0b010010] = -1.0 / u;
    omega[0b001100] = -(3 * u * u - 1) / u;
    const auto d = exterior_derivative(g, omega);
    Form<double> expect(6, 3);
    expect[0b000111] = 3 * (u * u - 1) / u;
    CHECK((d - expect).max_abs() < 1e-14);
  }
}

TEST_CASE("interior product") {
  const auto v1 = basis_vector<Rational>(6, 0);
  const auto v4 = basis_vector<Rational>(6, 3);
  CHECK(interior(v1, F("e12", 6, 2)) == F("e2", 6, 1));
  CHECK(interior(v4, F("e34", 6, 2)) == F("-e3", 6, 1));
  CHECK(interior(v4, F("e16-e25-2*e34", 6, 2)) == F("2*e3", 6, 1));
  CHECK(interior(v4, Form<Rational>::constant(6, Rational(1))).is_zero());
}

TEST_CASE("jet coefficients and parametric evaluation") {
  const Jet u = Jet::variable(1.0);
  const Jet c = pow(3.0 * u * u - 1.0, 2) / (4.0 * pow(u, 6));
  Form<Jet> f(6, 3);
  f[0b000111] = c;
  CHECK(jet_component(f, 0)[0b000111] == doctest::Approx(1.0));
  CHECK(std::fabs(jet_component(f, 1)[0b000111]) < 1e-14);
  Form<Jet> k(6, 3);
  k[0b000111] = Jet(2.0);
  CHECK(jet_component(k, 1).is_zero());
  Form<Jet> pole(6, 1);
  pole[0b1] = 1.0 / Jet::variable(0.0);
  CHECK_THROWS_AS(jet_component(pole, 0), DomainError);
}

TEST_CASE("total derivative along a coordinate") {
  // abelian R^2 with coordinate x = e1: d(x^2 e2) = 2x e12
  const LieAlgebra g(2, {Form<Rational>(2, 2), Form<Rational>(2, 2)}, "", 0);
  const Jet x = Jet::variable(3.0);
  Form<Jet> a(2, 1);
  a[0b10] = x * x;
  const auto da = exterior_derivative(g, a);
  CHECK(da[0b11].v == doctest::Approx(6.0));
  CHECK(da[0b11].d1 == doctest::Approx(2.0));
}
