#pragma once

#include "generators.hpp"
#include "halfflat/flow.hpp"
#include "halfflat/metric.hpp"
#include "halfflat/reduction.hpp"
#include "halfflat/stable.hpp"

namespace halfflat::testgen {

/// Each property returns the number of failing cases out of `cases`.

inline int d_squared_failures(int cases, unsigned seed) {
  std::mt19937 rng(seed);
  int failures = 0;
  for (int c = 0; c < cases; ++c) {
    const LieAlgebra g = random_algebra(rng);
    const int k = static_cast<int>(rng() % (g.dim() - 1));
    const auto f = random_form(rng, g.dim(), k);
    if (!exterior_derivative(g, exterior_derivative(g, f)).is_zero()) ++failures;
  }
  return failures;
}

inline int leibniz_failures(int cases, unsigned seed) {
  std::mt19937 rng(seed);
  int failures = 0;
  for (int c = 0; c < cases; ++c) {
    const LieAlgebra g = random_algebra(rng);
    const int n = g.dim();
    const int p = static_cast<int>(rng() % n);
    const int q = static_cast<int>(rng() % (n - p));
    const auto a = random_form(rng, n, p);
    const auto b = random_form(rng, n, q);
    const auto lhs = exterior_derivative(g, wedge(a, b));
    auto rhs = wedge(exterior_derivative(g, a), b);
    const auto second = wedge(a, exterior_derivative(g, b));
    rhs = p % 2 ? rhs - second : rhs + second;
    if (lhs != rhs) ++failures;
  }
  return failures;
}

/// ** = (-1)^(k(n-k)), a ^ *b = <a,b> vol, symmetry of <,>, and *E^1 = E^2...E^n
/// for the orthonormal coframe; dimensions 4 to 7.
inline int hodge_failures(int cases, unsigned seed) {
  std::mt19937 rng(seed);
  int failures = 0;
  for (int c = 0; c < cases; ++c) {
    const int n = 4 + static_cast<int>(rng() % 4);
    const int k = static_cast<int>(rng() % (n + 1));
    std::vector<Form<Rational>> coframe;
    for (const auto &r : rows_of(random_invertible(rng, n))) {
      Form<Rational> e(n, 1);
      for (int i = 0; i < n; ++i) e.at(i) = r[i];
      coframe.push_back(e);
    }
    const Metric<Rational> m = metric_from_coframe(coframe);
    const auto a = random_form(rng, n, k);
    const auto b = random_form(rng, n, k);
    const auto sb = hodge_star(b, m);
    Form<Rational> rest = coframe[1];
    for (int i = 2; i < n; ++i) rest = wedge(rest, coframe[i]);
    const bool ok = hodge_star(sb, m) == ((k * (n - k)) % 2 ? -b : b) &&
                    wedge(a, sb) == volume_form(m) * inner_product(a, b, m) &&
                    inner_product(a, b, m) == inner_product(b, a, m) && hodge_star(coframe[0], m) == rest;
    if (!ok) ++failures;
  }
  return failures;
}

/// K^2 = lambda Id on random 3-forms in dimension 6; `negative` counts
/// forms of complex type.
inline int k_squared_failures(int cases, unsigned seed, int *negative = nullptr) {
  std::mt19937 rng(seed);
  int failures = 0, neg = 0;
  for (int c = 0; c < cases; ++c) {
    const auto rho = random_form(rng, 6, 3);
    const auto h = hitchin_invariant(rho, Rational(random_rational(rng) + 4));
    if (h.K * h.K != Matrix<Rational>::identity(6) * h.lambda) ++failures;
    if (sgn(h.lambda) < 0) ++neg;
  }
  if (negative) *negative = neg;
  return failures;
}

/// L^-1(omega ^ beta) = beta for random nondegenerate omega.
inline int lefschetz_failures(int cases, unsigned seed) {
  std::mt19937 rng(seed);
  int failures = 0;
  const auto model = parse_form("e12+e34+e56", 6, 2);
  for (int c = 0; c < cases; ++c) {
    const auto omega = substitute(model, rows_of(random_invertible(rng, 6)));
    const auto beta = random_form(rng, 6, 2);
    if (lefschetz_inverse(omega, wedge(omega, beta)) != beta) ++failures;
  }
  return failures;
}

/// Lift a random hypo structure with random closed phi and constant t, then
/// reduce along the fibre: the SU(2) data, phi, t and the quotient algebra
/// come back exactly.
inline int reduce_lift_failures(int cases, unsigned seed) {
  std::mt19937 rng(seed);
  Vector<Rational> x(6, Rational(0));
  x[5] = 1;
  int failures = 0;
  for (int c = 0; c < cases; ++c) {
    const auto h = random_hypo(rng);
    const Rational t = abs(random_rational(rng, 3, 4)) + Rational(1, 5);
    const auto l = lift(make_su2(h.alpha, h.omega), h.g5, h.phi, t);
    const auto red = reduce(l.su3, l.algebra, x);
    bool ok = red.data.t == t && red.su2.alpha == h.alpha && red.data.phi == h.phi;
    for (int i = 0; i < 3; ++i) ok = ok && red.su2.omega[i] == h.omega[i];
    ok = ok && red.data.quotient.differentials() == h.g5.differentials();
    if (!ok) ++failures;
  }
  return failures;
}

}  // namespace halfflat::testgen
