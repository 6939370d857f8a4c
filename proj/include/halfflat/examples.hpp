#pragma once

#include <array>
#include <string>
#include <vector>

#include "halfflat/liealg.hpp"

namespace halfflat {

/// Explicit half-flat family on (0,0,0,12,13,23), u != 0:
///   omega = (e16 - e25)/u - (3u^2-1)/u e34
///   psi+  = (3u^2-1)^2/(4u^6) e123 - 2 e154 + 2 e624 + e653
template <class S>
std::pair<Form<S>, Form<S>> explicit_family(const S &u) {
  const Form<S> a = promote_form<S>(parse_form("e16-e25", 6, 2));
  const Form<S> b = promote_form<S>(parse_form("e34", 6, 2));
  const Form<S> c = promote_form<S>(parse_form("e123", 6, 3));
  const Form<S> d = promote_form<S>(parse_form("-2*e154+2*e624+e653", 6, 3));
  const S inv = S(1) / u;
  const S q = S(3) * u * u - S(1);
  const S u2 = u * u;
  const S u6 = u2 * u2 * u2;
  Form<S> omega = a * inv - b * (q * inv);
  Form<S> psi = c * (q * q / (S(4) * u6)) + d;
  return {omega, psi};
}

inline const char *kExplicitFamilyAlgebra = "(0,0,0,12,13,23)";

/// An SU(2)-structure on a 5-dimensional algebra together with the 2-form
/// phi of the lift, as listed after the classification of 5-dimensional
/// hypo algebras with closed alpha and omega_1.
struct HypoExample {
  std::string name;
  std::string notation;
  Form<Rational> alpha;
  std::array<Form<Rational>, 3> omega;
  Form<Rational> phi;

  LieAlgebra algebra() const { return parse_structure_notation(notation, 5); }
};

inline std::vector<HypoExample> hypo_examples() {
  auto f2 = [](const char *s) { return parse_form(s, 5, 2); };
  auto f1 = [](const char *s) { return parse_form(s, 5, 1); };
  return {
      {"abelian", "(0,0,0,0,0)", f1("e5"), {f2("e12+e34"), f2("e13+e42"), f2("e14+e23")}, Form<Rational>(5, 2)},
      {"h3-r2", "(0,0,0,0,12)", f1("e2"), {f2("e34+e15"), f2("e31+e54"), f2("e35+e41")}, f2("-e13")},
      {"n5-12-13-a", "(0,0,0,12,13)", f1("e1"), {f2("e24+e35"), f2("e23+e54"), f2("e25+e43")}, f2("-2*e23")},
      {"n5-12-13-b", "(0,0,0,12,13)", f1("e1"), {f2("e24-e35"), f2("-e23+e54"), f2("e25-e43")}, Form<Rational>(5, 2)},
  };
}

}  // namespace halfflat
