#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "halfflat/form.hpp"
#include "halfflat/report.hpp"

namespace halfflat {

using json = nlohmann::json;

/// Form JSON: {"degree": k, "coeffs": {"124": "3/2", ...}}; rationals are
/// written as "p/q" strings, floats as numbers.
json form_to_json(const Form<Rational> &f);
json form_to_json(const Form<double> &f);

/// True when every coefficient is an integer or a rational string.
bool form_json_is_exact(const json &j);

/// Reads a form of the given dimension. The rational overload rejects
/// floating-point coefficients; the float overload accepts both.
Form<Rational> form_from_json_exact(const json &j, int dim);
Form<double> form_from_json_float(const json &j, int dim);

/// Structure JSON: {"omega": Form, "psiPlus": Form} in dimension 6 and
/// {"alpha": Form, "omega1": Form, "omega2": Form, "omega3": Form} in dimension 5.
template <class S>
json su3_to_json(const Form<S> &omega, const Form<S> &psi_plus) {
  return {{"omega", form_to_json(omega)}, {"psiPlus", form_to_json(psi_plus)}};
}
template <class S>
json su2_to_json(const Form<S> &alpha, const std::array<Form<S>, 3> &omega) {
  return {{"alpha", form_to_json(alpha)},
          {"omega1", form_to_json(omega[0])},
          {"omega2", form_to_json(omega[1])},
          {"omega3", form_to_json(omega[2])}};
}

bool structure_json_is_exact(const json &j);

template <class S>
Form<S> form_from_json(const json &j, int dim) {
  if constexpr (std::is_same_v<S, Rational>) return form_from_json_exact(j, dim);
  else return form_from_json_float(j, dim);
}

template <class S>
std::pair<Form<S>, Form<S>> su3_from_json(const json &j) {
  return {form_from_json<S>(j.at("omega"), 6), form_from_json<S>(j.at("psiPlus"), 6)};
}

template <class S>
std::pair<Form<S>, std::array<Form<S>, 3>> su2_from_json(const json &j) {
  return {form_from_json<S>(j.at("alpha"), 5),
          {form_from_json<S>(j.at("omega1"), 5), form_from_json<S>(j.at("omega2"), 5),
           form_from_json<S>(j.at("omega3"), 5)}};
}

/// Scalar JSON: "p/q" string for rationals, number for floats.
json scalar_to_json(const Rational &x);
json scalar_to_json(double x);
Rational rational_from_json(const json &j);
double float_from_json(const json &j);

/// Rational vector written as "a,b,c" with entries p/q.
std::vector<Rational> parse_rational_list(const std::string &s);
std::vector<double> parse_float_list(const std::string &s);

json report_to_json(const ValidationReport &r);

/// Serializes with floats at 17 significant digits; indent < 0 gives one line.
std::string dump17(const json &j, int indent = 2);

/// FNV-1a 64-bit digest as 16 hex digits.
std::string digest(const std::string &s);

json read_json_file(const std::string &path);

}  // namespace halfflat
