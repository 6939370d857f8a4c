#include "halfflat/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace halfflat {

namespace {

Rational parse_rational_text(const std::string &s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) throw std::invalid_argument("empty rational");
  if (t[0] == '+') t.erase(0, 1);
  for (char c : t)
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-'))
      throw std::invalid_argument("not a rational: '" + s + "'");
  Rational r;
  try {
    r = Rational(t);
  } catch (const std::exception &) {
    throw std::invalid_argument("not a rational: '" + s + "'");
  }
  if (r.get_den() == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
  r.canonicalize();
  return r;
}

bool is_exact_scalar(const json &c) {
  if (c.is_number_integer()) return true;
  if (!c.is_string()) return false;
  try {
    parse_rational_text(c.get<std::string>());
    return true;
  } catch (const std::exception &) {
    return false;
  }
}

template <class S, class Scalar>
Form<S> read_form(const json &j, int dim, Scalar &&scalar) {
  if (!j.is_object() || !j.contains("degree") || !j.contains("coeffs"))
    throw std::invalid_argument("form JSON needs \"degree\" and \"coeffs\"");
  const int k = j.at("degree").get<int>();
  if (k < 0 || k > dim) throw std::invalid_argument("form degree out of range");
  if (j.contains("dim") && j.at("dim").get<int>() != dim)
    throw std::invalid_argument("form has dimension " + std::to_string(j.at("dim").get<int>()) + ", expected " +
                                std::to_string(dim));
  Form<S> f(dim, k);
  for (const auto &[key, val] : j.at("coeffs").items()) {
    // an empty key is the constant term of a 0-form
    const Mask m = key.empty() ? Mask(0) : digits_mask(key, dim);
    if (std::popcount(static_cast<unsigned>(m)) != k || static_cast<int>(key.size()) != k)
      throw std::invalid_argument("multi-index '" + key + "' does not match degree " + std::to_string(k));
    for (std::size_t i = 1; i < key.size(); ++i)
      if (key[i - 1] >= key[i]) throw std::invalid_argument("multi-index '" + key + "' must be increasing");
    f[m] += scalar(val);
  }
  return f;
}

}  // namespace

json form_to_json(const Form<Rational> &f) {
  json coeffs = json::object();
  for (std::size_t i = 0; i < f.size(); ++i)
    if (sgn(f.at(i)) != 0) coeffs[mask_digits(f.mask_at(i))] = f.at(i).get_str();
  return {{"degree", f.degree()}, {"coeffs", coeffs}};
}

json form_to_json(const Form<double> &f) {
  json coeffs = json::object();
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.at(i) != 0.0) coeffs[mask_digits(f.mask_at(i))] = f.at(i);
  return {{"degree", f.degree()}, {"coeffs", coeffs}};
}

bool form_json_is_exact(const json &j) {
  if (!j.is_object() || !j.contains("coeffs")) return false;
  for (const auto &[key, val] : j.at("coeffs").items())
    if (!is_exact_scalar(val)) return false;
  return true;
}

bool structure_json_is_exact(const json &j) {
  for (const auto &[key, val] : j.items())
    if (val.is_object() && val.contains("coeffs") && !form_json_is_exact(val)) return false;
  return true;
}

Rational rational_from_json(const json &j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) return parse_rational_text(j.get<std::string>());
  throw std::invalid_argument("expected an exact rational (integer or \"p/q\" string), got " + j.dump());
}

double float_from_json(const json &j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_rational_text(j.get<std::string>()).get_d();
  throw std::invalid_argument("expected a number, got " + j.dump());
}

Form<Rational> form_from_json_exact(const json &j, int dim) {
  return read_form<Rational>(j, dim, [](const json &v) { return rational_from_json(v); });
}

Form<double> form_from_json_float(const json &j, int dim) {
  return read_form<double>(j, dim, [](const json &v) { return float_from_json(v); });
}

json scalar_to_json(const Rational &x) { return x.get_str(); }
json scalar_to_json(double x) { return x; }

std::vector<Rational> parse_rational_list(const std::string &s) {
  std::vector<Rational> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rational_text(item));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<double> parse_float_list(const std::string &s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception &) {
      throw std::invalid_argument("not a number: '" + item + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw std::invalid_argument("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

json report_to_json(const ValidationReport &r) {
  json checks = json::array();
  for (const auto &c : r.checks) {
    json e = {{"name", c.name}, {"status", c.pass ? "pass" : "fail"}, {"residual", c.residual}};
    if (!c.detail.empty()) e["detail"] = c.detail;
    checks.push_back(e);
  }
  return checks;
}

namespace {

void dump17_rec(const json &j, int indent, int level, std::string &out) {
  const std::string pad = indent < 0 ? "" : std::string(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close = indent < 0 ? "" : std::string(static_cast<std::size_t>(indent * level), ' ');
  const char *nl = indent < 0 ? "" : "\n";
  const char *sep = indent < 0 ? ":" : ": ";
  switch (j.type()) {
    case json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      std::string t = format_double(x);
      if (t.find_first_of(".e") == std::string::npos) t += ".0";
      out += t;
      return;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (const auto &[k, v] : j.items()) {
        if (!first) out += std::string(",") + nl;
        first = false;
        out += pad + json(k).dump() + sep;
        dump17_rec(v, indent, level + 1, out);
      }
      out += nl + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += std::string(",") + nl;
        out += pad;
        dump17_rec(j[i], indent, level + 1, out);
      }
      out += nl + close + "]";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump17(const json &j, int indent) {
  std::string out;
  dump17_rec(j, indent, 0, out);
  return out;
}

std::string digest(const std::string &s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

}  // namespace halfflat
