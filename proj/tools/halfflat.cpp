#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "halfflat/curvature.hpp"
#include "halfflat/examples.hpp"
#include "halfflat/flow.hpp"
#include "halfflat/integrable.hpp"
#include "halfflat/io.hpp"
#include "halfflat/reduction.hpp"
#include "halfflat/search.hpp"
#include "halfflat/stable.hpp"
#include "halfflat/torsion.hpp"

using namespace halfflat;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Outcome {
  ValidationReport checks;
  json data = json::object();
  std::vector<std::string> artifacts;
};

struct Globals {
  bool json_out = false;
  double tol = 1e-8;
  std::uint64_t seed = 7;
  std::string inputs;  // accumulated input text for the digest
};

Globals G;

json load_input(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  G.inputs += ss.str();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error &e) {
    throw UsageError(path + ": " + e.what());
  }
}

LieAlgebra algebra_arg(const std::string &s) {
  try {
    return parse_structure_notation(s);
  } catch (const std::exception &e) {
    throw UsageError(std::string("bad algebra notation: ") + e.what());
  }
}

/// A 2-form on V^5 given inline ("-2*e23", "0") or as a Form JSON file.
Form<Rational> phi_arg(const std::string &s) {
  if (s.size() > 5 && s.substr(s.size() - 5) == ".json") return form_from_json_exact(load_input(s), 5);
  try {
    return parse_form(s, 5, 2);
  } catch (const std::exception &e) {
    throw UsageError(std::string("bad phi: ") + e.what());
  }
}

Rational rational_arg(const std::string &s) {
  const auto v = parse_rational_list(s);
  if (v.size() != 1) throw UsageError("expected one rational, got '" + s + "'");
  return v[0];
}

template <class S>
json scalar_json(const S &x) {
  if constexpr (std::is_same_v<S, Rational>) return scalar_to_json(x);
  else return scalar_to_json(to_double(x));
}

template <class S>
Form<double> as_float(const Form<S> &f) {
  return f.template map<double>([](const S &c) { return to_double(c); });
}

template <class S>
void add_closed(Outcome &o, const LieAlgebra &g, const std::string &name, const Form<S> &f) {
  const Form<S> d = exterior_derivative(g, f);
  const double v = d.max_abs();
  o.checks.add(name, ScalarTraits<S>::exact ? d.is_zero() : v <= G.tol, v);
}

// ---------------------------------------------------------------------------
// algebra

Outcome cmd_algebra(const std::string &action, const std::string &notation, const std::string &file) {
  Outcome o;
  if (action == "catalog") {
    const auto entries = file.empty() ? builtin_catalog() : load_catalog(file);
    json list = json::array();
    for (const auto &e : entries) {
      const auto g = parse_structure_notation(e.notation, e.dim);
      const bool ok = jacobi_check(g).pass;
      o.checks.add("jacobi." + e.name, ok, 0.0);
      list.push_back({{"name", e.name}, {"notation", print_structure_notation(g)}, {"dim", e.dim}});
    }
    o.data["catalog"] = list;
    return o;
  }
  if (notation.empty()) throw UsageError("algebra " + action + " needs a notation");
  const LieAlgebra g = algebra_arg(notation);
  o.data["notation"] = print_structure_notation(g);
  o.data["dim"] = g.dim();
  if (action == "check") {
    const auto j = jacobi_check(g);
    o.checks.add("jacobi", j.pass, 0.0, j.pass ? "" : "fails at generator " + std::to_string(j.generator + 1));
  } else if (action == "center") {
    json basis = json::array();
    for (const auto &v : center(g)) {
      json row = json::array();
      for (const auto &c : v) row.push_back(c.get_str());
      basis.push_back(row);
    }
    o.data["center"] = basis;
  } else {
    throw UsageError("unknown algebra action '" + action + "' (check, center, catalog)");
  }
  return o;
}

// ---------------------------------------------------------------------------
// structure and torsion

template <class S>
Outcome structure_6(const LieAlgebra &g, const json &j, const std::string &expect) {
  Outcome o;
  const auto [omega, psi] = su3_from_json<S>(j);
  o.data["arithmetic"] = ScalarTraits<S>::name;
  o.checks.append(su3_validate(omega, psi, std::nullopt, G.tol), "su3.");
  if (!o.checks.pass()) return o;
  const auto s = make_su3(omega, psi);
  const auto p = su3_predicates(s, g, G.tol);
  o.data["half_flat"] = p.half_flat;
  o.data["symplectic_half_flat"] = p.symplectic_half_flat;
  o.data["integrable"] = p.integrable;
  o.data["lambda"] = scalar_json(s.lambda);
  if (expect == "half_flat") o.checks.add("expect.half_flat", p.half_flat, 0.0);
  if (expect == "shf") o.checks.add("expect.symplectic_half_flat", p.symplectic_half_flat, 0.0);
  if (expect == "integrable") o.checks.add("expect.integrable", p.integrable, 0.0);
  return o;
}

template <class S>
Outcome structure_5(const LieAlgebra &g, const json &j, const std::string &expect) {
  Outcome o;
  const auto [alpha, w] = su2_from_json<S>(j);
  o.data["arithmetic"] = ScalarTraits<S>::name;
  o.checks.append(su2_validate(alpha, w, G.tol), "su2.");
  if (!o.checks.pass()) return o;
  const auto s = make_su2(alpha, w);
  const bool hypo = su2_hypo(s, g, G.tol);
  o.data["hypo"] = hypo;
  json reeb = json::array();
  for (const auto &c : s.reeb) reeb.push_back(scalar_json(c));
  o.data["reeb"] = reeb;
  if (expect == "hypo") o.checks.add("expect.hypo", hypo, 0.0);
  return o;
}

Outcome cmd_structure(const std::string &alg, const std::string &file, const std::string &expect) {
  const LieAlgebra g = algebra_arg(alg);
  const json j = load_input(file);
  const bool exact = structure_json_is_exact(j);
  if (g.dim() == 6) return exact ? structure_6<Rational>(g, j, expect) : structure_6<double>(g, j, expect);
  if (g.dim() == 5) return exact ? structure_5<Rational>(g, j, expect) : structure_5<double>(g, j, expect);
  throw UsageError("structure: algebra must have dimension 5 or 6");
}

template <class S>
Outcome torsion_6(const LieAlgebra &g, const json &j) {
  Outcome o;
  const auto [omega, psi] = su3_from_json<S>(j);
  const auto s = make_su3(omega, psi);
  const auto t = extract_su3_torsion(s, g);
  json table = json::object();
  json nonzero = json::array();
  for (const auto &[name, v] : su3_component_norms(t)) {
    table[name] = v;
    if (v > G.tol) nonzero.push_back(name);
  }
  table["reconstruction_residual"] = t.reconstruction_residual;
  o.data["torsion"] = table;
  o.data["nonzero_components"] = nonzero;
  o.data["W1_consistency"] = t.w1_consistency;
  o.data["W5_consistency"] = t.w5_consistency;
  o.data["W2-"] = form_to_json(as_float(t.W2m));
  o.checks.add("reconstruction", t.reconstruction_residual <= G.tol, t.reconstruction_residual);
  o.checks.add("w1_consistency", t.w1_consistency <= G.tol, t.w1_consistency);
  o.checks.add("w5_consistency", t.w5_consistency <= G.tol, t.w5_consistency);
  return o;
}

template <class S>
Outcome torsion_5(const LieAlgebra &g, const json &j) {
  Outcome o;
  const auto [alpha, w] = su2_from_json<S>(j);
  const auto s = make_su2(alpha, w);
  const auto t = extract_su2_torsion(s, g);
  json table = json::object();
  for (const auto &[name, v] : su2_components(t)) table[name] = v;
  table["reconstruction_residual"] = t.reconstruction_residual;
  o.data["torsion"] = table;
  o.checks.add("reconstruction", t.reconstruction_residual <= G.tol, t.reconstruction_residual);
  o.checks.add("lambda_consistency", t.lambda_consistency <= G.tol, t.lambda_consistency);
  o.checks.add("g_antisymmetry", t.g_antisymmetry <= G.tol, t.g_antisymmetry);
  return o;
}

Outcome cmd_torsion(const std::string &alg, const std::string &file) {
  const LieAlgebra g = algebra_arg(alg);
  const json j = load_input(file);
  const bool exact = structure_json_is_exact(j);
  if (g.dim() == 6) {
    if (exact) {
      try {
        return torsion_6<Rational>(g, j);
      } catch (const NotExact &) {
        // irrational normalisation: fall through to floating point
      }
    }
    return torsion_6<double>(g, j);
  }
  if (g.dim() == 5) return exact ? torsion_5<Rational>(g, j) : torsion_5<double>(g, j);
  throw UsageError("torsion: algebra must have dimension 5 or 6");
}

// ---------------------------------------------------------------------------
// reduction and lift

template <class S>
Outcome reduce_impl(const LieAlgebra &g, const json &j, const Vector<Rational> &x) {
  Outcome o;
  const auto [omega, psi] = su3_from_json<S>(j);
  const auto s = make_su3(omega, psi);
  const auto r = reduce(s, g, x);
  o.data["quotient"] = print_structure_notation(r.data.quotient);
  o.data["t"] = scalar_json(r.data.t);
  o.data["phi"] = form_to_json(r.data.phi);
  o.data["structure"] = su2_to_json(r.su2.alpha, r.su2.omega);
  o.checks.append(su2_validate(r.su2.alpha, r.su2.omega, G.tol), "su2.");
  return o;
}

Outcome cmd_reduce(const std::string &alg, const std::string &file, const std::string &vec) {
  const LieAlgebra g = algebra_arg(alg);
  if (g.dim() != 6) throw UsageError("reduce: algebra must have dimension 6");
  const auto x = parse_rational_list(vec);
  if (x.size() != 6) throw UsageError("reduce: the vector needs 6 entries");
  if (!is_central(g, x)) throw UsageError("reduce: the vector is not central");
  const json j = load_input(file);
  if (structure_json_is_exact(j)) {
    try {
      return reduce_impl<Rational>(g, j, x);
    } catch (const NotExact &) {
    }
  }
  return reduce_impl<double>(g, j, x);
}

template <class S>
Outcome lift_impl(const LieAlgebra &g5, const json &j, const Form<Rational> &phi, const S &t) {
  Outcome o;
  const auto [alpha, w] = su2_from_json<S>(j);
  const auto n = make_su2(alpha, w);
  const auto l = lift(n, g5, phi, t);
  o.data["algebra"] = print_structure_notation(l.algebra);
  o.data["structure"] = su3_to_json(l.su3.omega, l.su3.psi_plus);
  o.checks.append(su3_validate(l.su3.omega, l.su3.psi_plus, std::nullopt, G.tol), "su3.");
  add_closed(o, l.algebra, "d_omega", l.su3.omega);
  add_closed(o, l.algebra, "d_psi_plus", l.su3.psi_plus);
  return o;
}

template <class S>
Outcome gcy_impl(const LieAlgebra &g5, const json &j, const Form<Rational> &phi, const S &t) {
  Outcome o;
  const auto [alpha, w] = su2_from_json<S>(j);
  const auto n = make_su2(alpha, w);
  o.checks = check_gcy_conditions<S>(n, g5, promote_form<S>(phi), t, std::nullopt, G.tol);
  return o;
}

Outcome cmd_lift(const std::string &alg, const std::string &file, const std::string &phi_s, const std::string &t_s,
                 bool gcy) {
  const LieAlgebra g5 = algebra_arg(alg);
  if (g5.dim() != 5) throw UsageError("the base algebra must have dimension 5");
  const Form<Rational> phi = phi_arg(phi_s);
  const json j = load_input(file);
  if (structure_json_is_exact(j)) {
    const Rational t = rational_arg(t_s);
    if (sgn(t) <= 0) throw UsageError("t must be positive");
    return gcy ? gcy_impl<Rational>(g5, j, phi, t) : lift_impl<Rational>(g5, j, phi, t);
  }
  const double t = promote<double>(rational_arg(t_s));
  if (!(t > 0)) throw UsageError("t must be positive");
  return gcy ? gcy_impl<double>(g5, j, phi, t) : lift_impl<double>(g5, j, phi, t);
}

// ---------------------------------------------------------------------------
// integrable lifts, t = (1-x)^-1

Outcome cmd_thm53(const std::string &alg, const std::string &file, int coordinate, const std::string &xs,
                  const std::string &phi_s) {
  Outcome o;
  LieAlgebra g5;
  SU2Structure<Rational> n;
  std::optional<Form<Rational>> expected_phi;
  if (file.empty()) {
    const auto e = hypo_examples()[0];
    g5 = e.algebra().with_coordinate(4);
    n = make_su2(e.alpha, e.omega);
    expected_phi = e.omega[2];
  } else {
    g5 = algebra_arg(alg);
    if (g5.dim() != 5) throw UsageError("thm53: algebra must have dimension 5");
    if (coordinate < 1 || coordinate > 5) throw UsageError("thm53: --coordinate must be in 1..5");
    g5 = g5.with_coordinate(coordinate - 1);
    const json j = load_input(file);
    if (!structure_json_is_exact(j)) throw UsageError("thm53: the structure must be exact");
    const auto [alpha, w] = su2_from_json<Rational>(j);
    n = make_su2(alpha, w);
  }
  if (!phi_s.empty()) expected_phi = phi_arg(phi_s);
  o.data["algebra"] = print_structure_notation(g5);
  json samples = json::array();
  for (const auto &x : parse_rational_list(xs)) {
    if (x == 1) throw UsageError("thm53: x = 1 is a pole of t");
    const std::string pre = "x=" + x.get_str() + ".";
    const auto r = integrability_conditions(n, g5, inverse_linear(x), G.tol);
    o.checks.append(r.checks, pre);
    json s = {{"x", x.get_str()}, {"scalar_condition", r.scalar_residual.get_str()}, {"omega3_condition", form_to_json(r.omega3_residual)}};
    if (r.phi) {
      s["phi"] = form_to_json(*r.phi);
      if (expected_phi) o.checks.add(pre + "recovered_phi", *r.phi == *expected_phi, (*r.phi - *expected_phi).max_abs());
      const auto lift = integrable_lift(n, g5, *r.phi, [](const Jet &y) { return reciprocal(Jet(1.0) - y); },
                                        x.get_d());
      json norms = json::object();
      double worst = 0.0;
      for (const auto &[name, v] : su3_component_norms(lift.torsion)) {
        norms[name] = v;
        worst = std::max(worst, v);
      }
      s["lift_algebra"] = print_structure_notation(lift.algebra);
      s["lift_structure"] = su3_to_json(lift.su3.omega, lift.su3.psi_plus);
      s["lift_torsion"] = norms;
      o.checks.add(pre + "lift_torsion_free", worst <= G.tol, worst);
    } else {
      s["singular"] = r.singular;
      o.checks.add(pre + "recovered_phi", false, 0.0, r.singular);
    }
    samples.push_back(s);
  }
  o.data["samples"] = samples;
  return o;
}

// ---------------------------------------------------------------------------
// flow

json state_json(const FlowState &s) {
  return {{"t", s.t}, {"omega", form_to_json(s.omega)}, {"psiPlus", form_to_json(s.psi_plus)},
          {"orientation", s.orientation}};
}

FlowState state_from_json(const json &j) {
  FlowState s;
  s.t = float_from_json(j.at("t"));
  s.omega = form_from_json_float(j.at("omega"), 6);
  s.psi_plus = form_from_json_float(j.at("psiPlus"), 6);
  s.orientation = j.contains("orientation") ? j.at("orientation").get<int>() : omega_orientation(s.omega);
  return s;
}

Outcome cmd_flow_explicit(double u) {
  Outcome o;
  if (u <= 0 || std::fabs(3 * u * u - 1) < 1e-12) throw UsageError("flow explicit: need u > 0 with 3u^2 != 1");
  const auto s = explicit_state(u);
  o.data["u"] = u;
  o.data["algebra"] = kExplicitFamilyAlgebra;
  o.data["state"] = state_json(s);
  const auto r = explicit_evolution_residuals(u);
  o.checks.add("evolution_psi_plus", r.first <= G.tol, r.first);
  o.checks.add("evolution_omega", r.second <= G.tol, r.second);
  return o;
}

Outcome cmd_flow_run(const std::string &alg, const std::string &file, double t_end, double step,
                     const std::string &out) {
  Outcome o;
  const LieAlgebra g = algebra_arg(alg);
  if (g.dim() != 6) throw UsageError("flow run: algebra must have dimension 6");
  if (!(step > 0)) throw UsageError("flow run: step must be positive");
  const FlowState s0 = state_from_json(load_input(file));
  FlowOptions opt;
  opt.keep_trajectory = !out.empty();
  const auto r = evolve(g, s0, t_end, step, opt);
  o.data["steps"] = r.steps;
  o.data["degenerated"] = r.degenerated;
  if (!r.report.empty()) o.data["report"] = r.report;
  o.data["final_state"] = state_json(r.final_state);
  o.checks.add("half_flat_d_psi_plus", r.max_dpsi_plus <= G.tol, r.max_dpsi_plus);
  o.checks.add("half_flat_d_omega2", r.max_domega2 <= G.tol, r.max_domega2);
  o.checks.add("non_degenerate", !r.degenerated, 0.0);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw UsageError("cannot write " + out);
    for (const auto &s : r.trajectory) f << dump17(state_json(s), -1) << "\n";
    o.artifacts.push_back(out);
  }
  return o;
}

// ---------------------------------------------------------------------------
// curvature and holonomy

void check_u(double u) {
  if (!(u * u > 1.0 / 3.0) || u <= 0) throw UsageError("need u > 1/sqrt(3)");
}

Outcome cmd_curvature(double u) {
  Outcome o;
  check_u(u);
  const auto c = explicit_connection(u);
  const auto r = curvature(c);
  const double ric = ricci(r).max_abs();
  const auto sym = curvature_symmetries(r);
  const auto printed = compare_with_printed(r, u);
  const auto amended = compare_with_printed(r, u, true);
  o.data["u"] = u;
  o.data["ricci_norm"] = ric;
  o.data["max_bianchi_residual"] = sym.bianchi;
  o.data["structure_residual"] = c.structure_residual;
  o.data["scalar_curvature"] = scalar_curvature(r);
  o.data["matches_printed_expression"] = printed.max_unflagged <= 1e-8;
  o.data["printed_sign"] = printed.sign;
  o.data["max_unflagged_difference"] = printed.max_unflagged;
  o.data["worst_unflagged"] = printed.worst_unflagged;
  o.data["max_flagged_difference"] = printed.max_flagged;
  o.data["worst_flagged"] = printed.worst_flagged;
  o.data["amended_max_difference"] = std::max(amended.max_unflagged, amended.max_flagged);
  o.checks.add("ricci_flat", ric <= G.tol, ric);
  o.checks.add("first_bianchi", sym.bianchi <= G.tol, sym.bianchi);
  o.checks.add("structure_equations", c.structure_residual <= G.tol, c.structure_residual);
  return o;
}

Outcome cmd_holonomy(const std::string &samples) {
  Outcome o;
  const auto us = parse_float_list(samples);
  const Form<double> phi = promote_form<double>(standard_g2_form());
  std::vector<Matrix<double>> gens;
  json per = json::array();
  for (double u : us) {
    check_u(u);
    const auto ops = curvature_operators(explicit_curvature(u));
    const auto h = holonomy_span(ops, &phi);
    per.push_back({{"u", u}, {"dim", h.dimension}, {"max_stabilizer_residual", h.max_stabilizer_residual}});
    gens.insert(gens.end(), ops.begin(), ops.end());
  }
  const auto h = holonomy_span(gens, &phi);
  o.data["dim"] = h.dimension;
  o.data["annihilates_g2_form"] = h.in_stabilizer;
  o.data["max_stabilizer_residual"] = h.max_stabilizer_residual;
  o.data["samples"] = per;
  o.checks.add("dimension_14", h.dimension == 14, h.dimension);
  o.checks.add("in_g2", h.in_stabilizer && h.max_stabilizer_residual <= 1e-7, h.max_stabilizer_residual);
  return o;
}

// ---------------------------------------------------------------------------
// search

json search_json(const SearchProblem &p, const SearchResult &r) {
  json log = json::array();
  for (const auto &l : r.log)
    log.push_back({{"restart", l.restart}, {"iterations", l.iterations}, {"residual", l.residual},
                   {"reached_threshold", l.reached_threshold}});
  json out = {{"algebra", print_structure_notation(p.algebra)},
              {"kind", kind_name(p.kind)},
              {"restarts", p.restarts},
              {"seed", p.seed},
              {"threshold", p.threshold},
              {"verdict", r.verdict},
              {"best_residual", r.best_residual},
              {"best_restart", r.best_restart},
              {"log", log}};
  if (r.verdict == "found") {
    const auto &w = r.witness;
    out["witness"] = w.kind == SearchKind::symplectic_half_flat
                         ? su3_to_json(w.omega, w.psi_plus)
                         : json(su2_to_json(w.alpha, w.omega_i));
    if (w.kind == SearchKind::hypo_with_eq4) out["witness"]["phi"] = form_to_json(w.phi);
    out["verification"] = report_to_json(r.verification);
  } else {
    out["note"] = "numerical evidence only; no witness below threshold within the restart budget";
  }
  return out;
}

SearchProblem search_problem(const LieAlgebra &g, const std::string &kind, int restarts, double threshold,
                             int max_iterations) {
  SearchProblem p;
  p.algebra = g;
  if (kind.empty()) {
    if (g.dim() == 6) p.kind = SearchKind::symplectic_half_flat;
    else if (g.dim() == 5) p.kind = SearchKind::hypo_with_eq4;
    else throw UsageError("search: algebra must have dimension 5 or 6");
  } else {
    try {
      p.kind = parse_kind(kind);
    } catch (const std::invalid_argument &e) {
      throw UsageError(e.what());
    }
  }
  if ((p.kind == SearchKind::symplectic_half_flat) != (g.dim() == 6))
    throw UsageError("search: kind " + kind_name(p.kind) + " does not fit a " + std::to_string(g.dim()) +
                     "-dimensional algebra");
  if (restarts < 1) throw UsageError("search: restarts must be positive");
  p.restarts = restarts;
  p.seed = G.seed;
  p.threshold = threshold;
  p.max_iterations = max_iterations;
  return p;
}

void search_checks(Outcome &o, const std::string &prefix, const SearchResult &r, const std::string &expect) {
  if (r.verdict == "found") o.checks.add(prefix + "witness_verified", r.verification.pass(), r.best_residual);
  if (expect == "found") o.checks.add(prefix + "expect_found", r.verdict == "found", r.best_residual);
  if (expect == "not_found")
    o.checks.add(prefix + "expect_not_found", r.verdict != "found" && r.best_residual > 1e-6, r.best_residual);
}

Outcome cmd_search(const std::string &alg, const std::string &kind, int restarts, double threshold, int max_it,
                   const std::string &expect) {
  Outcome o;
  if (alg.empty()) throw UsageError("search needs --algebra (or the catalog subcommand)");
  const auto p = search_problem(algebra_arg(alg), kind, restarts, threshold, max_it);
  const auto r = minimize(p);
  o.data = search_json(p, r);
  search_checks(o, "", r, expect);
  return o;
}

Outcome cmd_search_catalog(const std::string &file, int restarts, double threshold, int max_it) {
  Outcome o;
  const auto entries = file.empty() ? builtin_catalog() : load_catalog(file);
  json results = json::array();
  for (const auto &e : entries) {
    const auto g = parse_structure_notation(e.notation, e.dim);
    if (g.dim() != 5 && g.dim() != 6) continue;
    const auto p = search_problem(g, "", restarts, threshold, max_it);
    const auto r = minimize(p);
    json j = search_json(p, r);
    j["name"] = e.name;
    j.erase("log");
    results.push_back(j);
    search_checks(o, e.name + ".", r, "");
  }
  o.data["results"] = results;
  return o;
}

// ---------------------------------------------------------------------------

int emit(const Outcome &o, const std::vector<std::string> &argv) {
  const bool pass = o.checks.pass();
  if (G.json_out) {
    std::string joined;
    for (const auto &a : argv) joined += a + '\0';
    json report = {{"command", argv},
                   {"inputs_digest", digest(joined + G.inputs)},
                   {"status", pass ? "pass" : "fail"},
                   {"checks", report_to_json(o.checks)},
                   {"data", o.data},
                   {"artifacts", o.artifacts}};
    std::cout << dump17(report) << "\n";
  } else {
    for (const auto &c : o.checks.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  residual=" << format_double(c.residual);
      if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
      std::cout << "\n";
    }
    if (!o.data.empty()) std::cout << dump17(o.data) << "\n";
    for (const auto &a : o.artifacts) std::cout << "wrote " << a << "\n";
    std::cout << (pass ? "status: pass" : "status: fail") << "\n";
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Invariant SU(2), SU(3) and G2 structures on nilpotent Lie algebras"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", G.json_out, "Emit the JSON report on stdout");
  app.add_option("--tol", G.tol, "Tolerance for floating-point checks")->check(CLI::PositiveNumber);
  app.add_option("--seed", G.seed, "Seed for randomized commands");

  std::function<Outcome()> run;

  auto *alg = app.add_subcommand("algebra", "Check an algebra, compute its centre, or list the catalog");
  std::string alg_action, alg_notation, alg_file;
  alg->add_option("action", alg_action, "check | center | catalog")->required();
  alg->add_option("notation", alg_notation, "Structure notation, e.g. \"(0,0,0,12,13,23)\"");
  alg->add_option("--file", alg_file, "Catalog JSON file (catalog action)");
  alg->callback([&] { run = [&] { return cmd_algebra(alg_action, alg_notation, alg_file); }; });

  std::string algebra, structure, expect;
  auto *st = app.add_subcommand("structure", "Validate an SU(3)- or SU(2)-structure from JSON");
  st->add_option("--algebra", algebra)->required();
  st->add_option("--structure", structure, "Structure JSON file")->required();
  st->add_option("--expect", expect, "half_flat | shf | integrable | hypo")
      ->check(CLI::IsMember({"half_flat", "shf", "integrable", "hypo"}));
  st->callback([&] { run = [&] { return cmd_structure(algebra, structure, expect); }; });

  auto *to = app.add_subcommand("torsion", "Intrinsic torsion report");
  to->add_option("--algebra", algebra)->required();
  to->add_option("--structure", structure)->required();
  to->callback([&] { run = [&] { return cmd_torsion(algebra, structure); }; });

  std::string vec;
  auto *re = app.add_subcommand("reduce", "Reduce an SU(3)-structure along a central vector");
  re->add_option("--algebra", algebra)->required();
  re->add_option("--structure", structure)->required();
  re->add_option("--vector", vec, "Central vector, e.g. 0,0,0,1/2,0,0")->required();
  re->callback([&] { run = [&] { return cmd_reduce(algebra, structure, vec); }; });

  std::string phi, t_str = "1";
  auto *li = app.add_subcommand("lift", "Lift an SU(2)-structure to a circle bundle with d eta = phi");
  li->add_option("--algebra", algebra)->required();
  li->add_option("--structure", structure)->required();
  li->add_option("--phi", phi, "2-form (\"-2*e23\") or Form JSON file")->required();
  li->add_option("--t", t_str, "Positive constant t (rational)");
  li->callback([&] { run = [&] { return cmd_lift(algebra, structure, phi, t_str, false); }; });

  auto *gc = app.add_subcommand("check-gcy", "Conditions for the lift to be symplectic half-flat");
  gc->add_option("--algebra", algebra)->required();
  gc->add_option("--structure", structure)->required();
  gc->add_option("--phi", phi)->required();
  gc->add_option("--t", t_str);
  gc->callback([&] { run = [&] { return cmd_lift(algebra, structure, phi, t_str, true); }; });

  int coordinate = 5;
  std::string xs = "0,1/4,1/2";
  auto *th = app.add_subcommand("thm53", "Integrable lifts with t = (1-x)^-1 (default: the abelian example)");
  th->add_option("--algebra", algebra);
  th->add_option("--structure", structure);
  th->add_option("--coordinate", coordinate, "Generator index of the closed coordinate x (1-based)");
  th->add_option("--x", xs, "Comma-separated rational sample points");
  th->add_option("--phi", phi, "Expected phi for the comparison");
  th->callback([&] { run = [&] { return cmd_thm53(algebra, structure, coordinate, xs, phi); }; });

  auto *fl = app.add_subcommand("flow", "Half-flat evolution");
  fl->require_subcommand(1);
  double u = 1.0, t_end = 0.0, step = 1e-3;
  std::string out;
  auto *fe = fl->add_subcommand("explicit", "Closed-form state of the explicit family");
  fe->add_option("--u", u)->required();
  fe->callback([&] { run = [&] { return cmd_flow_explicit(u); }; });
  auto *fr = fl->add_subcommand("run", "Integrate with RK4");
  fr->add_option("--algebra", algebra)->required();
  fr->add_option("--state", structure, "State JSON {t, omega, psiPlus}")->required();
  fr->add_option("--t-end", t_end)->required();
  fr->add_option("--step", step);
  fr->add_option("--out", out, "JSON-lines trajectory file");
  fr->callback([&] { run = [&] { return cmd_flow_run(algebra, structure, t_end, step, out); }; });

  auto *cu = app.add_subcommand("curvature", "Curvature of the 7-dimensional metric");
  cu->add_option("--u", u)->required();
  cu->callback([&] { run = [&] { return cmd_curvature(u); }; });

  std::string samples = "1.0,1.2";
  auto *ho = app.add_subcommand("holonomy", "Span of curvature operators");
  ho->add_option("--samples", samples);
  ho->callback([&] { run = [&] { return cmd_holonomy(samples); }; });

  std::string kind, file;
  int restarts = 100, max_it = 400;
  double threshold = 1e-10;
  auto *se = app.add_subcommand("search", "Numerical structure search");
  se->add_option("--algebra", algebra);
  se->add_option("--kind", kind, "shf | hypo_with_eq4 (default by dimension)");
  se->add_option("--restarts", restarts);
  se->add_option("--threshold", threshold);
  se->add_option("--max-iterations", max_it);
  se->add_option("--expect", expect, "found | not_found")->check(CLI::IsMember({"found", "not_found"}));
  auto *sc = se->add_subcommand("catalog", "Search every 5- and 6-dimensional catalog entry");
  sc->add_option("--file", file, "Catalog JSON file (default: built-in catalog)");
  se->callback([&] {
    if (!sc->parsed()) run = [&] { return cmd_search(algebra, kind, restarts, threshold, max_it, expect); };
  });
  sc->callback([&] { run = [&] { return cmd_search_catalog(file, restarts, threshold, max_it); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : 2;
  }
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (!run) throw UsageError("no command");
    return emit(run(), args);
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    Outcome o;
    o.checks.add("error", false, 0.0, e.what());
    return emit(o, args);
  }
}
