#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "../tests/properties.hpp"
#include "halfflat/curvature.hpp"
#include "halfflat/examples.hpp"
#include "halfflat/flow.hpp"
#include "halfflat/integrable.hpp"
#include "halfflat/reduction.hpp"
#include "halfflat/search.hpp"
#include "halfflat/torsion.hpp"

using namespace halfflat;

namespace {

// Pinned tolerances and budgets.
constexpr double kC1Seconds = 1.0;
constexpr double kC2Residual = 1e-12;
constexpr double kC3Step = 1e-3;
constexpr double kC3Match = 1e-6;
constexpr double kC3HalfFlat = 1e-8;
constexpr double kC3Seconds = 10.0;
constexpr double kC4Ricci = 1e-8;
constexpr double kC4Stabilizer = 1e-7;
constexpr double kC4Reference = 1e-8;
constexpr double kC4Seconds = 30.0;
constexpr double kC5Zero = 1e-10;
constexpr double kC5NonZero = 1e-3;
constexpr double kC5Reconstruction = 1e-9;
constexpr double kC6Match = 1e-8;
constexpr int kC6RandomLifts = 20;
constexpr double kC7Residual = 1e-12;
constexpr double kC7Torsion = 1e-8;
constexpr int kC8Restarts = 100;
constexpr double kC8Found = 1e-10;
constexpr double kC8NotFound = 1e-6;
constexpr double kC8Seconds = 300.0;
constexpr int kC9Cases = 1000;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

class Criterion {
public:
  explicit Criterion(int n) : n_(n), start_(std::chrono::steady_clock::now()) {}

  void require(bool ok, const std::string &line) {
    pass_ = pass_ && ok;
    detail_ << "    " << (ok ? "ok   " : "FAIL ") << line << "\n";
  }
  void note(const std::string &line) { detail_ << "    info " << line << "\n"; }
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  bool finish(const std::string &summary) {
    std::cout << "criterion " << n_ << ": " << (pass_ ? "PASS" : "FAIL") << "  " << summary << "  ("
              << fmt(seconds()) << " s)\n"
              << detail_.str() << std::flush;
    return pass_;
  }

private:
  int n_;
  bool pass_ = true;
  std::ostringstream detail_;
  std::chrono::steady_clock::time_point start_;
};

bool criterion1() {
  Criterion c(1);
  const auto r = verify_listed_examples();
  int failed = 0;
  for (const auto &ch : r.checks)
    if (!ch.pass) {
      ++failed;
      c.require(false, ch.name + " residual " + fmt(ch.residual));
    }
  c.require(failed == 0, std::to_string(r.checks.size()) + " exact checks on the four examples and their t = 1 lifts");
  c.require(c.seconds() < kC1Seconds, "runtime " + fmt(c.seconds()) + " s < " + fmt(kC1Seconds) + " s");
  return c.finish("listed 5-dimensional examples and lifts, exact");
}

bool criterion2() {
  Criterion c(2);
  for (double u : {0.8, 0.9, 1.0, 1.1, 1.5}) {
    const auto [dpsi, dw2] = explicit_evolution_residuals(u);
    c.require(dpsi < kC2Residual, "u = " + fmt(u) + ": |d psi+/dt - d omega| = " + fmt(dpsi));
    c.note("u = " + fmt(u) + ": |d psi-/dt + (1/2) d omega^2/dt| = " + fmt(dw2));
  }
  return c.finish("d psi+/dt = d omega along the explicit family, tol " + fmt(kC2Residual));
}

bool criterion3() {
  Criterion c(3);
  const LieAlgebra g = parse_structure_notation(kExplicitFamilyAlgebra);
  const auto res = evolve(g, explicit_state(1.0), explicit_time(0.8), kC3Step);
  const auto ref = explicit_state(0.8);
  const double dw = (res.final_state.omega - ref.omega).max_abs();
  const double dp = (res.final_state.psi_plus - ref.psi_plus).max_abs();
  c.require(!res.degenerated, "no degeneration in " + std::to_string(res.steps) + " steps");
  c.require(dw < kC3Match, "omega error at u = 0.8: " + fmt(dw));
  c.require(dp < kC3Match, "psi+ error at u = 0.8: " + fmt(dp));
  c.require(res.max_dpsi_plus < kC3HalfFlat, "max |d psi+| along the path: " + fmt(res.max_dpsi_plus));
  c.require(res.max_domega2 < kC3HalfFlat, "max |d omega^2| along the path: " + fmt(res.max_domega2));
  c.require(c.seconds() < kC3Seconds, "runtime " + fmt(c.seconds()) + " s < " + fmt(kC3Seconds) + " s");
  return c.finish("RK4, step " + fmt(kC3Step) + ", u = 1 to u = 0.8");
}

bool criterion4() {
  Criterion c(4);
  const Form<double> phi = promote_form<double>(standard_g2_form());
  for (double u : {1.0, 1.2}) {
    const std::string at = "u = " + fmt(u) + ": ";
    // the assembled G2 form is the standard one in the orthonormal coframe
    const auto d = assemble_g2_explicit(u);
    std::vector<std::vector<Jet>> rows;
    for (const auto &f : explicit_orthonormal_coframe(Jet::variable(u))) rows.push_back(f.coefficients());
    const double align =
        (jet_component(substitute(promote_form<Jet>(standard_g2_form()), rows), 0) - jet_component(d.phi, 0))
            .max_abs();
    c.require(align < 1e-12, at + "assembled phi equals the standard form in the coframe: " + fmt(align));
    const auto r = explicit_curvature(u);
    const double ric = ricci(r).max_abs();
    c.require(ric < kC4Ricci, at + "Ricci " + fmt(ric));
    const auto h = holonomy_span(curvature_operators(r), &phi);
    c.require(h.dimension == 14, at + "Ambrose-Singer span dimension " + std::to_string(h.dimension));
    c.require(h.in_stabilizer && h.max_stabilizer_residual < kC4Stabilizer,
              at + "span annihilates phi, residual " + fmt(h.max_stabilizer_residual));
    const auto printed = compare_with_printed(r, u);
    c.require(printed.max_unflagged < kC4Reference, at + "printed curvature, unflagged terms: max difference " +
                                                       fmt(printed.max_unflagged) + " at " +
                                                       printed.worst_unflagged + " (overall sign " +
                                                       std::to_string(printed.sign) + ")");
    c.note(at + "printed curvature, flagged terms (not gated): max difference " + fmt(printed.max_flagged) +
           (printed.worst_flagged.empty() ? "" : " at " + printed.worst_flagged));
    const auto amended = compare_with_printed(r, u, true);
    c.note(at + "printed curvature with the omitted (E25-E36)^2 term restored: max difference " +
           fmt(std::max(amended.max_unflagged, amended.max_flagged)));
  }
  c.require(c.seconds() < kC4Seconds, "runtime " + fmt(c.seconds()) + " s < " + fmt(kC4Seconds) + " s");
  return c.finish("curvature and holonomy of the 7-dimensional metric");
}

/// Component norms and reconstruction residual, exact when the structure allows.
std::pair<std::vector<std::pair<std::string, double>>, double> su3_torsion_norms(const SU3Structure<Rational> &s,
                                                                                const LieAlgebra &g) {
  try {
    const auto t = extract_su3_torsion(s, g);
    return {su3_component_norms(t), t.reconstruction_residual};
  } catch (const NotExact &) {
    const auto t =
        extract_su3_torsion(make_su3(promote_form<double>(s.omega), promote_form<double>(s.psi_plus)), g);
    return {su3_component_norms(t), t.reconstruction_residual};
  }
}

bool criterion5() {
  Criterion c(5);
  struct Case {
    std::string label;
    LieAlgebra algebra;
    SU3Structure<Rational> su3;
  };
  std::vector<Case> cases;
  {
    const auto [omega, psi] = explicit_family(Rational(1));
    cases.push_back({"(0,0,0,12,13,23), explicit family at u = 1",
                     parse_structure_notation(kExplicitFamilyAlgebra), make_su3(omega, psi)});
  }
  for (const auto &ex : hypo_examples()) {
    if (ex.name != "abelian" && ex.name != "h3-r2") continue;
    const auto l = lift(make_su2(ex.alpha, ex.omega), ex.algebra(), ex.phi, Rational(1));
    cases.push_back({l.algebra.notation() + ", lift of the " + ex.name + " example", l.algebra, l.su3});
  }
  for (const auto &cs : cases) {
    const auto [norms, reconstruction] = su3_torsion_norms(cs.su3, cs.algebra);
    double others = 0, w2m = 0;
    for (const auto &[name, v] : norms) {
      if (name == "W2-") w2m = v;
      else others = std::max(others, v);
    }
    c.require(others < kC5Zero, cs.label + ": max of the other components " + fmt(others));
    c.require(w2m > kC5NonZero, cs.label + ": |W2-| = " + fmt(w2m));
    c.require(reconstruction < kC5Reconstruction, cs.label + ": reconstruction residual " + fmt(reconstruction));
  }
  return c.finish("torsion concentrated in W2- on the three algebras carrying symplectic half-flat structures");
}

bool criterion6() {
  Criterion c(6);
  {
    const auto g = parse_structure_notation(kExplicitFamilyAlgebra);
    const auto [omega, psi] = explicit_family(Rational(1));
    const auto s = make_su3(omega, psi);
    Vector<Rational> x(6, Rational(0));
    x[3] = Rational(1, 2);
    const auto red = reduce(s, g, x);
    const auto table = quotient_torsion_table(extract_su3_torsion(s, g), red.data, red.su2);
    const auto direct = extract_su2_torsion(red.su2, red.data.quotient);
    const auto [diff, worst] = torsion_table_difference(table, direct);
    c.require(diff < kC6Match, "explicit family at u = 1 along e4/2: max difference " + fmt(diff) +
                                   (worst.empty() ? "" : " at " + worst));
  }
  std::mt19937 rng(2024);
  Vector<Rational> x(6, Rational(0));
  x[5] = 1;
  double worst_diff = 0;
  std::string worst_name;
  for (int trial = 0; trial < kC6RandomLifts; ++trial) {
    const auto h = testgen::random_hypo(rng);
    const Rational t = abs(testgen::random_rational(rng, 3, 4)) + Rational(1, 5);
    const auto n = make_su2(promote_form<double>(h.alpha),
                            {promote_form<double>(h.omega[0]), promote_form<double>(h.omega[1]),
                             promote_form<double>(h.omega[2])});
    const auto l = lift(n, h.g5, h.phi, t.get_d());
    const auto red = reduce(l.su3, l.algebra, x);
    const auto table = quotient_torsion_table(extract_su3_torsion(l.su3, l.algebra), red.data, red.su2);
    const auto [diff, worst] = torsion_table_difference(table, extract_su2_torsion(red.su2, red.data.quotient));
    if (diff >= worst_diff) {
      worst_diff = diff;
      worst_name = worst;
    }
  }
  c.require(worst_diff < kC6Match, std::to_string(kC6RandomLifts) +
                                       " random rational hypo lifts, closed phi, constant t: max difference " +
                                       fmt(worst_diff) + (worst_name.empty() ? "" : " at " + worst_name));
  return c.finish("quotient torsion table against the direct SU(2) torsion, tol " + fmt(kC6Match));
}

bool criterion7() {
  Criterion c(7);
  const auto ex = hypo_examples()[0];
  const LieAlgebra g5 = ex.algebra().with_coordinate(4);
  const auto n = make_su2(ex.alpha, ex.omega);
  for (const Rational x : {Rational(0), Rational(1, 4), Rational(1, 2)}) {
    const std::string at = "x = " + x.get_str() + ": ";
    const auto r = integrability_conditions(n, g5, inverse_linear(x));
    const double s = std::fabs(r.scalar_residual.get_d());
    const double w = r.omega3_residual.max_abs();
    c.require(s < kC7Residual, at + "scalar condition residual " + fmt(s));
    c.require(w < kC7Residual, at + "d omega_3 condition residual " + fmt(w));
    c.require(r.phi && *r.phi == n.omega[2], at + "recovered phi equals omega_3 exactly");
    const auto l = build_final_example(n, g5, x.get_d());
    double worst = 0;
    for (const auto &[name, v] : su3_component_norms(l.torsion)) worst = std::max(worst, v);
    c.require(worst < kC7Torsion, at + "max SU(3) torsion component " + fmt(worst));
  }
  return c.finish("integrable lift with t = (1-x)^-1 on the abelian example");
}

bool criterion8() {
  Criterion c(8);
  struct Case {
    const char *notation;
    SearchKind kind;
    bool expect_found;
  };
  const Case cases[] = {{"(0,0,0,0,0,0)", SearchKind::symplectic_half_flat, true},
                        {"(0,0,0,0,12,13)", SearchKind::symplectic_half_flat, true},
                        {"(0,0,0,12,13,23)", SearchKind::symplectic_half_flat, true},
                        {"(0,0,0,0,0)", SearchKind::hypo_with_eq4, true},
                        {"(0,0,0,0,12)", SearchKind::hypo_with_eq4, true},
                        {"(0,0,0,12,13)", SearchKind::hypo_with_eq4, true},
                        {"(0,0,0,0,0,12)", SearchKind::symplectic_half_flat, false}};
  for (const auto &cs : cases) {
    SearchProblem p;
    p.algebra = parse_structure_notation(cs.notation);
    p.kind = cs.kind;
    p.restarts = kC8Restarts;
    p.threshold = kC8Found;
    const auto r = minimize(p);
    int hits = 0;
    for (const auto &l : r.log) hits += l.reached_threshold;
    const std::string line = std::string(cs.notation) + " " + kind_name(cs.kind) + ": best residual " +
                             fmt(r.best_residual) + ", " + std::to_string(hits) + "/" + std::to_string(kC8Restarts) +
                             " restarts below " + fmt(kC8Found);
    if (cs.expect_found)
      c.require(r.verdict == "found" && r.best_residual < kC8Found && r.verification.pass(),
                line + ", witness re-validated");
    else
      c.require(r.verdict != "found" && r.best_residual > kC8NotFound,
                line + " (no witness below " + fmt(kC8NotFound) + "; numerical evidence, not proof)");
  }
  c.require(c.seconds() < kC8Seconds, "runtime " + fmt(c.seconds()) + " s < " + fmt(kC8Seconds) + " s");
  return c.finish("seeded search, " + std::to_string(kC8Restarts) + " restarts per algebra");
}

bool criterion9() {
  Criterion c(9);
  using namespace testgen;
  const std::pair<const char *, std::function<int()>> props[] = {
      {"d^2 = 0", [] { return d_squared_failures(kC9Cases, 101); }},
      {"Leibniz", [] { return leibniz_failures(kC9Cases, 102); }},
      {"Hodge", [] { return hodge_failures(kC9Cases, 103); }},
      {"K^2 = lambda Id", [] { return k_squared_failures(kC9Cases, 104); }},
      {"Lefschetz round trip", [] { return lefschetz_failures(kC9Cases, 105); }},
      {"reduce after lift", [] { return reduce_lift_failures(kC9Cases, 106); }}};
  for (const auto &[name, run] : props) {
    const int failures = run();
    c.require(failures == 0, std::string(name) + ": " + std::to_string(failures) + " failures in " +
                                 std::to_string(kC9Cases) + " exact cases");
  }
  return c.finish("property suites");
}

}  // namespace

int main() {
  const std::function<bool()> criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                            criterion6, criterion7, criterion8, criterion9};
  int failed = 0;
  for (const auto &run : criteria) {
    try {
      failed += !run();
    } catch (const std::exception &e) {
      std::cout << "    error: " << e.what() << "\n";
      ++failed;
    }
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << "\n";
  return failed ? 1 : 0;
}
