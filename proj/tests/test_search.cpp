#include <doctest.h>

#include <cmath>
#include <random>

#include "halfflat/examples.hpp"
#include "halfflat/search.hpp"
#include "halfflat/stable.hpp"

using namespace halfflat;

namespace {
SearchProblem shf_problem(const char *notation) {
  SearchProblem p;
  p.algebra = parse_structure_notation(notation);
  p.kind = SearchKind::symplectic_half_flat;
  return p;
}

std::vector<double> shf_point(const Form<double> &omega, const Form<double> &psi) {
  SearchWitness w;
  w.kind = SearchKind::symplectic_half_flat;
  w.omega = omega;
  w.psi_plus = psi;
  return pack(w);
}

std::vector<double> explicit_point(double u) {
  const auto [omega, psi] = explicit_family(u);
  return shf_point(omega, psi);
}

double block_norm(const std::vector<double> &r, SearchKind k, const std::string &name) {
  std::size_t pos = 0;
  for (const auto &[n, c] : residual_blocks(k)) {
    if (n == name) {
      double s = 0;
      for (int i = 0; i < c; ++i) s += r[pos + i] * r[pos + i];
      return std::sqrt(s);
    }
    pos += c;
  }
  throw std::invalid_argument("no block " + name);
}

double norm(const std::vector<double> &r) {
  double s = 0;
  for (double v : r) s += v * v;
  return std::sqrt(s);
}
}  // namespace

TEST_CASE("block layout matches the residual length") {
  for (auto k : {SearchKind::symplectic_half_flat, SearchKind::hypo_with_eq4}) {
    int total = 0;
    for (const auto &b : residual_blocks(k)) total += b.second;
    SearchProblem p;
    p.kind = k;
    p.algebra = parse_structure_notation(k == SearchKind::symplectic_half_flat ? "(0,0,0,0,0,0)" : "(0,0,0,0,0)");
    CHECK(static_cast<int>(residual_vector(random_start(p, 0), p).size()) == total);
  }
  CHECK(parse_kind("shf") == SearchKind::symplectic_half_flat);
  CHECK(parse_kind("hypo_with_eq4") == SearchKind::hypo_with_eq4);
  CHECK_THROWS_AS(parse_kind("g2"), std::invalid_argument);
}

TEST_CASE("residual vanishes on known structures") {
  const auto p = shf_problem(kExplicitFamilyAlgebra);
  CHECK(norm(residual_vector(explicit_point(1.0), p)) < 1e-12);
  const auto flat = shf_problem("(0,0,0,0,0,0)");
  const auto x = shf_point(promote_form<double>(parse_form("e14+e25+e36", 6, 2)),
                           promote_form<double>(parse_form("e123-e156-e426-e453", 6, 3)));
  CHECK(norm(residual_vector(x, flat)) == 0.0);
}

TEST_CASE("off the symplectic value only d omega is nonzero") {
  // d omega = 3(u^2-1)/u e^123, so 9/2 at u = 2
  const auto p = shf_problem(kExplicitFamilyAlgebra);
  const auto r = residual_vector(explicit_point(2.0), p);
  CHECK(block_norm(r, p.kind, "d_omega") == doctest::Approx(4.5).epsilon(1e-13));
  CHECK(norm(r) == doctest::Approx(4.5).epsilon(1e-13));
}

TEST_CASE("homothety gauge") {
  const auto p = shf_problem(kExplicitFamilyAlgebra);
  auto x = explicit_point(1.0);
  // omega^3 = 12 e^123456 at u = 1
  const double c = 1.3;
  for (int i = 0; i < 15; ++i) x[i] *= c * c;
  for (int i = 15; i < 35; ++i) x[i] *= c * c * c;
  CHECK(norm(residual_vector(x, p)) < 1e-12);
  REQUIRE(normalize_scale(x, p.kind));
  CHECK(std::fabs(top_coefficient(power(unpack(x, p.kind).omega, 3))) == doctest::Approx(6.0).epsilon(1e-13));
  CHECK(norm(residual_vector(x, p)) < 1e-12);
  std::vector<double> zero(35, 0.0);
  CHECK_FALSE(normalize_scale(zero, p.kind));
}

TEST_CASE("barriers act on unstable and degenerate data") {
  const auto p = shf_problem("(0,0,0,0,0,0)");
  // lambda >= 0 for a decomposable 3-form
  const auto x = shf_point(promote_form<double>(parse_form("e14+e25+e36", 6, 2)),
                           promote_form<double>(parse_form("e123", 6, 3)));
  const auto r = residual_vector(x, p);
  CHECK(block_norm(r, p.kind, "lambda_barrier") == doctest::Approx(p.lambda_margin));
  // a squashed torus metric leaves the eigenvalue box
  const auto y = shf_point(promote_form<double>(parse_form("1000*e14+e25+e36", 6, 2)),
                           promote_form<double>(parse_form("1000*e123-e156-1000*e426-1000*e453", 6, 3)));
  CHECK(block_norm(residual_vector(y, p), p.kind, "eigen_upper") > 1.0);
}

TEST_CASE("hypo residual vanishes on the listed five-dimensional examples") {
  for (const auto &e : hypo_examples()) {
    CAPTURE(e.name);
    SearchProblem p;
    p.algebra = e.algebra();
    p.kind = SearchKind::hypo_with_eq4;
    const auto s = make_su2(promote_form<double>(e.alpha),
                            {promote_form<double>(e.omega[0]), promote_form<double>(e.omega[1]),
                             promote_form<double>(e.omega[2])});
    SearchWitness w;
    w.kind = p.kind;
    w.coframe = adapted_coframe(s);
    w.phi = promote_form<double>(e.phi);
    const auto x = pack(w);
    CHECK(norm(residual_vector(x, p)) < 1e-12);
    const auto back = unpack(x, p.kind);
    CHECK((back.alpha - s.alpha).max_abs() < 1e-12);
    for (int i = 0; i < 3; ++i) CHECK((back.omega_i[i] - s.omega[i]).max_abs() < 1e-12);
    // a wrong phi breaks the lift conditions
    auto y = x;
    y[25] += 0.5;
    CHECK(norm(residual_vector(y, p)) > 0.1);
  }
}

TEST_CASE("forward-mode derivative agrees with the central-difference Jacobian") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-1, 1);
  struct Case {
    const char *notation;
    SearchKind kind;
  };
  for (const auto &cs : {Case{"(0,0,0,12,13,23)", SearchKind::symplectic_half_flat},
                         Case{"(0,0,0,0,12,13)", SearchKind::symplectic_half_flat},
                         Case{"(0,0,0,12,13)", SearchKind::hypo_with_eq4},
                         Case{"(0,0,0,0,12)", SearchKind::hypo_with_eq4}}) {
    CAPTURE(cs.notation);
    SearchProblem p;
    p.algebra = parse_structure_notation(cs.notation);
    p.kind = cs.kind;
    for (int k = 0; k < 5; ++k) {
      auto x = random_start(p, k);
      normalize_scale(x, p.kind);
      const Matrix<double> jac = numerical_jacobian(x, p);
      std::vector<double> dir(x.size());
      for (auto &v : dir) v = dist(rng);
      std::vector<Jet> xj(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) xj[i] = Jet(x[i], dir[i], 0.0);
      const auto rj = residual_vector(xj, p);
      double scale = 0, err = 0;
      for (std::size_t i = 0; i < rj.size(); ++i) {
        double fd = 0;
        for (std::size_t j = 0; j < x.size(); ++j) fd += jac(i, j) * dir[j];
        scale = std::max(scale, std::fabs(rj[i].d1));
        err = std::max(err, std::fabs(rj[i].d1 - fd));
      }
      CHECK(err <= 1e-5 * scale);
    }
  }
}

TEST_CASE("random starts are reproducible and admissible") {
  const auto p = shf_problem("(0,0,0,12,13,23)");
  CHECK(random_start(p, 4) == random_start(p, 4));
  CHECK(random_start(p, 4) != random_start(p, 5));
  for (int k = 0; k < 20; ++k) {
    const auto w = unpack(random_start(p, k), p.kind);
    const double top = top_coefficient(power(w.omega, 3));
    CHECK(std::fabs(top) >= 0.1);
    CHECK(hitchin_invariant(w.psi_plus, top < 0 ? -1.0 : 1.0).lambda < -0.1);
  }
}

TEST_CASE("Levenberg-Marquardt converges from a perturbed solution") {
  const auto p = shf_problem(kExplicitFamilyAlgebra);
  auto x = explicit_point(1.0);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1e-2, 1e-2);
  for (auto &v : x) v += dist(rng);
  const auto r = levenberg_marquardt(x, p);
  CHECK(r.residual < 1e-12);
  CHECK(verify_witness(p.algebra, unpack(r.x, p.kind)).pass());
}

TEST_CASE("minimize finds the flat structure and is deterministic") {
  auto p = shf_problem("(0,0,0,0,0,0)");
  p.restarts = 12;
  const auto a = minimize(p);
  const auto b = minimize(p);
  CHECK(a.verdict == "found");
  CHECK_FALSE(a.evidence_only);
  CHECK(a.best_residual < 1e-10);
  CHECK(a.verification.pass());
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) CHECK(a.log[i].residual == b.log[i].residual);
  CHECK(a.witness.x == b.witness.x);
}

TEST_CASE("minimize on a five-dimensional algebra gives a hypo witness") {
  SearchProblem p;
  p.algebra = parse_structure_notation("(0,0,0,0,12)");
  p.kind = SearchKind::hypo_with_eq4;
  p.restarts = 30;
  p.stop_at_first = true;
  const auto r = minimize(p);
  REQUIRE(r.verdict == "found");
  CHECK(r.log.back().reached_threshold);
  CHECK(su2_validate(r.witness.alpha, r.witness.omega_i, 1e-8).pass());
  CHECK(r.verification.find("lift.const_t_d_omega3")->residual < 1e-9);
}

TEST_CASE("no witness on (0,0,0,0,0,12) with a small budget") {
  auto p = shf_problem("(0,0,0,0,0,12)");
  p.restarts = 10;
  const auto r = minimize(p);
  CHECK(r.verdict == "not_found_below_threshold");
  CHECK(r.evidence_only);
  CHECK(r.best_residual > 1e-6);
}

TEST_CASE("witness verification is independent of the residual") {
  const LieAlgebra g = parse_structure_notation(kExplicitFamilyAlgebra);
  CHECK(verify_witness(g, unpack(explicit_point(1.0), SearchKind::symplectic_half_flat)).pass());
  const auto bad = verify_witness(g, unpack(explicit_point(1.1), SearchKind::symplectic_half_flat));
  CHECK_FALSE(bad.pass());
  CHECK_FALSE(bad.find("d_omega")->pass);
}

TEST_CASE("dimension mismatch is rejected") {
  SearchProblem p;
  p.algebra = parse_structure_notation("(0,0,0,0,0)");
  p.kind = SearchKind::symplectic_half_flat;
  CHECK_THROWS_AS(residual_vector(std::vector<double>(35, 0.0), p), std::invalid_argument);
  p.algebra = parse_structure_notation("(0,0,0,0,0,0)");
  CHECK_THROWS_AS(residual_vector(std::vector<double>(34, 0.0), p), std::invalid_argument);
}

TEST_CASE("listed examples verify exactly") {
  const auto r = verify_listed_examples();
  CHECK(r.checks.size() > 20);
  for (const auto &c : r.checks) {
    CAPTURE(c.name);
    CHECK(c.pass);
  }
}
