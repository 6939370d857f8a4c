#include "halfflat/search.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <tuple>

#include "halfflat/examples.hpp"
#include "halfflat/reduction.hpp"
#include "halfflat/stable.hpp"

namespace halfflat {

std::string kind_name(SearchKind k) {
  return k == SearchKind::symplectic_half_flat ? "shf" : "hypo_with_eq4";
}

SearchKind parse_kind(const std::string &s) {
  if (s == "shf" || s == "symplectic_half_flat") return SearchKind::symplectic_half_flat;
  if (s == "hypo" || s == "hypo_with_eq4") return SearchKind::hypo_with_eq4;
  throw std::invalid_argument("unknown search kind '" + s + "' (expected shf or hypo_with_eq4)");
}

int unknown_count(SearchKind) { return 35; }

std::vector<std::pair<std::string, int>> residual_blocks(SearchKind k) {
  if (k == SearchKind::symplectic_half_flat)
    return {{"d_omega", 20},         {"d_psi_plus", 15},   {"psi_plus_wedge_omega", 6},
            {"normalization", 1},    {"lambda_barrier", 1}, {"eigen_lower", 6},
            {"eigen_upper", 6},      {"volume", 1}};
  return {{"d_alpha", 10},     {"d_omega1", 10},   {"const_t_d_omega3", 10}, {"const_t_d_omega2_alpha", 5},
          {"d_phi", 10},       {"eigen_lower", 5},  {"eigen_upper", 5}};
}

namespace {

template <class S>
Form<S> slice_form(const std::vector<S> &x, std::size_t &pos, int n, int k) {
  Form<S> f(n, k);
  for (std::size_t i = 0; i < f.size(); ++i) f.at(i) = x[pos++];
  return f;
}

template <class S>
void push(std::vector<S> &out, const Form<S> &f) {
  out.insert(out.end(), f.coefficients().begin(), f.coefficients().end());
}

template <class S>
S hinge(const S &x) {
  return to_double(x) > 0.0 ? x : S(0);
}

/// Eigenvalues of a symmetric matrix; for jets the first derivative is
/// v^T G' v for the unit eigenvector v (simple eigenvalues).
template <class S>
std::vector<S> symmetric_eigenvalues(const Matrix<S> &g) {
  const int n = static_cast<int>(g.rows());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = 0.5 * (to_double(g(i, j)) + to_double(g(j, i)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  std::vector<S> out(n);
  for (int a = 0; a < n; ++a) {
    if constexpr (std::is_same_v<S, Jet>) {
      const Eigen::VectorXd v = es.eigenvectors().col(a);
      double d = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d += v(i) * 0.5 * (g(i, j).d1 + g(j, i).d1) * v(j);
      out[a] = Jet(es.eigenvalues()(a), d, std::numeric_limits<double>::quiet_NaN());
    } else {
      out[a] = S(es.eigenvalues()(a));
    }
  }
  return out;
}

template <class S>
void push_eigen_box(std::vector<S> &out, const std::vector<S> &mu, const SearchProblem &p) {
  for (const auto &m : mu) out.push_back(hinge(S(p.eigen_min) - m));
  for (const auto &m : mu) out.push_back(hinge(m - S(p.eigen_max)));
}

template <class S>
S abs_value(const S &x) {
  return to_double(x) < 0.0 ? S(0) - x : x;
}

template <class S>
std::vector<S> shf_residual(const std::vector<S> &x, const SearchProblem &p) {
  const LieAlgebra &g = p.algebra;
  std::size_t pos = 0;
  const Form<S> omega = slice_form(x, pos, 6, 2);
  const Form<S> psi = slice_form(x, pos, 6, 3);
  std::vector<S> out;
  out.reserve(56);
  push(out, exterior_derivative(g, omega));
  push(out, exterior_derivative(g, psi));
  push(out, wedge(psi, omega));
  const Form<S> w3 = power(omega, 3);
  const S top = top_coefficient(w3);
  const int orient = sign_of(top) < 0 ? -1 : 1;
  const auto h = hitchin_invariant(psi, S(orient));
  const S barrier = hinge(h.lambda + S(p.lambda_margin));
  if (!(to_double(h.lambda) < 0.0)) {
    out.push_back(S(0));
    out.push_back(barrier);
    out.insert(out.end(), 13, S(0));
    return out;
  }
  const S root = sqrt_scalar(S(0) - h.lambda);
  const Matrix<S> J = h.K * (S(-1) / root);
  const Form<S> psi_minus = psi_minus_from_J(psi, J);
  out.push_back(top_coefficient(wedge(psi, psi_minus)) - top * promote<S>(kNormalization));
  out.push_back(barrier);
  const Matrix<S> metric = two_form_matrix(omega) * J;
  push_eigen_box(out, symmetric_eigenvalues(metric), p);
  const S det = determinant(metric);
  out.push_back(to_double(det) > 0.0 ? abs_value(top) / sqrt_scalar(det) - S(6) : S(0));
  return out;
}

template <class S>
std::vector<Form<S>> slice_coframe(const std::vector<S> &x, std::size_t &pos) {
  std::vector<Form<S>> e;
  for (int a = 0; a < 5; ++a) e.push_back(slice_form(x, pos, 5, 1));
  return e;
}

template <class S>
std::vector<S> hypo_residual(const std::vector<S> &x, const SearchProblem &p) {
  const LieAlgebra &g = p.algebra;
  std::size_t pos = 0;
  const auto e = slice_coframe(x, pos);
  const auto [alpha, w] = su2_model_forms(e);
  const Form<S> phi = slice_form(x, pos, 5, 2);
  auto d = [&](const Form<S> &f) { return exterior_derivative(g, f); };
  std::vector<S> out;
  out.reserve(60);
  push(out, d(alpha));
  push(out, d(w[0]));
  push(out, d(w[2]) + wedge(phi, alpha));
  push(out, d(wedge(w[1], alpha)) - wedge(w[0], phi));
  push(out, d(phi));
  // the model metric is E^T E
  Matrix<S> metric(5, 5);
  for (int a = 0; a < 5; ++a)
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) metric(i, j) += e[a].at(i) * e[a].at(j);
  push_eigen_box(out, symmetric_eigenvalues(metric), p);
  return out;
}

template <class S>
std::vector<S> residual_impl(const std::vector<S> &x, const SearchProblem &p) {
  if (static_cast<int>(x.size()) != unknown_count(p.kind))
    throw std::invalid_argument("residual_vector: wrong number of unknowns");
  const int dim = p.kind == SearchKind::symplectic_half_flat ? 6 : 5;
  if (p.algebra.dim() != dim)
    throw std::invalid_argument("residual_vector: kind " + kind_name(p.kind) + " needs a " + std::to_string(dim) +
                                "-dimensional algebra");
  return p.kind == SearchKind::symplectic_half_flat ? shf_residual(x, p) : hypo_residual(x, p);
}

double norm2(const std::vector<double> &r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return std::sqrt(s);
}

Eigen::MatrixXd jacobian_eigen(const std::vector<double> &x, const SearchProblem &p, std::size_t m) {
  Eigen::MatrixXd jac(m, x.size());
  std::vector<double> y = x;
  const double h = p.jacobian_step;
  for (std::size_t j = 0; j < x.size(); ++j) {
    y[j] = x[j] + h;
    const auto rp = residual_impl(y, p);
    y[j] = x[j] - h;
    const auto rm = residual_impl(y, p);
    y[j] = x[j];
    for (std::size_t i = 0; i < m; ++i) jac(i, j) = (rp[i] - rm[i]) / (2 * h);
  }
  return jac;
}

double volume_coefficient(const std::vector<double> &x, SearchKind k) {
  const auto w = unpack(x, k);
  if (k == SearchKind::symplectic_half_flat) return top_coefficient(power(w.omega, 3));
  return top_coefficient(wedge(w.alpha, wedge(w.omega_i[0], w.omega_i[0])));
}

}  // namespace

std::vector<double> residual_vector(const std::vector<double> &x, const SearchProblem &p) { return residual_impl(x, p); }
std::vector<Jet> residual_vector(const std::vector<Jet> &x, const SearchProblem &p) { return residual_impl(x, p); }

Matrix<double> numerical_jacobian(const std::vector<double> &x, const SearchProblem &p) {
  const auto r = residual_impl(x, p);
  const Eigen::MatrixXd j = jacobian_eigen(x, p, r.size());
  Matrix<double> out(j.rows(), j.cols());
  for (int a = 0; a < j.rows(); ++a)
    for (int b = 0; b < j.cols(); ++b) out(a, b) = j(a, b);
  return out;
}

SearchWitness unpack(const std::vector<double> &x, SearchKind k) {
  if (static_cast<int>(x.size()) != unknown_count(k)) throw std::invalid_argument("unpack: wrong number of unknowns");
  SearchWitness w;
  w.kind = k;
  w.x = x;
  std::size_t pos = 0;
  if (k == SearchKind::symplectic_half_flat) {
    w.omega = slice_form(x, pos, 6, 2);
    w.psi_plus = slice_form(x, pos, 6, 3);
  } else {
    w.coframe = slice_coframe(x, pos);
    std::tie(w.alpha, w.omega_i) = su2_model_forms(w.coframe);
    w.phi = slice_form(x, pos, 5, 2);
  }
  return w;
}

std::vector<double> pack(const SearchWitness &w) {
  std::vector<double> x;
  if (w.kind == SearchKind::symplectic_half_flat) {
    push(x, w.omega);
    push(x, w.psi_plus);
  } else {
    if (w.coframe.size() != 5) throw std::invalid_argument("pack: a hypo witness needs its coframe");
    for (const auto &f : w.coframe) push(x, f);
    push(x, w.phi);
  }
  return x;
}

bool normalize_scale(std::vector<double> &x, SearchKind k) {
  const double v = std::fabs(volume_coefficient(x, k));
  if (!(v > 1e-12) || !std::isfinite(v)) return false;
  // omega ~ c^2, psi ~ c^3, omega^3 ~ c^6; coframe ~ c, phi ~ c, alpha ^ omega_1^2 ~ c^5
  if (k == SearchKind::symplectic_half_flat) {
    const double c = std::pow(6.0 / v, 1.0 / 6.0);
    for (int i = 0; i < 15; ++i) x[i] *= c * c;
    for (int i = 15; i < 35; ++i) x[i] *= c * c * c;
  } else {
    const double c = std::pow(2.0 / v, 1.0 / 5.0);
    for (auto &v : x) v *= c;
  }
  return true;
}

LocalResult levenberg_marquardt(std::vector<double> x, const SearchProblem &p) {
  LocalResult out;
  if (!normalize_scale(x, p.kind)) {
    out.x = x;
    out.residual = norm2(residual_impl(x, p));
    return out;
  }
  std::vector<double> r = residual_impl(x, p);
  const std::size_t m = r.size();
  double cost = norm2(r);
  const int n = static_cast<int>(x.size());
  double mu = -1.0;
  double nu = 2.0;
  const double target = p.threshold * 1e-3;
  int it = 0;
  for (; it < p.max_iterations && cost > target; ++it) {
    const Eigen::MatrixXd jac = jacobian_eigen(x, p, m);
    const Eigen::VectorXd rv = Eigen::Map<const Eigen::VectorXd>(r.data(), m);
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * rv;
    if (mu < 0) mu = 1e-3 * std::max(a.diagonal().maxCoeff(), 1e-12);
    bool accepted = false;
    while (!accepted && mu < 1e20) {
      Eigen::MatrixXd damped = a;
      damped.diagonal().array() += mu;
      const Eigen::VectorXd step = damped.ldlt().solve(-grad);
      std::vector<double> trial(x);
      for (int i = 0; i < n; ++i) trial[i] += step(i);
      const auto rt = residual_impl(trial, p);
      const double ct = norm2(rt);
      const double predicted = 0.5 * step.dot(mu * step - grad);
      const double rho = (0.5 * (cost * cost - ct * ct)) / std::max(predicted, 1e-300);
      if (std::isfinite(ct) && ct < cost && rho > 0) {
        if (normalize_scale(trial, p.kind)) {
          x = std::move(trial);
          r = residual_impl(x, p);
          cost = norm2(r);
          mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2 * rho - 1, 3));
          nu = 2.0;
          accepted = true;
        } else {
          mu *= nu;
          nu *= 2;
        }
      } else {
        mu *= nu;
        nu *= 2;
      }
    }
    if (!accepted) break;
  }
  out.x = std::move(x);
  out.residual = cost;
  out.iterations = it;
  return out;
}

std::vector<double> random_start(const SearchProblem &p, int k) {
  std::seed_seq seq{static_cast<std::uint32_t>(p.seed), static_cast<std::uint32_t>(p.seed >> 32),
                    static_cast<std::uint32_t>(k)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> dist(-p.start_range, p.start_range);
  const int n = unknown_count(p.kind);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<double> x(n);
    for (auto &v : x) v = dist(rng);
    const auto w = unpack(x, p.kind);
    if (p.kind == SearchKind::symplectic_half_flat) {
      const double top = top_coefficient(power(w.omega, 3));
      if (std::fabs(top) < 0.1) continue;
      const double lambda = hitchin_invariant(w.psi_plus, top < 0 ? -1.0 : 1.0).lambda;
      if (lambda >= -0.1) continue;
    } else {
      if (std::fabs(volume_coefficient(x, p.kind)) < 0.1) continue;
    }
    return x;
  }
  throw std::runtime_error("random_start: no admissible start found");
}

ValidationReport verify_witness(const LieAlgebra &g, const SearchWitness &w, double tol) {
  ValidationReport r;
  auto closed = [&](const std::string &name, const Form<double> &f) {
    const double v = exterior_derivative(g, f).max_abs();
    r.add(name, v <= tol, v);
  };
  if (w.kind == SearchKind::symplectic_half_flat) {
    closed("d_omega", w.omega);
    closed("d_psi_plus", w.psi_plus);
    r.append(su3_validate(w.omega, w.psi_plus, std::nullopt, tol), "su3.");
    return r;
  }
  closed("d_phi", w.phi);
  r.append(su2_validate(w.alpha, w.omega_i, tol), "su2.");
  if (!r.pass()) return r;
  try {
    const auto n = make_su2(w.alpha, w.omega_i, 1e-7);
    r.append(check_gcy_conditions<double>(n, g, w.phi, 1.0, std::nullopt, tol), "lift.");
  } catch (const std::exception &e) {
    r.add("lift.su2_structure", false, 0.0, e.what());
  }
  return r;
}

SearchResult minimize(const SearchProblem &p) {
  SearchResult res;
  res.best_residual = std::numeric_limits<double>::infinity();
  std::vector<double> best;
  for (int k = 0; k < p.restarts; ++k) {
    const auto local = levenberg_marquardt(random_start(p, k), p);
    const bool hit = local.residual < p.threshold;
    res.log.push_back({k, local.iterations, local.residual, hit});
    if (local.residual < res.best_residual) {
      res.best_residual = local.residual;
      res.best_restart = k;
      best = local.x;
    }
    if (hit && p.stop_at_first) break;
  }
  res.verdict = "not_found_below_threshold";
  if (!best.empty()) {
    res.witness = unpack(best, p.kind);
    if (res.best_residual < p.threshold) {
      res.verification = verify_witness(p.algebra, res.witness);
      if (res.verification.pass()) res.verdict = "found";
    }
  }
  res.evidence_only = res.verdict != "found";
  return res;
}

ValidationReport verify_listed_examples() {
  ValidationReport r;
  for (const auto &e : hypo_examples()) {
    const std::string pre = e.name + ".";
    const LieAlgebra g5 = e.algebra();
    r.append(su2_validate(e.alpha, e.omega), pre + "su2.");
    const auto n = make_su2(e.alpha, e.omega);
    const auto gcy = check_gcy_conditions(n, g5, e.phi, Rational(1));
    for (const char *name : {"d_alpha", "d_omega1", "const_t_d_omega3", "const_t_d_omega2_alpha"}) {
      const Check *c = gcy.find(name);
      r.add(pre + name, c->pass, c->residual);
    }
    const auto l = lift(n, g5, e.phi, Rational(1));
    const auto dw = exterior_derivative(l.algebra, l.su3.omega);
    const auto dp = exterior_derivative(l.algebra, l.su3.psi_plus);
    r.add(pre + "lift.d_omega", dw.is_zero(), dw.max_abs());
    r.add(pre + "lift.d_psi_plus", dp.is_zero(), dp.max_abs());
    r.append(su3_validate(l.su3.omega, l.su3.psi_plus), pre + "lift.su3.");
  }
  return r;
}

}  // namespace halfflat
