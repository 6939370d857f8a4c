#pragma once

#include <array>

#include "halfflat/liealg.hpp"
#include "halfflat/stable.hpp"

namespace halfflat {

class InconsistentError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Matrix whose columns are the coefficient vectors of the given forms.
template <class S>
Matrix<S> columns_of(const std::vector<Form<S>> &forms) {
  if (forms.empty()) return {};
  Matrix<S> m(forms[0].size(), forms.size());
  for (std::size_t c = 0; c < forms.size(); ++c)
    for (std::size_t r = 0; r < forms[c].size(); ++r) m(r, c) = forms[c].at(r);
  return m;
}

/// Forms spanning the kernel of a linear map given on basis monomials.
template <class S, class Map>
std::vector<Form<S>> kernel_forms(int n, int k, Map &&map, double tol) {
  const auto &masks = MaskTable::masks(n, k);
  std::vector<std::vector<S>> images;
  for (Mask m : masks) images.push_back(map(Form<S>::monomial(n, m)));
  Matrix<S> a(images[0].size(), masks.size());
  for (std::size_t c = 0; c < masks.size(); ++c)
    for (std::size_t r = 0; r < images[c].size(); ++r) a(r, c) = images[c][r];
  std::vector<Form<S>> out;
  for (const auto &v : kernel(a, tol)) {
    Form<S> f(n, k);
    for (std::size_t i = 0; i < v.size(); ++i) f.at(i) = v[i];
    out.push_back(f);
  }
  return out;
}

template <class S>
void append(std::vector<S> &dst, const std::vector<S> &src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

/// Expresses `target` in the span of `cols`; throws when inconsistent.
template <class S>
std::vector<S> decompose(const std::vector<Form<S>> &cols, const Form<S> &target, double tol, const char *what) {
  auto x = solve(columns_of(cols), target.coefficients(), tol);
  if (!x) throw InconsistentError(std::string("inconsistent torsion system for ") + what);
  return *x;
}

template <class S>
Form<S> combine(const std::vector<Form<S>> &basis, const std::vector<S> &x, std::size_t offset, std::size_t count, int n,
                int k) {
  Form<S> f(n, k);
  for (std::size_t i = 0; i < count; ++i)
    if (!is_zero(x[offset + i])) f += basis[i] * x[offset + i];
  return f;
}

}  // namespace detail

/// J acting on 2-forms: (J beta)(X,Y) = beta(JX, JY).
template <class S>
Form<S> J_on_two_form(const Form<S> &beta, const Matrix<S> &J) {
  const Matrix<S> b = J.transpose() * two_form_matrix(beta) * J;
  Form<S> out(beta.dim(), 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Mask m = out.mask_at(i);
    const int a = std::countr_zero(static_cast<unsigned>(m));
    const int c = std::countr_zero(static_cast<unsigned>(m & (m - 1)));
    out.at(i) = b(a, c);
  }
  return out;
}

/// Primitive (1,1)-forms: J-invariant with beta ^ omega^2 = 0 (dimension 8).
template <class S>
std::vector<Form<S>> primitive_11_basis(const SU3Structure<S> &s, double tol = 1e-10) {
  const Form<S> w2 = wedge(s.omega, s.omega);
  return detail::kernel_forms<S>(6, 2, [&](const Form<S> &b) {
    std::vector<S> v = (b - J_on_two_form(b, s.J)).coefficients();
    detail::append(v, wedge(b, w2).coefficients());
    return v;
  }, tol);
}

/// Primitive (2,1)+(1,2)-forms: gamma ^ omega = 0 = gamma ^ psi+- (dimension 12).
template <class S>
std::vector<Form<S>> primitive_21_basis(const SU3Structure<S> &s, double tol = 1e-10) {
  return detail::kernel_forms<S>(6, 3, [&](const Form<S> &g) {
    std::vector<S> v = wedge(g, s.omega).coefficients();
    detail::append(v, wedge(g, s.psi_plus).coefficients());
    detail::append(v, wedge(g, s.psi_minus).coefficients());
    return v;
  }, tol);
}

template <class S>
struct SU3Torsion {
  S W1p{0}, W1m{0};              // from the d psi lines
  S W1p_omega{0}, W1m_omega{0};  // from the d omega line
  Form<S> W2p{6, 2}, W2m{6, 2};
  Form<S> W3{6, 3};
  Form<S> W4{6, 1};
  Form<S> W5{6, 1};        // from d psi+
  Form<S> W5_minus{6, 1};  // from d psi-
  double reconstruction_residual = 0.0;
  double w1_consistency = 0.0;  // |W1 from d psi lines - W1 from d omega line|
  double w5_consistency = 0.0;
  std::size_t dim_11 = 0, dim_21 = 0;
};

/// Solves the three linear systems
///   d psi+ = psi+ ^ W5 + W2+ ^ omega + W1+ omega^2
///   d psi- = psi- ^ W5 + W2- ^ omega + W1- omega^2
///   d omega = -3/2 W1- psi+ + 3/2 W1+ psi- + W3 + W4 ^ omega
/// Variant taking the exterior derivatives directly, for structures whose
/// coefficients vary along a coordinate.
template <class S>
SU3Torsion<S> extract_su3_torsion(const SU3Structure<S> &s, const Form<S> &domega, const Form<S> &dpsi_plus,
                                  const Form<S> &dpsi_minus, double tol = 1e-10) {
  const int n = 6;
  SU3Torsion<S> t;
  const auto b11 = primitive_11_basis(s, tol);
  const auto b21 = primitive_21_basis(s, tol);
  t.dim_11 = b11.size();
  t.dim_21 = b21.size();
  if (b11.size() != 8 || b21.size() != 12) throw InconsistentError("torsion subspaces have the wrong dimension");
  const Form<S> w2 = wedge(s.omega, s.omega);

  auto psi_line = [&](const Form<S> &psi, const Form<S> &lhs, Form<S> &W5, Form<S> &W2, S &W1, const char *what) {
    std::vector<Form<S>> cols;
    for (int i = 0; i < n; ++i) cols.push_back(wedge(psi, Form<S>::generator(n, i)));
    for (const auto &b : b11) cols.push_back(wedge(b, s.omega));
    cols.push_back(w2);
    const auto x = detail::decompose(cols, lhs, tol, what);
    for (int i = 0; i < n; ++i) W5.at(i) = x[i];
    W2 = detail::combine(b11, x, n, b11.size(), n, 2);
    W1 = x.back();
    const Form<S> rhs = wedge(psi, W5) + wedge(W2, s.omega) + w2 * W1;
    t.reconstruction_residual = std::max(t.reconstruction_residual, (lhs - rhs).max_abs());
  };
  psi_line(s.psi_plus, dpsi_plus, t.W5, t.W2p, t.W1p, "d psi+");
  psi_line(s.psi_minus, dpsi_minus, t.W5_minus, t.W2m, t.W1m, "d psi-");

  std::vector<Form<S>> cols{s.psi_plus, s.psi_minus};
  for (const auto &b : b21) cols.push_back(b);
  for (int i = 0; i < n; ++i) cols.push_back(wedge(Form<S>::generator(n, i), s.omega));
  const auto x = detail::decompose(cols, domega, tol, "d omega");
  t.W1m_omega = x[0] * S(-2) / S(3);
  t.W1p_omega = x[1] * S(2) / S(3);
  t.W3 = detail::combine(b21, x, 2, b21.size(), n, 3);
  for (int i = 0; i < n; ++i) t.W4.at(i) = x[2 + b21.size() + i];
  const Form<S> rhs = s.psi_minus * (S(3) / S(2) * t.W1p_omega) - s.psi_plus * (S(3) / S(2) * t.W1m_omega) + t.W3 +
                      wedge(t.W4, s.omega);
  t.reconstruction_residual = std::max(t.reconstruction_residual, (domega - rhs).max_abs());
  t.w1_consistency = std::max(magnitude(S(t.W1p - t.W1p_omega)), magnitude(S(t.W1m - t.W1m_omega)));
  t.w5_consistency = (t.W5 - t.W5_minus).max_abs();
  return t;
}

template <class S>
SU3Torsion<S> extract_su3_torsion(const SU3Structure<S> &s, const LieAlgebra &g, double tol = 1e-10) {
  return extract_su3_torsion(s, exterior_derivative(g, s.omega), exterior_derivative(g, s.psi_plus),
                             exterior_derivative(g, s.psi_minus), tol);
}

/// Named component norms (max-abs of coefficients) for reports.
template <class S>
std::vector<std::pair<std::string, double>> su3_component_norms(const SU3Torsion<S> &t) {
  return {{"W1+", magnitude(t.W1p)}, {"W1-", magnitude(t.W1m)}, {"W2+", t.W2p.max_abs()}, {"W2-", t.W2m.max_abs()},
          {"W3", t.W3.max_abs()},    {"W4", t.W4.max_abs()},    {"W5", t.W5.max_abs()}};
}

struct SU3Predicates {
  bool half_flat = false;
  bool symplectic_half_flat = false;
  bool integrable = false;
};

/// Computed from d of the defining forms, independently of the torsion solve.
template <class S>
SU3Predicates su3_predicates(const SU3Structure<S> &s, const LieAlgebra &g, double tol = 1e-8) {
  auto closed = [&](const Form<S> &f) {
    const Form<S> d = exterior_derivative(g, f);
    return ScalarTraits<S>::exact ? d.is_zero() : d.max_abs() <= tol;
  };
  SU3Predicates p;
  const bool dpsi = closed(s.psi_plus);
  const bool dw = closed(s.omega);
  p.half_flat = dpsi && closed(wedge(s.omega, s.omega));
  p.symplectic_half_flat = p.half_flat && dw;
  p.integrable = dw && dpsi && closed(s.psi_minus);
  return p;
}

// ---------------------------------------------------------------------------
// SU(2)-structures.

/// 1-forms annihilating the Reeb vector (the 4-dimensional Lambda^1).
template <class S>
std::vector<Form<S>> su2_lambda1_basis(const SU2Structure<S> &s, double tol = 1e-10) {
  return detail::kernel_forms<S>(5, 1, [&](const Form<S> &b) { return std::vector<S>{evaluate(b, s.reeb)}; }, tol);
}

/// Anti-self-dual horizontal 2-forms: R _| gamma = 0 and gamma ^ omega_i ^ alpha = 0.
template <class S>
std::vector<Form<S>> su2_lambda2m_basis(const SU2Structure<S> &s, double tol = 1e-10) {
  return detail::kernel_forms<S>(5, 2, [&](const Form<S> &g) {
    std::vector<S> v = interior(s.reeb, g).coefficients();
    for (int i = 0; i < 3; ++i) v.push_back(top_coefficient(wedge(wedge(g, s.omega[i]), s.alpha)));
    return v;
  }, tol);
}

/// Component of a 1-form in Lambda^1.
template <class S>
Form<S> project_lambda1(const SU2Structure<S> &s, const Form<S> &beta) {
  return beta - s.alpha * evaluate(beta, s.reeb);
}

/// Component of a 2-form in Lambda^2_-: drop the alpha ^ (.) part and the
/// omega_i components.
template <class S>
Form<S> project_lambda2m(const SU2Structure<S> &s, const Form<S> &gamma) {
  Form<S> h = gamma - wedge(s.alpha, interior(s.reeb, gamma));
  const Form<S> vol = wedge(wedge(s.omega[0], s.omega[0]), s.alpha);
  const S v = top_coefficient(vol);
  for (int i = 0; i < 3; ++i) {
    // <h, omega_i> vol = h ^ omega_i ^ alpha, |omega_i|^2 = 2
    const S c = top_coefficient(wedge(wedge(h, s.omega[i]), s.alpha)) * S(2) / v;
    h -= s.omega[i] * (c / S(2));
  }
  return h;
}

template <class S>
struct SU2Torsion {
  S lambda{0};
  std::array<S, 3> lambda_lines{S(0), S(0), S(0)};
  std::array<S, 3> f{S(0), S(0), S(0)};
  // g[i][j] = g_i^j from the d omega_i line (diagonal unused)
  std::array<std::array<S, 3>, 3> g{};
  Form<S> beta{5, 1};
  std::array<Form<S>, 3> gamma{Form<S>(5, 1), Form<S>(5, 1), Form<S>(5, 1)};
  Form<S> omega_minus{5, 2};
  std::array<Form<S>, 3> sigma{Form<S>(5, 2), Form<S>(5, 2), Form<S>(5, 2)};
  double reconstruction_residual = 0.0;
  double lambda_consistency = 0.0;
  double g_antisymmetry = 0.0;

  S g12() const { return g[0][1]; }
  S g13() const { return g[0][2]; }
  S g23() const { return g[1][2]; }
};

/// Solves
///   d alpha = alpha ^ beta + sum f^j omega_j + omega^-
///   d omega_i = gamma_i ^ omega_i + lambda alpha ^ omega_i + sum_(j != i) g_i^j alpha ^ omega_j + alpha ^ sigma_i^-
template <class S>
SU2Torsion<S> extract_su2_torsion(const SU2Structure<S> &s, const LieAlgebra &g, double tol = 1e-10) {
  const int n = 5;
  SU2Torsion<S> t;
  const auto l1 = su2_lambda1_basis(s, tol);
  const auto l2 = su2_lambda2m_basis(s, tol);
  if (l1.size() != 4 || l2.size() != 3) throw InconsistentError("SU(2) torsion subspaces have the wrong dimension");

  {
    std::vector<Form<S>> cols;
    for (const auto &b : l1) cols.push_back(wedge(s.alpha, b));
    for (int j = 0; j < 3; ++j) cols.push_back(s.omega[j]);
    for (const auto &b : l2) cols.push_back(b);
    const Form<S> lhs = exterior_derivative(g, s.alpha);
    const auto x = detail::decompose(cols, lhs, tol, "d alpha");
    t.beta = detail::combine(l1, x, 0, 4, n, 1);
    for (int j = 0; j < 3; ++j) t.f[j] = x[4 + j];
    t.omega_minus = detail::combine(l2, x, 7, 3, n, 2);
    Form<S> rhs = wedge(s.alpha, t.beta) + t.omega_minus;
    for (int j = 0; j < 3; ++j) rhs += s.omega[j] * t.f[j];
    t.reconstruction_residual = std::max(t.reconstruction_residual, (lhs - rhs).max_abs());
  }
  for (int i = 0; i < 3; ++i) {
    std::vector<Form<S>> cols;
    for (const auto &b : l1) cols.push_back(wedge(b, s.omega[i]));
    cols.push_back(wedge(s.alpha, s.omega[i]));
    std::vector<int> others;
    for (int j = 0; j < 3; ++j)
      if (j != i) {
        others.push_back(j);
        cols.push_back(wedge(s.alpha, s.omega[j]));
      }
    for (const auto &b : l2) cols.push_back(wedge(s.alpha, b));
    const Form<S> lhs = exterior_derivative(g, s.omega[i]);
    const auto x = detail::decompose(cols, lhs, tol, "d omega_i");
    t.gamma[i] = detail::combine(l1, x, 0, 4, n, 1);
    t.lambda_lines[i] = x[4];
    t.g[i][others[0]] = x[5];
    t.g[i][others[1]] = x[6];
    t.sigma[i] = detail::combine(l2, x, 7, 3, n, 2);
    Form<S> rhs = wedge(t.gamma[i], s.omega[i]) + wedge(s.alpha, s.omega[i]) * x[4] + wedge(s.alpha, t.sigma[i]);
    for (int k = 0; k < 2; ++k) rhs += wedge(s.alpha, s.omega[others[k]]) * x[5 + k];
    t.reconstruction_residual = std::max(t.reconstruction_residual, (lhs - rhs).max_abs());
  }
  t.lambda = t.lambda_lines[0];
  for (int i = 1; i < 3; ++i)
    t.lambda_consistency = std::max(t.lambda_consistency, magnitude(S(t.lambda_lines[i] - t.lambda)));
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      t.g_antisymmetry = std::max(t.g_antisymmetry, magnitude(S(t.g[i][j] + t.g[j][i])));
  return t;
}

/// Flattened component list in a fixed order, for comparisons and reports.
template <class S>
std::vector<std::pair<std::string, std::vector<double>>> su2_components(const SU2Torsion<S> &t) {
  auto vec = [](const Form<S> &f) {
    std::vector<double> v;
    for (const auto &c : f.coefficients()) v.push_back(to_double(c));
    return v;
  };
  std::vector<std::pair<std::string, std::vector<double>>> out{
      {"lambda", {to_double(t.lambda)}},
      {"f1", {to_double(t.f[0])}},
      {"f2", {to_double(t.f[1])}},
      {"f3", {to_double(t.f[2])}},
      {"g12", {to_double(t.g12())}},
      {"g13", {to_double(t.g13())}},
      {"g23", {to_double(t.g23())}},
      {"beta", vec(t.beta)},
      {"gamma1", vec(t.gamma[0])},
      {"gamma2", vec(t.gamma[1])},
      {"gamma3", vec(t.gamma[2])},
      {"omega-", vec(t.omega_minus)},
      {"sigma1-", vec(t.sigma[0])},
      {"sigma2-", vec(t.sigma[1])},
      {"sigma3-", vec(t.sigma[2])},
  };
  return out;
}

template <class S>
bool su2_hypo(const SU2Structure<S> &s, const LieAlgebra &g, double tol = 1e-8) {
  auto closed = [&](const Form<S> &f) {
    const Form<S> d = exterior_derivative(g, f);
    return ScalarTraits<S>::exact ? d.is_zero() : d.max_abs() <= tol;
  };
  return closed(s.omega[0]) && closed(s.psi(1)) && closed(s.psi(2));
}

}  // namespace halfflat
