#include "halfflat/curvature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "halfflat/flow.hpp"

namespace halfflat {

namespace {

std::vector<std::vector<Jet>> rows_of(const Matrix<Jet> &m) {
  std::vector<std::vector<Jet>> out(m.rows(), std::vector<Jet>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

// Coefficients of a form in the orthonormal coframe: e^i = sum_a Cinv(i,a) E^a.
Form<Jet> in_coframe(const Form<Jet> &f, const Matrix<Jet> &cinv) { return substitute(f, rows_of(cinv)); }

Jet coeff2(const Form<Jet> &f, int b, int c) {
  const Mask m = static_cast<Mask>((1u << b) | (1u << c));
  return b < c ? f[m] : -f[m];
}

std::string pair_name(int n, int k) {
  const auto [a, b] = index_pair(n, k);
  return "E" + std::to_string(a + 1) + std::to_string(b + 1);
}

}  // namespace

int pair_index(int n, int a, int b) {
  if (a >= b) throw std::invalid_argument("pair_index: need a < b");
  return a * n - a * (a + 1) / 2 + (b - a - 1);
}

std::pair<int, int> index_pair(int n, int k) {
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (pair_index(n, a, b) == k) return {a, b};
  throw std::out_of_range("index_pair");
}

Matrix<double> CurvatureTensor::operator_matrix() const {
  const int m = n * (n - 1) / 2;
  Matrix<double> out(m, m);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = c + 1; d < n; ++d) out(pair_index(n, a, b), pair_index(n, c, d)) = (*this)(a, b, c, d);
  return out;
}

double CurvatureTensor::max_abs() const {
  double m = 0.0;
  for (double x : data) m = std::max(m, std::fabs(x));
  return m;
}

ConnectionForms connection_from_coframe(const LieAlgebra &g, const std::vector<Form<Jet>> &coframe) {
  const int n = g.dim();
  if (static_cast<int>(coframe.size()) != n) throw std::invalid_argument("connection_from_coframe: coframe size");
  ConnectionForms c;
  c.algebra = g;
  c.coframe = coframe;
  c.C = coframe_matrix(coframe);
  auto inv = inverse(c.C);
  if (!inv) throw DegenerateError("connection_from_coframe: singular coframe");
  c.Cinv = *inv;
  // dE^a = sum_{b<c} T[a](b,c) E^bc
  std::vector<Form<Jet>> T;
  for (int a = 0; a < n; ++a) T.push_back(in_coframe(exterior_derivative(g, coframe[a]), c.Cinv));
  // omega_ab = sum_c G_abc E^c with G_abc = (T^a_bc - T^b_ac - T^c_ab) / 2
  c.omega.assign(n, std::vector<Form<Jet>>(n, Form<Jet>(n, 1)));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Form<Jet> w(n, 1);
      for (int k = 0; k < n; ++k) {
        Jet gamma(0.0);
        if (b != k) gamma += coeff2(T[a], b, k);
        if (a != k) gamma -= coeff2(T[b], a, k);
        gamma -= coeff2(T[k], a, b);
        gamma *= Jet(0.5);
        if (!is_zero(gamma)) w += coframe[k] * gamma;
      }
      c.omega[a][b] = w;
      c.omega[b][a] = -w;
    }
  for (int a = 0; a < n; ++a) {
    Form<Jet> r = exterior_derivative(g, coframe[a]);
    for (int b = 0; b < n; ++b) r += wedge(c.omega[a][b], coframe[b]);
    c.structure_residual = std::max(c.structure_residual, jet_component(r, 0).max_abs());
  }
  return c;
}

CurvatureTensor curvature(const ConnectionForms &c) {
  const int n = c.algebra.dim();
  CurvatureTensor r;
  r.n = n;
  r.data.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
  std::vector<std::vector<Form<double>>> big(n, std::vector<Form<double>>(n, Form<double>(n, 2)));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Form<Jet> om = exterior_derivative(c.algebra, c.omega[a][b]);
      for (int k = 0; k < n; ++k) om += wedge(c.omega[a][k], c.omega[k][b]);
      const Form<double> e = jet_component(in_coframe(om, c.Cinv), 0);
      big[a][b] = jet_component(om, 0);
      big[b][a] = -big[a][b];
      for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
          const double v = e[static_cast<Mask>((1u << p) | (1u << q))];
          r(a, b, p, q) = v;
          r(a, b, q, p) = -v;
          r(b, a, p, q) = -v;
          r(b, a, q, p) = v;
        }
    }
  const std::vector<Form<double>> E = [&] {
    std::vector<Form<double>> out;
    for (const auto &f : c.coframe) out.push_back(jet_component(f, 0));
    return out;
  }();
  for (int a = 0; a < n; ++a) {
    Form<double> s(n, 3);
    for (int b = 0; b < n; ++b) s += wedge(big[a][b], E[b]);
    r.bianchi_residual = std::max(r.bianchi_residual, s.max_abs());
  }
  return r;
}

Matrix<double> ricci(const CurvatureTensor &r) {
  const int n = r.n;
  Matrix<double> ric(n, n);
  for (int y = 0; y < n; ++y)
    for (int z = 0; z < n; ++z)
      for (int a = 0; a < n; ++a) ric(y, z) += r(a, z, a, y);
  return ric;
}

double scalar_curvature(const CurvatureTensor &r) {
  const auto ric = ricci(r);
  double s = 0.0;
  for (int i = 0; i < r.n; ++i) s += ric(i, i);
  return s;
}

SymmetryResiduals curvature_symmetries(const CurvatureTensor &r) {
  const int n = r.n;
  SymmetryResiduals s;
  s.bianchi = r.bianchi_residual;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          s.antisymmetry = std::max({s.antisymmetry, std::fabs(r(a, b, c, d) + r(b, a, c, d)),
                                     std::fabs(r(a, b, c, d) + r(a, b, d, c))});
          s.pair_symmetry = std::max(s.pair_symmetry, std::fabs(r(a, b, c, d) - r(c, d, a, b)));
          // algebraic Bianchi identity in tensor form
          s.bianchi = std::max(s.bianchi, std::fabs(r(a, b, c, d) + r(a, c, d, b) + r(a, d, b, c)));
        }
  return s;
}

Form<double> so_action(const Matrix<double> &a, const Form<double> &f) {
  const int n = f.dim();
  Form<double> out(n, f.degree());
  if (f.degree() == 0) return out;
  for (int k = 0; k < n; ++k) {
    Form<double> theta(n, 1);
    for (int j = 0; j < n; ++j) theta.at(j) = -a(k, j);
    if (theta.is_zero()) continue;
    out += wedge(theta, interior(basis_vector<double>(n, k), f));
  }
  return out;
}

std::vector<Matrix<double>> curvature_operators(const CurvatureTensor &r) {
  const int n = r.n;
  std::vector<Matrix<double>> out;
  for (int c = 0; c < n; ++c)
    for (int d = c + 1; d < n; ++d) {
      Matrix<double> m(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) m(a, b) = r(a, b, c, d);
      out.push_back(m);
    }
  return out;
}

HolonomySpan holonomy_span(const std::vector<Matrix<double>> &generators, const Form<double> *stabilized, double tol) {
  HolonomySpan h;
  if (generators.empty()) {
    h.in_stabilizer = true;
    return h;
  }
  const int n = static_cast<int>(generators[0].rows());
  const int m = n * (n - 1) / 2;
  auto vec = [&](const Matrix<double> &a) {
    Eigen::VectorXd v(m);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) v(pair_index(n, i, j)) = a(i, j);
    return v;
  };
  auto mat = [&](const Eigen::VectorXd &v) {
    Matrix<double> a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        a(i, j) = v(pair_index(n, i, j));
        a(j, i) = -a(i, j);
      }
    return a;
  };
  double scale = 0.0;
  for (const auto &g : generators) scale = std::max(scale, vec(g).norm());
  std::vector<Eigen::VectorXd> basis;
  auto add = [&](const Eigen::VectorXd &v) {
    Eigen::VectorXd w = v;
    // two passes of Gram-Schmidt for stability
    for (int pass = 0; pass < 2; ++pass)
      for (const auto &b : basis) w -= b.dot(w) * b;
    const double nw = w.norm();
    if (nw <= tol * std::max(1.0, v.norm())) return false;
    basis.push_back(w / nw);
    return true;
  };
  if (scale == 0.0) {
    h.in_stabilizer = true;
    return h;
  }
  for (const auto &g : generators) add(vec(g) / scale);
  for (std::size_t i = 0; i < basis.size() && static_cast<int>(basis.size()) < m; ++i)
    for (std::size_t j = 0; j < i && static_cast<int>(basis.size()) < m; ++j) {
      const Matrix<double> a = mat(basis[i]), b = mat(basis[j]);
      add(vec(a * b - b * a));
    }
  h.dimension = static_cast<int>(basis.size());
  for (const auto &b : basis) h.basis.push_back(mat(b));
  h.in_stabilizer = true;
  if (stabilized) {
    const double fn = std::max(1.0, stabilized->max_abs());
    for (const auto &a : h.basis)
      h.max_stabilizer_residual = std::max(h.max_stabilizer_residual, so_action(a, *stabilized).max_abs() / fn);
    h.in_stabilizer = h.max_stabilizer_residual <= 1e-7;
  }
  return h;
}

std::vector<CurvatureTerm> printed_curvature_terms(double u, bool amended) {
  const double q = 3 * u * u - 1;
  if (!(q > 1e-12)) throw DomainError("printed_curvature_terms: need u^2 > 1/3");
  const double u10 = std::pow(u, 10);
  const double c1 = -4 * u10 / std::pow(q, 4);
  const double c2 = -12 * u10 * (2 * u * u - 1) / std::pow(q, 3);
  const double c3 = 12 * u10 * (u * u - 1) / std::pow(q, 4);
  const double c4 = -12 * u10 * (u * u - 2) / std::pow(q, 4);
  const double c5 = -4 * u10 / std::pow(q, 3);
  auto P = [](int a, int b) { return std::make_pair(a - 1, b - 1); };
  using C = std::vector<std::pair<double, std::pair<int, int>>>;
  std::vector<CurvatureTerm> terms{
      {3 * c1, C{{1, P(1, 7)}, {1, P(3, 5)}}, "3(E17+E35)^2", false},
      {3 * c1, C{{1, P(3, 4)}, {-1, P(2, 7)}}, "3(E34-E27)^2", false},
      {c1, C{{1, P(1, 4)}, {-1, P(2, 5)}}, "(E14-E25)^2", false},
      {-c1, C{{1, P(1, 2)}, {1, P(4, 5)}}, "-(E12+E45) read as squared", true},
      {c2, C{{1, P(1, 6)}, {1, P(2, 7)}}, "(E16+E27)^2", false},
      {c2, C{{1, P(1, 7)}, {-1, P(2, 6)}}, "(E17-E26)^2", false},
      {-2 * c2, C{{1, P(1, 2)}, {-1, P(6, 7)}}, "-2(E12-E67)^2", false},
      {c3, C{{1, P(2, 4)}, {1, P(3, 7)}}, "(E24+E37)^2 (repeated E37)", true},
      {c3, C{{1, P(1, 5)}, {-1, P(3, 7)}}, "(E15-E37)^2 (repeated E37)", true},
      {c4, C{{1, P(1, 3)}, {1, P(5, 7)}}, "(E13+E57)^2", false},
      {c4, C{{1, P(2, 3)}, {-1, P(4, 7)}}, "(E23-E47)^2", false},
      {c5, C{{1, P(2, 3)}, {1, P(5, 6)}}, "(E23+E56)^2", false},
      {c5, C{{1, P(1, 3)}, {1, P(4, 6)}}, "(E13+E46)^2", false},
      {-c5, C{{1, P(1, 4)}, {-1, P(3, 6)}}, "-(E14-E36)^2", false},
  };
  if (amended) terms.push_back({-c5, C{{1, P(2, 5)}, {-1, P(3, 6)}}, "-(E25-E36)^2 (absent from the printed expression)", false});
  return terms;
}

Matrix<double> printed_curvature_reference(double u, bool amended) {
  if (u == 0.0 || 3 * u * u - 1 == 0.0) throw DomainError("printed_curvature_reference: pole");
  const int n = 7;
  const int m = n * (n - 1) / 2;
  Matrix<double> out(m, m);
  for (const auto &t : printed_curvature_terms(u, amended))
    for (const auto &[s1, p1] : t.combination)
      for (const auto &[s2, p2] : t.combination)
        out(pair_index(n, p1.first, p1.second), pair_index(n, p2.first, p2.second)) += t.coefficient * s1 * s2;
  return out;
}

CurvatureComparison compare_with_printed(const CurvatureTensor &r, double u, bool amended) {
  const int n = 7;
  const int m = n * (n - 1) / 2;
  if (r.n != n) throw std::invalid_argument("compare_with_printed: need a 7-dimensional curvature tensor");
  const Matrix<double> ref = printed_curvature_reference(u, amended);
  const Matrix<double> cur = r.operator_matrix();
  std::vector<bool> flagged(m * m, false);
  for (const auto &t : printed_curvature_terms(u, amended)) {
    if (!t.flagged) continue;
    for (const auto &[s1, p1] : t.combination)
      for (const auto &[s2, p2] : t.combination)
        flagged[pair_index(n, p1.first, p1.second) * m + pair_index(n, p2.first, p2.second)] = true;
  }
  CurvatureComparison best;
  for (int sign : {1, -1}) {
    CurvatureComparison c;
    c.sign = sign;
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) {
        const double d = std::fabs(sign * cur(k, l) - ref(k, l));
        const std::string where = "(" + pair_name(n, k) + "," + pair_name(n, l) + ")";
        if (flagged[k * m + l]) {
          if (d > c.max_flagged) c.max_flagged = d, c.worst_flagged = where;
        } else if (d > c.max_unflagged) {
          c.max_unflagged = d, c.worst_unflagged = where;
        }
      }
    if (sign == 1 || c.max_unflagged < best.max_unflagged) best = c;
  }
  return best;
}

CurvatureTensor curvature_from_operator(const Matrix<double> &m, int n) {
  CurvatureTensor r;
  r.n = n;
  r.data.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          const double v = m(pair_index(n, a, b), pair_index(n, c, d));
          r(a, b, c, d) = v;
          r(b, a, c, d) = -v;
          r(a, b, d, c) = -v;
          r(b, a, d, c) = v;
        }
  return r;
}

ConnectionForms explicit_connection(double u) {
  const LieAlgebra g7 = extend_with_coordinate(parse_structure_notation(kExplicitFamilyAlgebra));
  return connection_from_coframe(g7, explicit_orthonormal_coframe(Jet::variable(u)));
}

CurvatureTensor explicit_curvature(double u) { return curvature(explicit_connection(u)); }

}  // namespace halfflat
