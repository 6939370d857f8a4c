#pragma once

#include <string>
#include <utility>
#include <vector>

#include "halfflat/liealg.hpp"
#include "halfflat/linalg.hpp"

namespace halfflat {

/// Levi-Civita connection of an orthonormal coframe E^a = sum_i C(a,i) e^i
/// with jet coefficients in the coordinate generator of `algebra`:
/// dE^a = -omega_ab ^ E^b, omega_ab = -omega_ba.
struct ConnectionForms {
  LieAlgebra algebra;
  std::vector<Form<Jet>> coframe;
  Matrix<Jet> C;
  Matrix<Jet> Cinv;
  std::vector<std::vector<Form<Jet>>> omega;  // omega[a][b], in the e-basis
  double structure_residual = 0.0;            // max |dE^a + omega_ab ^ E^b|
};

/// R(a,b,c,d) = Omega_ab(E_c, E_d) at the evaluation point, where
/// Omega_ab = d omega_ab + omega_ac ^ omega_cb; R(a,b,c,d) is the curvature
/// operator on Lambda^2 in the basis E^ab, so R(a,b,a,b) is the sectional
/// curvature of the plane E_a, E_b.
struct CurvatureTensor {
  int n = 0;
  std::vector<double> data;
  double bianchi_residual = 0.0;  // max |Omega_ab ^ E^b|

  double operator()(int a, int b, int c, int d) const { return data[((a * n + b) * n + c) * n + d]; }
  double &operator()(int a, int b, int c, int d) { return data[((a * n + b) * n + c) * n + d]; }

  /// Symmetric matrix on Lambda^2 in the basis E^ab, a < b (lexicographic).
  Matrix<double> operator_matrix() const;
  double max_abs() const;
};

ConnectionForms connection_from_coframe(const LieAlgebra &g, const std::vector<Form<Jet>> &coframe);
CurvatureTensor curvature(const ConnectionForms &c);
Matrix<double> ricci(const CurvatureTensor &r);
double scalar_curvature(const CurvatureTensor &r);

struct SymmetryResiduals {
  double antisymmetry = 0.0;
  double pair_symmetry = 0.0;
  double bianchi = 0.0;
};
SymmetryResiduals curvature_symmetries(const CurvatureTensor &r);

/// Index of E^ab (a < b) in the lexicographic basis of Lambda^2.
int pair_index(int n, int a, int b);
std::pair<int, int> index_pair(int n, int k);

/// Action of A in so(n) on a form written in the orthonormal coframe, as a
/// derivation: A . E^k = -sum_j A(k,j) E^j.
Form<double> so_action(const Matrix<double> &a, const Form<double> &f);

struct HolonomySpan {
  int dimension = 0;
  std::vector<Matrix<double>> basis;   // orthonormal for the trace form
  bool in_stabilizer = false;
  double max_stabilizer_residual = 0.0;
};

/// Curvature operators R(E_c, E_d) as elements of so(n).
std::vector<Matrix<double>> curvature_operators(const CurvatureTensor &r);

/// Span of the given elements closed under brackets, with an optional form
/// whose annihilation by every basis element is tested.
HolonomySpan holonomy_span(const std::vector<Matrix<double>> &generators, const Form<double> *stabilized = nullptr,
                           double tol = 1e-9);

// ---------------------------------------------------------------------------
// The seven-dimensional metric obtained from the explicit half-flat family.

/// A term c * (sum_k s_k E^{a_k b_k})^2 of the printed curvature expression.
struct CurvatureTerm {
  double coefficient = 0.0;
  std::vector<std::pair<double, std::pair<int, int>>> combination;  // (sign, (a, b)) 0-based
  std::string label;
  bool flagged = false;  // printed with a likely typo
};

/// Terms of the printed expression; `amended` appends the term
/// -(E25-E36)^2 in the last group, without which the printed expression is
/// neither Ricci-flat nor satisfies the first Bianchi identity.
std::vector<CurvatureTerm> printed_curvature_terms(double u, bool amended = false);

/// The printed expression as a symmetric matrix on Lambda^2 (basis E^ab, a < b).
Matrix<double> printed_curvature_reference(double u, bool amended = false);

/// Curvature tensor with the given operator matrix on Lambda^2.
CurvatureTensor curvature_from_operator(const Matrix<double> &m, int n);

struct CurvatureComparison {
  double max_unflagged = 0.0;  // over entries not touched by a flagged term
  double max_flagged = 0.0;    // over entries touched by a flagged term
  std::string worst_unflagged;
  std::string worst_flagged;
  int sign = 1;                // overall sign relating the two conventions
};

/// Compares a computed curvature operator with the printed expression,
/// choosing the overall sign that fits best.
CurvatureComparison compare_with_printed(const CurvatureTensor &r, double u, bool amended = false);

/// Connection and curvature of the 7-dimensional metric at u.
ConnectionForms explicit_connection(double u);
CurvatureTensor explicit_curvature(double u);

}  // namespace halfflat
