#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "halfflat/liealg.hpp"
#include "halfflat/report.hpp"

namespace halfflat {

enum class SearchKind { symplectic_half_flat, hypo_with_eq4 };

std::string kind_name(SearchKind k);
SearchKind parse_kind(const std::string &s);

/// Unknown vector layout (coefficients in the lexicographic monomial order):
///   symplectic_half_flat: omega (15), psi+ (20)
///   hypo_with_eq4: coframe E^1..E^5 (5 each), phi (10); alpha and omega_i are
///   the model forms alpha = E^5, omega_1 = E^12+E^34, omega_2 = E^13+E^42,
///   omega_3 = E^14+E^23, so the algebraic SU(2) conditions hold identically
struct SearchProblem {
  LieAlgebra algebra;
  SearchKind kind = SearchKind::symplectic_half_flat;
  int restarts = 100;
  std::uint64_t seed = 7;
  int max_iterations = 400;
  double threshold = 1e-10;
  double start_range = 2.0;       // uniform in [-r, r]
  double lambda_margin = 1e-2;    // barrier max(0, lambda + margin)
  double eigen_min = 1e-2;        // metric eigenvalues kept in [eigen_min, eigen_max]
  double eigen_max = 1e2;
  double jacobian_step = 1e-6;
  bool stop_at_first = false;     // stop once a restart reaches the threshold
};

int unknown_count(SearchKind k);

/// Closure, compatibility, barrier and volume-normalisation residuals.
std::vector<double> residual_vector(const std::vector<double> &x, const SearchProblem &p);
/// Same with forward-mode derivatives along the d1 slots of x.
std::vector<Jet> residual_vector(const std::vector<Jet> &x, const SearchProblem &p);

/// Names of the residual blocks with their lengths, in order.
std::vector<std::pair<std::string, int>> residual_blocks(SearchKind k);

/// Central-difference Jacobian, rows = residuals, columns = unknowns.
Matrix<double> numerical_jacobian(const std::vector<double> &x, const SearchProblem &p);

/// Rescales x by the structure homothety so that the top coefficient of
/// omega^3 is +-6 (resp. of alpha ^ omega_1^2 is +-2). Returns false if the
/// volume coefficient vanishes.
bool normalize_scale(std::vector<double> &x, SearchKind k);

struct SearchWitness {
  SearchKind kind = SearchKind::symplectic_half_flat;
  std::vector<double> x;
  Form<double> omega, psi_plus;               // dimension 6
  Form<double> alpha, phi;                    // dimension 5
  std::array<Form<double>, 3> omega_i;
  std::vector<Form<double>> coframe;         // hypo kind only
};

SearchWitness unpack(const std::vector<double> &x, SearchKind k);
std::vector<double> pack(const SearchWitness &w);

struct RestartLog {
  int restart = 0;
  int iterations = 0;
  double residual = 0.0;  // Euclidean norm of the residual vector
  bool reached_threshold = false;
};

struct SearchResult {
  std::string verdict;  // "found" or "not_found_below_threshold"
  double best_residual = 0.0;
  int best_restart = -1;
  SearchWitness witness;
  ValidationReport verification;  // independent re-validation of the witness
  std::vector<RestartLog> log;
  bool evidence_only = true;  // a negative verdict is numerical evidence, not proof
};

struct LocalResult {
  std::vector<double> x;
  double residual = 0.0;
  int iterations = 0;
};

/// Levenberg-Marquardt from x0 with nu-doubling damping and the scale
/// projection after each accepted step.
LocalResult levenberg_marquardt(std::vector<double> x0, const SearchProblem &p);

/// Random start for restart k; deterministic in (seed, k).
std::vector<double> random_start(const SearchProblem &p, int k);

SearchResult minimize(const SearchProblem &p);

/// Independent checks of a witness: closure through the exterior derivative
/// and validation of the structure at tolerance tol.
ValidationReport verify_witness(const LieAlgebra &g, const SearchWitness &w, double tol = 1e-8);

/// Exact check of the four listed 5-dimensional examples against the
/// conditions for a symplectic half-flat lift, and of their t = 1 lifts.
ValidationReport verify_listed_examples();

}  // namespace halfflat
