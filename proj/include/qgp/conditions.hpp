#pragma once

// Adiabaticity criteria: traditional gap ratio, the QGP-corrected condition,
// the Rydberg-Ritz premise, the constant-coupling Pi matrix and the
// theorem's probability-floor arithmetic.

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qgp/linalg.hpp"
#include "qgp/spectral.hpp"

namespace qgp {

inline constexpr double kDefaultDelta = 0.1;
inline constexpr double kTraditionalThreshold = 0.1;

/// How k (numerator) and n (denominator) are paired for N > 2.
/// Conservative: max_k |gamma_km| / min_n |e_n - e_m + Delta_mn| per sample.
/// Strict: k = n.
enum class Pairing { Conservative, Strict };

struct ConditionVerdict {
  double max_ratio = 0.0;
  double tau_at_max = 0.0;
  double threshold = 0.0;
  bool pass = true;
};

/// max over n != m and the grid of |gamma_nm| / |e_n - e_m|.
ConditionVerdict traditional_condition(const SpectralFrame& frame, std::size_t m,
                                       double threshold = kTraditionalThreshold);

/// Passes iff the max ratio is <= delta / sqrt(N - 1). Pairs whose coupling
/// vanishes on the whole grid are ignored; a coupled pair with an undefined
/// Delta at a sample where the numerator exceeds 1e-12 raises UndefinedArg.
ConditionVerdict new_condition(const SpectralFrame& frame, std::size_t m, double delta = kDefaultDelta,
                               Pairing pairing = Pairing::Conservative);

/// Same test for a system with constant |gamma_kl| and constant theta_dot_mn
/// (e_n - e_m + Delta_mn = -theta_dot_mn).
ConditionVerdict new_condition_constant(const std::vector<std::vector<double>>& coupling,
                                        const std::vector<std::vector<double>>& theta_dot, std::size_t m,
                                        double delta = kDefaultDelta, Pairing pairing = Pairing::Conservative);

/// Per-sample values for one pair (m, n).
struct PairSeries {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> gap;                // e_n - e_m
  std::vector<double> gamma_abs;          // |gamma_nm|
  std::vector<double> delta_qgp;          // Delta_mn, NaN where undefined
  std::vector<double> traditional_ratio;  // |gamma_nm| / |e_n - e_m|
  std::vector<double> new_ratio;          // |gamma_nm| / |e_n - e_m + Delta_mn|
};

struct ConditionOptions {
  double delta = kDefaultDelta;
  double traditional_threshold = kTraditionalThreshold;
};

struct ConditionReport {
  std::string label;
  std::size_t level = 0;
  std::size_t dim = 0;
  TimeGrid grid;
  std::vector<PairSeries> pairs;
  ConditionVerdict traditional;
  ConditionVerdict conservative;
  ConditionVerdict strict;
  double delta = kDefaultDelta;
  double floor = 0.0;  // (1 - delta)^2
  std::optional<double> observed_min_probability;
};

ConditionReport condition_report(const SpectralFrame& frame, std::size_t m, const ConditionOptions& options = {},
                                 std::string label = {});

/// Header `tau,gap,|gamma|,delta_qgp,traditional_ratio,new_ratio`; one row per
/// sample per pair, pairs in increasing n. Floats use 17 significant digits.
void write_conditions_csv(std::ostream& out, const ConditionReport& report);

std::string condition_summary(const ConditionReport& report);

struct RrcpResult {
  bool holds = false;
  double max_violation = 0.0;
  std::vector<double> omega;  // theta_dot_mn = omega_m - omega_n, omega_{N-1} = 0
};

/// NotAntisymmetric unless theta_dot is antisymmetric within 1e-8.
RrcpResult rrcp_check(const std::vector<std::vector<double>>& theta_dot);

/// Self-adjoint matrix with diagonal omega_k and off-diagonal |gamma_kl|.
struct PiMatrix {
  std::vector<double> omegas;
  std::vector<std::vector<double>> couplings;  // symmetric, nonnegative, zero diagonal

  std::size_t dim() const { return omegas.size(); }
  /// InvalidParams unless the invariants hold.
  void validate() const;
  Matrix matrix() const;
};

struct PiBound {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> bound;        // sqrt(sum_{k != m} 2 |gamma_km|^2)
  // Nearest-eigenvalue pairing: always within the residual norm, so the
  // bound holds for it whenever the arithmetic is right.
  std::vector<double> nearest_shift;
  // Sorted pairing: ascending eta against ascending omega.
  std::vector<double> sorted_shift;
  std::vector<double> margin;  // bound - nearest_shift
  bool holds = true;           // every nearest_shift <= bound
  bool sorted_holds = true;    // every sorted_shift <= bound
  bool nearest_is_bijection = true;
  bool ambiguous = false;      // Gershgorin discs of distinct levels overlap
};

/// With throw_on_ambiguity set, ambiguous inputs raise MatchingAmbiguity
/// instead of being reported.
PiBound pi_bound(const PiMatrix& pi, bool throw_on_ambiguity = false);

/// sum_k |U_mk|^2 exp(i eta_k tau), the m-th component of exp(i Pi tau) e_m.
Complex constant_case_solution(const PiMatrix& pi, std::size_t m, double tau);

/// Pi for dc/dtau = i M c with M_kl = |gamma_kl| exp(i theta_dot_kl tau):
/// after c_k = exp(i omega_k tau) c'_k the generator is constant with
/// diagonal -omega_k.
PiMatrix pi_from_constant_system(const std::vector<std::vector<double>>& coupling,
                                 const std::vector<std::vector<double>>& theta_dot);

struct TheoremInputs {
  std::size_t levels = 2;  // N
  std::size_t terms = 1;   // p
  double derivative_bound = 1.0;  // B
  double max_amplitude = 0.0;     // D
  double omega_min = 1.0;
};

struct TheoremBound {
  bool applicable = false;
  std::string violated;  // the failed premise when not applicable
  double eps_prime = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double floor = 0.0;
};

/// eps' = 1 / omega_min, eps = 2 p N (N - 1) B D eps', delta = eps / (1 - eps'),
/// floor = (1 - delta)^2. Needs eps' < 1 and eps + eps' <= 1.
TheoremBound theorem_bound(const TheoremInputs& inputs);

}  // namespace qgp
