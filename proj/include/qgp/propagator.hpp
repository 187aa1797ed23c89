#pragma once

// Exact dynamics: Schrodinger frame, adiabatic-coefficient frame and
// constant-generator exponentials.

#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "qgp/linalg.hpp"
#include "qgp/models.hpp"
#include "qgp/spectral.hpp"

namespace qgp {

struct StepperOptions {
  double tol = 1e-10;       // local error per accepted step
  double min_step = 1e-12;  // StepUnderflow below this
  /// When nonzero, every grid interval is split into this many equal steps
  /// and no error control is done.
  std::size_t fixed_substeps = 0;
};

enum class EvolutionMethod { Schrodinger, Coefficients, Exact };

std::string_view to_string(EvolutionMethod method);

struct EvolutionStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  double max_norm_drift = 0.0;  // max |norm - 1|
};

struct EvolutionResult {
  TimeGrid grid;
  std::vector<Vector> states;  // amplitudes, or coefficients c_n for the coefficient frame
  std::vector<double> norms;
  EvolutionMethod method = EvolutionMethod::Schrodinger;
  EvolutionStats stats;
};

/// Integrates i d/dtau psi = G(tau) psi from grid.start() with the
/// exponential midpoint rule. Each grid interval is covered by substeps
/// whose size is controlled by comparing one step against two half steps;
/// the two-half-step result is kept. States are never renormalized.
EvolutionResult evolve_generator(const std::function<Matrix(double)>& generator, const Vector& psi0,
                                 const TimeGrid& grid, const StepperOptions& options = {},
                                 EvolutionMethod method = EvolutionMethod::Schrodinger);

/// psi0 must be normalized within 1e-12 (InvalidParams otherwise).
EvolutionResult evolve_schrodinger(const HamiltonianModel& model, const Vector& psi0, const TimeGrid& grid,
                                   const StepperOptions& options = {});

/// Per-sample M(tau): zero diagonal, M_mn = |gamma_mn| exp(i theta_mn).
struct CouplingMatrixM {
  TimeGrid grid;
  std::vector<Matrix> values;
  std::vector<std::vector<bool>> coupled;  // [m][n]: false when gamma_mn vanishes on the whole grid
  // Per pair m < n, indexed [m][n]; empty when uncoupled.
  std::vector<std::vector<std::vector<double>>> magnitude;   // |gamma_mn|
  std::vector<std::vector<std::vector<double>>> theta;       // theta_mn
  std::vector<std::vector<std::vector<double>>> theta_rate;  // e_m - e_n - Delta_mn

  /// M at arbitrary tau: |gamma| linear, theta cubic Hermite with the exact rate.
  Matrix at(double tau) const;
};

/// UndefinedArg when a pair is coupled somewhere but gamma_mn vanishes at a
/// grid sample (theta undefined there).
CouplingMatrixM coupling_matrix(const SpectralFrame& frame);

/// Solves dc_m/dtau = i sum_n c_n M_mn on the frame grid. c0 must be normalized.
EvolutionResult evolve_coefficients(const SpectralFrame& frame, const Vector& c0, const StepperOptions& options = {});

/// sum_n c_n(tau) |Phi^adia_n(tau)> at every sample.
std::vector<Vector> reconstruct_states(const SpectralFrame& frame, const EvolutionResult& coefficients);

/// exp(-i H tau) psi0.
Vector evolve_exact_constant(const Matrix& h, const Vector& psi0, double tau);

/// Basis vector e_m of dimension n.
Vector basis_vector(std::size_t n, std::size_t m);

}  // namespace qgp
