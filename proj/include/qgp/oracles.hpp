#pragma once

// Closed-form reference quantities for the rotating-spin and robust models,
// plus overlap measurements of simulated runs.

#include <cstddef>
#include <vector>

#include "qgp/models.hpp"
#include "qgp/propagator.hpp"
#include "qgp/spectral.hpp"

namespace qgp {

enum class FidelitySource { Simulated, ClosedForm };

struct FidelitySeries {
  TimeGrid grid;
  std::vector<double> values;
  FidelitySource source = FidelitySource::Simulated;

  double min() const;
};

/// |<Phi^adia_m(tau)|Phi(tau)>| per sample. GridMismatch unless both series
/// share the grid and dimension.
FidelitySeries fidelity(const EvolutionResult& result, const AdiabaticTrajectory& trajectory);

/// |<phi_m(tau)|psi(tau)>|^2 per sample.
std::vector<double> occupation(const EvolutionResult& result, const SpectralFrame& frame, std::size_t m);

/// A = sqrt((1 - K)^2 eta^2 + xi^2).
double rotating_spin_A(const RotatingSpinParams& params);

/// F(tau) = sqrt(cos^2(A tau) + sin^2(A tau) [((1 - K) eta cos(theta) + xi sin(theta)) / A]^2).
/// DegenerateA when A = 0.
double closed_form_F(const RotatingSpinParams& params, double tau);

FidelitySeries closed_form_F(const RotatingSpinParams& params, const TimeGrid& grid);

/// |((1 - K) eta cos(theta) + xi sin(theta)) / A|, attained at A tau = pi/2.
double closed_form_F_min(const RotatingSpinParams& params);

enum class Orbit { Plus, Minus };

/// Probability of staying in the adiabatic orbit for the robust model
/// started in rho^adi(0). The expression is the same for both orbits.
/// InvalidParams when eta eta0 + eta eta2 + eta2 eta1 < 0.
double closed_form_P(const RobustModelParams& params, Orbit orbit, double tau);

/// 1 - (eta + eta1)^2 / N(0)^2.
double p_min(const RobustModelParams& params);

/// U(tau) = exp(-i eta sz tau) exp(i eta2 sx tau) exp(-i ((eta0 + eta2) sx + eta1 sz) tau).
Matrix robust_propagator(const RobustModelParams& params, double tau);

struct RobustQgpRatio {
  double ratio = 0.0;           // int |Delta_{+-}| / int |gamma_{+-}| over [0, 2 pi]
  double pointwise_min = 0.0;   // range of |Delta| / |gamma| over the samples
  double pointwise_max = 0.0;
  double reference = 0.0;       // eta0 / eta1
  bool sign_matches = false;    // sign(Delta_{+-}) = sign(E_- - E_+) at every sample
  bool within_factor_two = false;
};

/// OutOfRegime unless eta2 >= 10 eta.
RobustQgpRatio qgp_ratio_robust(const RobustModelParams& params);

/// Angular frequency in {2 pi j / T} with the largest DFT magnitude of the
/// mean-removed samples (uniform grid).
double dominant_angular_frequency(const TimeGrid& grid, const std::vector<double>& values);

/// Bloch vector (<sx>, <sy>, <sz>) of a two-level state.
std::vector<double> bloch_vector(const Vector& state);

}  // namespace qgp
