#pragma once

// Hamiltonian models: tau -> Hermitian matrix in dimensionless units, with
// optional closed-form derivatives and eigenframes.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qgp/linalg.hpp"

namespace qgp {

/// Closed-form eigensystem of a model at one instant; levels ascending.
struct AnalyticFrame {
  std::vector<double> energies;
  Matrix vectors;  // columns
  Matrix gamma;    // gamma_nm = i <phi_n | d/dtau phi_m>
};

struct HamiltonianModel {
  std::size_t dim = 0;
  std::function<Matrix(double)> evaluate;
  std::function<Matrix(double)> derivative;         // optional dh/dtau
  std::function<Matrix(double)> second_derivative;  // optional d2h/dtau2
  std::function<AnalyticFrame(double)> analytic_frame;
  std::string label;

  bool has_derivative() const { return static_cast<bool>(derivative); }
  bool has_second_derivative() const { return static_cast<bool>(second_derivative); }

  /// Copy with derivative and analytic-frame information removed, forcing
  /// downstream code onto finite differences.
  HamiltonianModel without_derivatives() const;
};

/// Smooth scalar function of tau: polynomial plus a sum of sinusoids
/// amplitude * sin(omega * tau + phase). Values and two derivatives are exact.
struct SmoothFunction {
  struct Sinusoid {
    double amplitude = 0.0;
    double omega = 0.0;
    double phase = 0.0;
  };
  std::vector<double> poly;  // poly[k] * tau^k
  std::vector<Sinusoid> waves;

  static SmoothFunction constant(double c);
  static SmoothFunction polynomial(std::vector<double> coefficients);
  static SmoothFunction sinusoid(double amplitude, double omega, double phase, double offset = 0.0);

  double value(double tau) const;
  double d1(double tau) const;
  double d2(double tau) const;
};

struct RotatingSpinParams {
  double eta = 1.0;  // static field along z
  double xi = 0.0;   // rotating transverse field
  double K = 1.0;    // sweep-rate multiplier; the field rotates at 2 K eta

  /// Rescales (eta, xi) so that eta^2 + xi^2 = 1.
  static RotatingSpinParams normalized(double eta, double xi, double K);

  double energy() const;  // sqrt(eta^2 + xi^2)
  double cos_theta() const;
  double sin_theta() const;
  double rotation_rate() const { return 2.0 * K * eta; }
};

struct RobustModelParams {
  double eta = 1.0;
  double eta0 = 20.0;
  double eta1 = 1.0;
  double eta2 = 100.0;

  /// The parameter set used for the published figure.
  static RobustModelParams figure1() { return {1.0, 20.0, 1.0, 100.0}; }

  bool strong_transverse_over_eta() const;   // eta0 / eta >= 10
  bool strong_transverse_over_eta1() const;  // eta0 / eta1 >= 10
  /// Half the instantaneous gap, N(tau).
  double envelope(double tau) const;
};

struct BlochCurveModel {
  SmoothFunction theta;
  SmoothFunction phi;
  SmoothFunction A = SmoothFunction::constant(0.0);
  SmoothFunction B = SmoothFunction::constant(1.0);
};

struct FourierTerm {
  Matrix op;  // Hermitian
  double omega = 0.0;
  double amplitude = 1.0;
  double phase = 0.0;
};

/// eta sigma_z + xi [sigma_x cos(2 K eta tau) + sigma_y sin(2 K eta tau)].
HamiltonianModel rotating_spin(const RotatingSpinParams& params);

/// eta sigma_z + R (eta0 sigma_x + eta1 S sigma_z S^dagger) R^dagger with
/// R = exp(-i eta sigma_z tau), S = exp(i eta2 sigma_x tau).
HamiltonianModel robust_model(const RobustModelParams& params);

/// A(tau) + B(tau) n(theta, phi) . sigma. Evaluation throws GapClosure when
/// B(tau) <= 0.
HamiltonianModel bloch_curve(const BlochCurveModel& curve);

/// sum_k amplitude_k cos(omega_k tau + phase_k) H_k.
HamiltonianModel fourier_nlevel(std::size_t dim, const std::vector<FourierTerm>& terms);

/// Time-independent model.
HamiltonianModel constant_model(const Matrix& h, std::string label = "constant");

/// Divides h by |E_m(0)|; the scale is recorded in the label.
HamiltonianModel normalize_by_level(const HamiltonianModel& model, std::size_t level);

/// Closed-form Bloch-curve eigenframe: lower level sin(t/2)|0> - e^{i phi}
/// cos(t/2)|1>, upper level cos(t/2)|0> + e^{i phi} sin(t/2)|1>.
AnalyticFrame bloch_analytic_frame(double A, double B, double theta, double theta_dot, double phi,
                                   double phi_dot);

}  // namespace qgp
