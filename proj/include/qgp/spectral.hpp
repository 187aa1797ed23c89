#pragma once

// Gauge-continuous instantaneous eigenframes over a time grid.

#include <cstddef>
#include <functional>
#include <vector>

#include "qgp/linalg.hpp"
#include "qgp/models.hpp"

namespace qgp {

inline constexpr std::size_t kDefaultGridSize = 4096;

struct TimeGrid {
  std::vector<double> samples;

  static TimeGrid uniform(double start, double end, std::size_t count = kDefaultGridSize);
  /// Throws InvalidParams unless the samples are strictly increasing.
  static TimeGrid from_samples(std::vector<double> samples);

  std::size_t size() const { return samples.size(); }
  double start() const { return samples.front(); }
  double end() const { return samples.back(); }
  /// Mean spacing.
  double step() const;
  bool contains(double tau) const;
};

struct FrameOptions {
  double gap_floor = 1e-8;
  /// When false the model's derivatives are ignored and gamma comes from
  /// finite differences of the gauge-fixed eigenvectors.
  bool use_model_derivatives = true;
};

/// Eigenframe sampled on a grid. Levels are tracked by continuity (index n
/// is the level that started n-th lowest), eigenvector phases follow
/// discrete parallel transport anchored at the first sample.
struct SpectralFrame {
  TimeGrid grid;
  std::size_t dim = 0;
  std::vector<std::vector<double>> energies;  // [sample][level]
  std::vector<Matrix> vectors;                // [sample], columns are levels
  std::vector<Matrix> gamma;                  // [sample], gamma_nm = i <phi_n|phi_m'>
  /// Off-diagonal d gamma_nm / d tau, present only when h'' was available.
  std::vector<Matrix> gamma_dot;
  std::vector<Matrix> dh;   // h'(tau_k), when the model supplied it
  std::vector<Matrix> d2h;  // h''(tau_k), when the model supplied it
  double min_gap = 0.0;
  double min_overlap = 1.0;  // min_k |<phi_n(tau_k)|phi_n(tau_k+1)>|

  std::size_t size() const { return grid.size(); }
  double energy(std::size_t k, std::size_t n) const { return energies[k][n]; }
  Vector state(std::size_t k, std::size_t n) const { return vectors[k].column(n); }
  bool analytic_gamma() const { return !dh.empty(); }
  bool analytic_gamma_dot() const { return !gamma_dot.empty(); }
};

SpectralFrame build_frame(const HamiltonianModel& model, const TimeGrid& grid, const FrameOptions& options = {});

/// Multiplies |phi_n(tau)> by exp(i f(n, tau)) and recomputes gamma from the
/// rephased vectors. f(n, tau_start) must vanish.
SpectralFrame regauge(const SpectralFrame& frame, const std::function<double(std::size_t, double)>& f);

/// gamma_nm at tau, linear between samples. OutOfRange outside the grid.
Complex gamma_at(const SpectralFrame& frame, std::size_t n, std::size_t m, double tau);

struct PhaseSeries {
  std::vector<double> values;
  double max_increment = 0.0;  // largest single-step change of arg gamma
  bool coarse = false;         // max_increment > pi/2
};

/// theta_mn(tau_k) = int_0^tau (e_m - e_n + gamma_nn - gamma_mm) + arg gamma_mn(tau_k)
/// with the argument unwrapped from the first sample.
PhaseSeries theta_series(const SpectralFrame& frame, std::size_t m, std::size_t n);

double theta_mn(const SpectralFrame& frame, std::size_t m, std::size_t n, double tau);

struct AdiabaticTrajectory {
  TimeGrid grid;
  std::size_t level = 0;
  std::vector<double> phases;  // int_0^tau (e_m - gamma_mm)
  std::vector<Vector> states;  // exp(-i phase) |phi_m>
};

AdiabaticTrajectory adiabatic_trajectory(const SpectralFrame& frame, std::size_t m);

}  // namespace qgp
