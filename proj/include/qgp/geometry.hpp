#pragma once

// Quantum geometric potential (QGP), Bloch-sphere geodesic curvature,
// Berry-phase loop integrals and time reparametrizations.

#include <cstddef>
#include <functional>
#include <vector>

#include "qgp/models.hpp"
#include "qgp/spectral.hpp"

namespace qgp {

inline constexpr std::size_t kLowerLevel = 0;
inline constexpr std::size_t kUpperLevel = 1;

/// Delta_mn = gamma_mm - gamma_nn + d/dtau arg gamma_nm, per sample.
struct QgpSeries {
  TimeGrid grid;
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> delta;
  std::vector<double> gamma_abs;
  std::vector<double> ratio;  // Delta / (2 |gamma|)
  std::vector<bool> valid;    // false where the coupling vanishes

  bool all_valid() const;
};

/// The arg rate is Im(gamma_dot / gamma) when the frame carries h'' data,
/// otherwise a finite difference of the unwrapped argument. Samples with
/// |gamma_nm| <= 1e-12 (or next to one, for finite differences) are masked;
/// UndefinedArg if none survive.
QgpSeries qgp_series(const SpectralFrame& frame, std::size_t m, std::size_t n);

struct SphereCurve {
  std::function<double(double)> theta;
  std::function<double(double)> phi;
  // Optional exact derivatives; central differences are used when absent.
  std::function<double(double)> theta_d1, theta_d2, phi_d1, phi_d2;

  static SphereCurve from(const SmoothFunction& theta, const SmoothFunction& phi);
  static SphereCurve sampled(std::function<double(double)> theta, std::function<double(double)> phi);

  struct Jet {
    double theta, theta_d1, theta_d2, phi, phi_d1, phi_d2;
  };
  Jet jet(double tau) const;
};

/// rho = (r x dr/ds) . d2r/ds2 for r = n(theta, phi), written in terms of the
/// tau derivatives of theta and phi. SingularPoint when the speed < 1e-10.
double geodesic_curvature(const SphereCurve& curve, double tau);

enum class DerivativeMode { Analytic, FiniteDifference };

struct IdentityCheck {
  double max_deviation = 0.0;
  double tau_at_max = 0.0;
  std::size_t samples_checked = 0;
};

/// max over the grid of |Delta_{+-} / (2|gamma_{+-}|) - rho|.
IdentityCheck qgp_curvature_identity(const BlochCurveModel& curve, const TimeGrid& grid, DerivativeMode mode);

struct BerryDifference {
  double delta_integral = 0.0;  // closed-loop integral of Delta_mn
  double berry_m = 0.0;         // closed-loop integral of gamma_mm, single-valued gauge
  double berry_n = 0.0;
  long winding = 0;             // of gamma_nm in that gauge
  double winding_raw = 0.0;
  double residual = 0.0;        // |delta_integral - (berry_m - berry_n) - 2 pi winding|
};

/// The frame must close: NotClosed unless the eigenprojectors and energies
/// of m and n return to their initial values. The loop is first moved to a
/// single-valued gauge, so the Berry integrals are the holonomy phases.
BerryDifference berry_difference(const SpectralFrame& frame, std::size_t m, std::size_t n);

/// Strictly increasing time map tau -> f(tau).
struct TimeMap {
  std::function<double(double)> forward;
  std::function<double(double)> rate;       // f'
  std::function<double(double)> curvature;  // f'', optional

  static TimeMap identity();
};

/// h'(tau') = h(f^{-1}(tau')) for tau' in [f(lo), f(hi)], with derivatives
/// carried through the chain rule.
HamiltonianModel reparametrized(const HamiltonianModel& model, const TimeMap& map, double lo, double hi);

struct ReparamCheck {
  double max_deviation = 0.0;
  double tau_at_max = 0.0;
};

/// Rebuilds the frame of h o f^{-1} on the mapped grid {f(tau_k)} and returns
/// max |(Delta/|gamma|)(tau_k) - (Delta'/|gamma'|)(f(tau_k))|.
ReparamCheck reparam_invariance_check(const HamiltonianModel& model, const SpectralFrame& frame, std::size_t m,
                                      std::size_t n, const TimeMap& map);

/// |gamma_nm(tau)| from a single diagonalization (gauge independent).
double coupling_magnitude(const HamiltonianModel& model, std::size_t n, std::size_t m, double tau);

struct FlatReparam {
  bool identity = false;
  std::vector<double> new_tau;  // uniform grid in the new time
  std::vector<double> old_tau;  // corresponding original times
  SpectralFrame frame;          // frame of the reparametrized model
  std::vector<double> combination;  // e'_- - e'_+ + Delta'_{+-}
  double mean = 0.0;
  double max_deviation = 0.0;    // max |combination - mean|
  double total_variation = 0.0;
};

/// Arclength reparametrization of a two-level model on [start, end]: the new
/// time is proportional to int |gamma_{+-}|, so |gamma'| is constant.
FlatReparam reparametrize_flat(const HamiltonianModel& model, double start, double end,
                               std::size_t count = kDefaultGridSize, const FrameOptions& options = {});

}  // namespace qgp
