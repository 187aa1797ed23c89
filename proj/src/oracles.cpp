#include "qgp/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qgp/error.hpp"
#include "qgp/geometry.hpp"
#include "qgp/numerics.hpp"

namespace qgp {

namespace {

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* who) {
  bool same = a.size() == b.size();
  for (std::size_t k = 0; same && k < a.size(); ++k) {
    same = std::abs(a.samples[k] - b.samples[k]) <= 1e-12 * std::max(1.0, std::abs(a.samples[k]));
  }
  if (!same) throw Error(ErrorKind::GridMismatch, std::string(who) + ": time grids differ");
}

}  // namespace

double FidelitySeries::min() const {
  return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

FidelitySeries fidelity(const EvolutionResult& result, const AdiabaticTrajectory& trajectory) {
  require_same_grid(result.grid, trajectory.grid, "fidelity");
  FidelitySeries f;
  f.grid = result.grid;
  f.source = FidelitySource::Simulated;
  f.values.resize(result.states.size());
  for (std::size_t k = 0; k < result.states.size(); ++k) {
    if (result.states[k].size() != trajectory.states[k].size()) {
      throw Error(ErrorKind::GridMismatch, "fidelity: state dimensions differ");
    }
    f.values[k] = std::abs(inner(trajectory.states[k], result.states[k]));
  }
  return f;
}

std::vector<double> occupation(const EvolutionResult& result, const SpectralFrame& frame, std::size_t m) {
  require_same_grid(result.grid, frame.grid, "occupation");
  if (m >= frame.dim) throw Error(ErrorKind::OutOfRange, "occupation: level out of range");
  std::vector<double> p(result.states.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(inner(frame.state(k, m), result.states[k]));
  return p;
}

double rotating_spin_A(const RotatingSpinParams& p) {
  return std::hypot((1.0 - p.K) * p.eta, p.xi);
}

double closed_form_F(const RotatingSpinParams& p, double tau) {
  const double a = rotating_spin_A(p);
  if (!(a > 0.0)) throw Error(ErrorKind::DegenerateA, "closed_form_F: A = 0 (K = 1 and xi = 0)");
  const double r = ((1.0 - p.K) * p.eta * p.cos_theta() + p.xi * p.sin_theta()) / a;
  const double c = std::cos(a * tau), s = std::sin(a * tau);
  return std::sqrt(c * c + s * s * r * r);
}

FidelitySeries closed_form_F(const RotatingSpinParams& p, const TimeGrid& grid) {
  FidelitySeries f;
  f.grid = grid;
  f.source = FidelitySource::ClosedForm;
  f.values.reserve(grid.size());
  for (double tau : grid.samples) f.values.push_back(closed_form_F(p, tau));
  return f;
}

double closed_form_F_min(const RotatingSpinParams& p) {
  const double a = rotating_spin_A(p);
  if (!(a > 0.0)) throw Error(ErrorKind::DegenerateA, "closed_form_F_min: A = 0 (K = 1 and xi = 0)");
  return std::min(1.0, std::abs(((1.0 - p.K) * p.eta * p.cos_theta() + p.xi * p.sin_theta()) / a));
}

double closed_form_P(const RobustModelParams& p, Orbit, double tau) {
  const double tilde2 = p.eta * p.eta0 + p.eta * p.eta2 + p.eta2 * p.eta1;
  if (!(tilde2 >= 0.0)) {
    throw Error(ErrorKind::InvalidParams, "closed_form_P: eta*eta0 + eta*eta2 + eta2*eta1 is negative");
  }
  const double n0 = p.envelope(0.0), nt = p.envelope(tau);
  if (!(n0 > 0.0) || !(nt > 0.0)) throw Error(ErrorKind::InvalidParams, "closed_form_P: N vanishes");
  const long double bar2 = static_cast<long double>(p.eta1) * p.eta1 +
                           static_cast<long double>(p.eta0 + p.eta2) * (p.eta0 + p.eta2);
  const long double bar = std::sqrt(bar2);
  const long double c2 = std::cos(2.0L * p.eta2 * tau);
  const long double cc = std::cos(static_cast<long double>(p.eta2) * tau);
  const long double sb = std::sin(bar * tau);
  const long double s2b = std::sin(2.0L * bar * tau);
  const long double s22 = std::sin(2.0L * p.eta2 * tau);
  // Small terms first.
  long double sum = static_cast<long double>(p.eta) * tilde2 / bar * s2b * s22;
  sum -= 4.0L * p.eta * (p.eta0 + p.eta2) * tilde2 / bar2 * cc * cc * sb * sb;
  sum += 2.0L * tilde2 * (static_cast<long double>(p.eta) * p.eta0 + static_cast<long double>(p.eta) * p.eta2 -
                          static_cast<long double>(p.eta1) * p.eta2) /
         bar2 * sb * sb;
  sum += 2.0L * p.eta * p.eta1 * cc * cc;
  sum += static_cast<long double>(p.eta) * p.eta * c2;
  sum += static_cast<long double>(p.eta1) * p.eta1;
  sum += static_cast<long double>(p.eta0) * p.eta0;
  return static_cast<double>(sum / (2.0L * n0 * nt) + 0.5L);
}

double p_min(const RobustModelParams& p) {
  const double s = p.eta + p.eta1;
  const double n0sq = p.eta0 * p.eta0 + s * s;
  if (!(n0sq > 0.0)) throw Error(ErrorKind::InvalidParams, "p_min: N(0) vanishes");
  return 1.0 - s * s / n0sq;
}

Matrix robust_propagator(const RobustModelParams& p, double tau) {
  const Matrix a = expm_unitary(p.eta * pauli::z(), tau);
  const Matrix b = expm_unitary(-p.eta2 * pauli::x(), tau);
  const Matrix c = expm_unitary((p.eta0 + p.eta2) * pauli::x() + p.eta1 * pauli::z(), tau);
  return a * b * c;
}

RobustQgpRatio qgp_ratio_robust(const RobustModelParams& p) {
  if (!(p.eta2 >= 10.0 * std::abs(p.eta))) {
    throw Error(ErrorKind::OutOfRegime, "qgp_ratio_robust: needs eta2 >= 10 eta, got eta2 / eta = " +
                                            std::to_string(p.eta2 / p.eta));
  }
  // Resolve the 2 eta2 oscillation with at least 64 samples per period.
  const double span = 2.0 * std::numbers::pi;
  const std::size_t count = std::max<std::size_t>(8192, static_cast<std::size_t>(64.0 * p.eta2) + 1);
  const SpectralFrame frame = build_frame(robust_model(p), TimeGrid::uniform(0.0, span, count));
  const QgpSeries s = qgp_series(frame, kUpperLevel, kLowerLevel);

  RobustQgpRatio out;
  out.reference = p.eta0 / p.eta1;
  out.sign_matches = true;
  out.pointwise_min = std::numeric_limits<double>::infinity();
  std::vector<double> d(count), g(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (!s.valid[k]) throw Error(ErrorKind::UndefinedArg, "qgp_ratio_robust: coupling vanishes on the grid");
    d[k] = std::abs(s.delta[k]);
    g[k] = s.gamma_abs[k];
    const double pointwise = d[k] / g[k];
    out.pointwise_min = std::min(out.pointwise_min, pointwise);
    out.pointwise_max = std::max(out.pointwise_max, pointwise);
    const double energy_sign = frame.energies[k][kLowerLevel] - frame.energies[k][kUpperLevel];
    if (s.delta[k] * energy_sign <= 0.0) out.sign_matches = false;
  }
  out.ratio = numerics::cumulative_integral(s.grid.samples, d).back() /
              numerics::cumulative_integral(s.grid.samples, g).back();
  out.within_factor_two = out.ratio >= 0.5 * out.reference && out.ratio <= 2.0 * out.reference;
  return out;
}

double dominant_angular_frequency(const TimeGrid& grid, const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n != grid.size() || n < 4) throw Error(ErrorKind::GridMismatch, "dominant_angular_frequency: bad sample count");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  // Periodic extension: the last sample closes the window.
  const std::size_t len = n - 1;
  const double period = grid.end() - grid.start();
  double best = 0.0, best_mag = -1.0;
  for (std::size_t j = 1; j <= len / 2; ++j) {
    Complex acc = 0.0;
    const double w = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(len);
    for (std::size_t k = 0; k < len; ++k) acc += (values[k] - mean) * std::polar(1.0, -w * static_cast<double>(k));
    if (std::abs(acc) > best_mag) {
      best_mag = std::abs(acc);
      best = 2.0 * std::numbers::pi * static_cast<double>(j) / period;
    }
  }
  return best;
}

std::vector<double> bloch_vector(const Vector& s) {
  if (s.size() != 2) throw Error(ErrorKind::InvalidParams, "bloch_vector: two-level states only");
  const Complex cross = std::conj(s[0]) * s[1];
  return {2.0 * cross.real(), 2.0 * cross.imag(), std::norm(s[0]) - std::norm(s[1])};
}

}  // namespace qgp
