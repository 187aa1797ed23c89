#include "qgp/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qgp/error.hpp"
#include "qgp/geometry.hpp"
#include "qgp/numerics.hpp"

namespace qgp {

namespace {

void require_normalized(const Vector& v, const char* who) {
  const double nv = norm(v);
  if (!std::isfinite(nv) || std::abs(nv - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidParams, std::string(who) + ": initial vector has norm " + std::to_string(nv));
  }
}

Vector midpoint_step(const std::function<Matrix(double)>& generator, const Vector& psi, double t, double h) {
  return expm_unitary(generator(t + 0.5 * h), h) * psi;
}

}  // namespace

std::string_view to_string(EvolutionMethod method) {
  switch (method) {
    case EvolutionMethod::Schrodinger: return "schrodinger";
    case EvolutionMethod::Coefficients: return "coefficients";
    case EvolutionMethod::Exact: return "exact";
  }
  return "unknown";
}

EvolutionResult evolve_generator(const std::function<Matrix(double)>& generator, const Vector& psi0,
                                 const TimeGrid& grid, const StepperOptions& options, EvolutionMethod method) {
  if (!(options.tol > 0.0)) throw Error(ErrorKind::InvalidParams, "stepper tolerance must be positive");
  if (grid.size() < 1) throw Error(ErrorKind::InvalidParams, "empty time grid");
  EvolutionResult out;
  out.grid = grid;
  out.method = method;
  out.states.reserve(grid.size());
  out.norms.reserve(grid.size());

  Vector psi = psi0;
  auto record = [&out](const Vector& v) {
    const double nv = norm(v);
    out.states.push_back(v);
    out.norms.push_back(nv);
    out.stats.max_norm_drift = std::max(out.stats.max_norm_drift, std::abs(nv - 1.0));
  };
  record(psi);

  double step = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double a = grid.samples[k], b = grid.samples[k + 1];
    const double span = b - a;
    if (options.fixed_substeps > 0) {
      const double h = span / static_cast<double>(options.fixed_substeps);
      for (std::size_t s = 0; s < options.fixed_substeps; ++s) {
        psi = midpoint_step(generator, psi, a + h * static_cast<double>(s), h);
        ++out.stats.steps;
      }
      record(psi);
      continue;
    }

    if (step <= 0.0 || step > span) step = span;
    double t = a;
    while (t < b) {
      double h = std::min(step, b - t);
      const bool last = t + h >= b - 1e-14 * std::max(1.0, std::abs(b));
      if (last) h = b - t;
      const Vector full = midpoint_step(generator, psi, t, h);
      const Vector half = midpoint_step(generator, midpoint_step(generator, psi, t, 0.5 * h), t + 0.5 * h, 0.5 * h);
      const double err = norm(full - half);
      const double factor = err > 0.0 ? std::clamp(0.9 * std::cbrt(options.tol / err), 0.2, 5.0) : 5.0;
      if (err <= options.tol) {
        psi = half;
        t = last ? b : t + h;
        ++out.stats.steps;
        // Keep the proposal from the full step, not from a truncated final one.
        step = last && h < step ? step : h * factor;
      } else {
        ++out.stats.rejected;
        step = h * std::min(factor, 0.9);
        if (step < options.min_step) {
          throw Error(ErrorKind::StepUnderflow, "stepper: step " + std::to_string(step) + " below minimum at tau = " +
                                                    std::to_string(t));
        }
      }
    }
    record(psi);
  }
  return out;
}

EvolutionResult evolve_schrodinger(const HamiltonianModel& model, const Vector& psi0, const TimeGrid& grid,
                                   const StepperOptions& options) {
  if (psi0.size() != model.dim) throw Error(ErrorKind::InvalidParams, "evolve_schrodinger: dimension mismatch");
  require_normalized(psi0, "evolve_schrodinger");
  return evolve_generator(model.evaluate, psi0, grid, options, EvolutionMethod::Schrodinger);
}

Matrix CouplingMatrixM::at(double tau) const {
  const std::size_t n = values.empty() ? 0 : values.front().dim();
  if (!grid.contains(tau)) throw Error(ErrorKind::OutOfRange, "coupling matrix: tau outside the grid");
  const auto [i, t] = numerics::locate(grid.samples, tau);
  const double h = grid.samples[i + 1] - grid.samples[i];
  // Cubic Hermite basis on [0, 1].
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  Matrix m(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!coupled[a][b]) continue;
      const auto& mag = magnitude[a][b];
      const auto& th = theta[a][b];
      const auto& rate = theta_rate[a][b];
      const double g = (1.0 - t) * mag[i] + t * mag[i + 1];
      const double phase = h00 * th[i] + h10 * h * rate[i] + h01 * th[i + 1] + h11 * h * rate[i + 1];
      m(a, b) = std::polar(g, phase);
      m(b, a) = std::conj(m(a, b));
    }
  return m;
}

CouplingMatrixM coupling_matrix(const SpectralFrame& frame) {
  const std::size_t n = frame.dim;
  const std::size_t count = frame.size();
  const auto& tau = frame.grid.samples;
  CouplingMatrixM out;
  out.grid = frame.grid;
  out.coupled.assign(n, std::vector<bool>(n, false));
  out.magnitude.assign(n, std::vector<std::vector<double>>(n));
  out.theta.assign(n, std::vector<std::vector<double>>(n));
  out.theta_rate.assign(n, std::vector<std::vector<double>>(n));
  out.values.assign(count, Matrix(n));

  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      double peak = 0.0;
      for (std::size_t k = 0; k < count; ++k) peak = std::max(peak, std::abs(frame.gamma[k](a, b)));
      if (peak <= 1e-12) continue;
      out.coupled[a][b] = out.coupled[b][a] = true;
      const PhaseSeries th = theta_series(frame, a, b);
      const QgpSeries q = qgp_series(frame, a, b);
      auto& mag = out.magnitude[a][b];
      auto& rate = out.theta_rate[a][b];
      mag.resize(count);
      rate.resize(count);
      for (std::size_t k = 0; k < count; ++k) {
        mag[k] = std::abs(frame.gamma[k](a, b));
        rate[k] = q.valid[k] ? frame.energies[k][a] - frame.energies[k][b] - q.delta[k]
                             : numerics::derivative_at(tau, th.values, k);
        out.values[k](a, b) = std::polar(mag[k], th.values[k]);
        out.values[k](b, a) = std::conj(out.values[k](a, b));
      }
      out.theta[a][b] = th.values;
    }
  return out;
}

EvolutionResult evolve_coefficients(const SpectralFrame& frame, const Vector& c0, const StepperOptions& options) {
  if (c0.size() != frame.dim) throw Error(ErrorKind::InvalidParams, "evolve_coefficients: dimension mismatch");
  require_normalized(c0, "evolve_coefficients");
  const CouplingMatrixM m = coupling_matrix(frame);
  // dc/dtau = i M c, i.e. generator -M.
  auto generator = [&m](double tau) { return Complex(-1.0, 0.0) * m.at(tau); };
  return evolve_generator(generator, c0, frame.grid, options, EvolutionMethod::Coefficients);
}

std::vector<Vector> reconstruct_states(const SpectralFrame& frame, const EvolutionResult& coefficients) {
  if (coefficients.grid.size() != frame.size()) {
    throw Error(ErrorKind::GridMismatch, "reconstruct_states: coefficient grid differs from frame grid");
  }
  std::vector<AdiabaticTrajectory> orbits;
  orbits.reserve(frame.dim);
  for (std::size_t lvl = 0; lvl < frame.dim; ++lvl) orbits.push_back(adiabatic_trajectory(frame, lvl));
  std::vector<Vector> states(frame.size(), Vector(frame.dim));
  for (std::size_t k = 0; k < frame.size(); ++k)
    for (std::size_t lvl = 0; lvl < frame.dim; ++lvl)
      states[k] = states[k] + coefficients.states[k][lvl] * orbits[lvl].states[k];
  return states;
}

Vector evolve_exact_constant(const Matrix& h, const Vector& psi0, double tau) {
  if (psi0.size() != h.dim()) throw Error(ErrorKind::InvalidParams, "evolve_exact_constant: dimension mismatch");
  return expm_unitary(h, tau) * psi0;
}

Vector basis_vector(std::size_t n, std::size_t m) {
  if (m >= n) throw Error(ErrorKind::OutOfRange, "basis_vector: index out of range");
  Vector v(n);
  v[m] = 1.0;
  return v;
}

}  // namespace qgp
