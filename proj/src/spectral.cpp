#include "qgp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>

#include "qgp/error.hpp"
#include "qgp/numerics.hpp"

namespace qgp {

TimeGrid TimeGrid::uniform(double start, double end, std::size_t count) {
  if (count < 2 || !(end > start)) {
    throw Error(ErrorKind::InvalidParams, "TimeGrid::uniform needs end > start and at least two samples");
  }
  TimeGrid g;
  g.samples.resize(count);
  const double h = (end - start) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) g.samples[k] = start + h * static_cast<double>(k);
  g.samples.back() = end;
  return g;
}

TimeGrid TimeGrid::from_samples(std::vector<double> samples) {
  if (samples.size() < 2) throw Error(ErrorKind::InvalidParams, "TimeGrid needs at least two samples");
  for (std::size_t k = 1; k < samples.size(); ++k) {
    if (!(samples[k] > samples[k - 1])) {
      throw Error(ErrorKind::InvalidParams, "TimeGrid samples must be strictly increasing");
    }
  }
  return TimeGrid{std::move(samples)};
}

double TimeGrid::step() const { return (end() - start()) / static_cast<double>(size() - 1); }

bool TimeGrid::contains(double tau) const {
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(start()), std::abs(end())));
  return tau >= start() - slack && tau <= end() + slack;
}

namespace {

// Smallest |<phi_n(tau_k)|phi_n(tau_k+1)>| accepted between samples.
constexpr double kMinContinuity = 0.99;

// Greedy assignment on the overlap matrix: repeatedly take the largest
// remaining |<prev_i|new_j>|. Returns perm with new column perm[i] -> level i.
std::vector<std::size_t> match_levels(const Matrix& prev, const Matrix& next, double& weakest) {
  const std::size_t n = prev.dim();
  std::vector<std::tuple<double, std::size_t, std::size_t>> entries;
  entries.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector a = prev.column(i);
    for (std::size_t j = 0; j < n; ++j) entries.emplace_back(std::abs(inner(a, next.column(j))), i, j);
  }
  std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) { return std::get<0>(x) > std::get<0>(y); });
  std::vector<std::size_t> perm(n, n);
  std::vector<bool> used(n, false);
  weakest = 1.0;
  for (const auto& [ov, i, j] : entries) {
    if (perm[i] != n || used[j]) continue;
    perm[i] = j;
    used[j] = true;
    weakest = std::min(weakest, ov);
  }
  return perm;
}

Matrix in_eigenbasis(const Matrix& op, const Matrix& vectors) { return vectors.adjoint() * op * vectors; }

// Fills gamma (and gamma_dot when h'' samples exist) from the frame's vectors.
void compute_connection(SpectralFrame& f) {
  const std::size_t count = f.size();
  const std::size_t n = f.dim;
  const auto& tau = f.grid.samples;
  f.gamma.assign(count, Matrix(n));
  f.gamma_dot.clear();
  const bool analytic = !f.dh.empty();
  const Complex i_unit(0.0, 1.0);

  for (std::size_t k = 0; k < count; ++k) {
    const auto [first, len] = numerics::stencil(k, count);
    const auto w = numerics::fd_weights(tau[k], std::span<const double>(tau).subspan(first, len), 1);
    // Derivative of each eigenvector column by finite differences.
    Matrix dv(n);
    for (std::size_t s = 0; s < len; ++s) {
      const Matrix& v = f.vectors[first + s];
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) dv(r, c) += w[s] * v(r, c);
    }
    const Matrix overlap = f.vectors[k].adjoint() * dv;  // <phi_n|phi_m'>
    Matrix& g = f.gamma[k];
    if (analytic) {
      const Matrix hd = in_eigenbasis(f.dh[k], f.vectors[k]);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          if (a == b) {
            g(a, a) = (i_unit * overlap(a, a)).real();
          } else {
            g(a, b) = i_unit * hd(a, b) / (f.energies[k][b] - f.energies[k][a]);
          }
        }
    } else {
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) g(a, b) = i_unit * overlap(a, b);
      for (std::size_t a = 0; a < n; ++a) g(a, a) = g(a, a).real();
    }
  }

  if (!analytic || f.d2h.empty()) return;
  // d/dtau <phi_n|h'|phi_m> = h''_nm + i [gamma, h']_nm in the eigenbasis.
  f.gamma_dot.assign(count, Matrix(n));
  for (std::size_t k = 0; k < count; ++k) {
    const Matrix hd = in_eigenbasis(f.dh[k], f.vectors[k]);
    const Matrix hdd = in_eigenbasis(f.d2h[k], f.vectors[k]);
    const Matrix xdot = hdd + i_unit * commutator(f.gamma[k], hd);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        const double gap = f.energies[k][b] - f.energies[k][a];
        const double gap_rate = hd(b, b).real() - hd(a, a).real();
        f.gamma_dot[k](a, b) = i_unit * xdot(a, b) / gap - f.gamma[k](a, b) * gap_rate / gap;
      }
  }
}

}  // namespace

SpectralFrame build_frame(const HamiltonianModel& model, const TimeGrid& grid, const FrameOptions& options) {
  if (grid.size() < 2) throw Error(ErrorKind::InvalidParams, "build_frame: grid needs at least two samples");
  const std::size_t n = model.dim;
  SpectralFrame f;
  f.grid = grid;
  f.dim = n;
  f.energies.resize(grid.size());
  f.vectors.resize(grid.size());
  f.min_gap = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Matrix h = model.evaluate(grid.samples[k]);
    if (h.dim() != n) throw Error(ErrorKind::InvalidParams, "build_frame: model dimension mismatch");
    EigenSystem es = eigh(h);
    std::vector<double> energies = es.values;
    Matrix vectors = es.vectors;
    if (k > 0) {
      double weakest = 1.0;
      const auto perm = match_levels(f.vectors[k - 1], es.vectors, weakest);
      if (weakest < 0.5) {
        throw Error(ErrorKind::TrackingAmbiguity, "build_frame: overlap " + std::to_string(weakest) +
                                                      " between samples at tau = " +
                                                      std::to_string(grid.samples[k]) + "; refine the grid");
      }
      for (std::size_t lvl = 0; lvl < n; ++lvl) {
        energies[lvl] = es.values[perm[lvl]];
        Vector v = es.vectors.column(perm[lvl]);
        const Complex ov = inner(f.vectors[k - 1].column(lvl), v);
        f.min_overlap = std::min(f.min_overlap, std::abs(ov));
        const Complex phase = std::conj(ov) / std::abs(ov);
        for (auto& z : v) z *= phase;
        vectors.set_column(lvl, v);
      }
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) f.min_gap = std::min(f.min_gap, std::abs(energies[a] - energies[b]));
    f.energies[k] = std::move(energies);
    f.vectors[k] = std::move(vectors);
  }
  if (n > 1 && f.min_gap < options.gap_floor) {
    throw Error(ErrorKind::GapClosure, "build_frame: minimum gap " + std::to_string(f.min_gap) +
                                           " below floor " + std::to_string(options.gap_floor));
  }
  if (f.min_overlap < kMinContinuity) {
    throw Error(ErrorKind::TrackingAmbiguity, "build_frame: eigenvector overlap " + std::to_string(f.min_overlap) +
                                                  " between adjacent samples is below " +
                                                  std::to_string(kMinContinuity) + "; refine the grid");
  }

  if (options.use_model_derivatives && model.derivative) {
    f.dh.reserve(grid.size());
    for (double tau : grid.samples) f.dh.push_back(model.derivative(tau));
    if (model.second_derivative) {
      f.d2h.reserve(grid.size());
      for (double tau : grid.samples) f.d2h.push_back(model.second_derivative(tau));
    }
  }
  compute_connection(f);
  return f;
}

SpectralFrame regauge(const SpectralFrame& frame, const std::function<double(std::size_t, double)>& f) {
  SpectralFrame out = frame;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double tau = out.grid.samples[k];
    for (std::size_t lvl = 0; lvl < out.dim; ++lvl) {
      const Complex phase = std::polar(1.0, f(lvl, tau));
      for (std::size_t r = 0; r < out.dim; ++r) out.vectors[k](r, lvl) *= phase;
    }
  }
  compute_connection(out);
  return out;
}

Complex gamma_at(const SpectralFrame& frame, std::size_t n, std::size_t m, double tau) {
  if (n >= frame.dim || m >= frame.dim) throw Error(ErrorKind::OutOfRange, "gamma_at: level index out of range");
  if (!frame.grid.contains(tau)) throw Error(ErrorKind::OutOfRange, "gamma_at: tau outside the frame grid");
  const auto [i, t] = numerics::locate(frame.grid.samples, tau);
  const Complex a = frame.gamma[i](n, m), b = frame.gamma[i + 1](n, m);
  if (n == m || std::abs(a) == 0.0 || std::abs(b) == 0.0) return (1.0 - t) * a + t * b;
  // Modulus and phase separately, so a rotating coupling keeps its size.
  const double r = (1.0 - t) * std::abs(a) + t * std::abs(b);
  return std::polar(r, std::arg(a) + t * numerics::wrap_to_pi(std::arg(b) - std::arg(a)));
}

PhaseSeries theta_series(const SpectralFrame& frame, std::size_t m, std::size_t n) {
  if (m == n) throw Error(ErrorKind::InvalidParams, "theta_series: levels must differ");
  if (m >= frame.dim || n >= frame.dim) throw Error(ErrorKind::OutOfRange, "theta_series: level out of range");
  const std::size_t count = frame.size();
  std::vector<double> arg(count), integrand(count);
  for (std::size_t k = 0; k < count; ++k) {
    const Complex g = frame.gamma[k](m, n);
    if (std::abs(g) < 1e-12) {
      throw Error(ErrorKind::UndefinedArg, "theta_series: |gamma_" + std::to_string(m) + std::to_string(n) +
                                               "| vanishes at tau = " + std::to_string(frame.grid.samples[k]));
    }
    arg[k] = std::arg(g);
    integrand[k] = frame.energies[k][m] - frame.energies[k][n] + frame.gamma[k](n, n).real() -
                   frame.gamma[k](m, m).real();
  }
  PhaseSeries out;
  const auto unwrapped = numerics::unwrap(arg, &out.max_increment);
  out.coarse = out.max_increment > 0.5 * std::numbers::pi;
  out.values = numerics::cumulative_integral(frame.grid.samples, integrand);
  for (std::size_t k = 0; k < count; ++k) out.values[k] += unwrapped[k];
  return out;
}

double theta_mn(const SpectralFrame& frame, std::size_t m, std::size_t n, double tau) {
  if (!frame.grid.contains(tau)) throw Error(ErrorKind::OutOfRange, "theta_mn: tau outside the frame grid");
  const PhaseSeries s = theta_series(frame, m, n);
  return numerics::lerp_at(frame.grid.samples, s.values, tau);
}

AdiabaticTrajectory adiabatic_trajectory(const SpectralFrame& frame, std::size_t m) {
  if (m >= frame.dim) throw Error(ErrorKind::OutOfRange, "adiabatic_trajectory: level out of range");
  const std::size_t count = frame.size();
  std::vector<double> integrand(count);
  for (std::size_t k = 0; k < count; ++k) integrand[k] = frame.energies[k][m] - frame.gamma[k](m, m).real();
  AdiabaticTrajectory t;
  t.grid = frame.grid;
  t.level = m;
  t.phases = numerics::cumulative_integral(frame.grid.samples, integrand);
  t.states.resize(count);
  for (std::size_t k = 0; k < count; ++k) t.states[k] = std::polar(1.0, -t.phases[k]) * frame.state(k, m);
  return t;
}

}  // namespace qgp
