#include "qgp/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qgp/error.hpp"
#include "qgp/numerics.hpp"

namespace qgp {

namespace {

constexpr double kCouplingFloor = 1e-12;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_pair(const SpectralFrame& frame, std::size_t m, std::size_t n, const char* who) {
  if (m == n) throw Error(ErrorKind::InvalidParams, std::string(who) + ": levels must differ");
  if (m >= frame.dim || n >= frame.dim) throw Error(ErrorKind::OutOfRange, std::string(who) + ": level out of range");
}

// Replaces masked entries by linear interpolation between the nearest valid
// neighbours (constant extrapolation at the ends).
std::vector<double> fill_masked(const std::vector<double>& tau, std::vector<double> y, const std::vector<bool>& ok) {
  const std::size_t count = y.size();
  std::vector<std::size_t> good;
  for (std::size_t k = 0; k < count; ++k)
    if (ok[k]) good.push_back(k);
  if (good.empty()) return y;
  for (std::size_t k = 0; k < count; ++k) {
    if (ok[k]) continue;
    const auto it = std::lower_bound(good.begin(), good.end(), k);
    if (it == good.begin()) {
      y[k] = y[good.front()];
    } else if (it == good.end()) {
      y[k] = y[good.back()];
    } else {
      const std::size_t lo = *(it - 1), hi = *it;
      const double t = (tau[k] - tau[lo]) / (tau[hi] - tau[lo]);
      y[k] = (1.0 - t) * y[lo] + t * y[hi];
    }
  }
  return y;
}

double central_d1(const std::function<double(double)>& f, double t) {
  const double h = 1e-3 * std::max(1.0, std::abs(t));
  return (8.0 * (f(t + h) - f(t - h)) - (f(t + 2.0 * h) - f(t - 2.0 * h))) / (12.0 * h);
}

double central_d2(const std::function<double(double)>& f, double t) {
  const double h = 1e-3 * std::max(1.0, std::abs(t));
  return (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h) - f(t - 2.0 * h)) / (12.0 * h * h);
}

Matrix matrix_d1(const std::function<Matrix(double)>& f, double t) {
  const double h = 1e-3 * std::max(1.0, std::abs(t));
  return (1.0 / (12.0 * h)) * (8.0 * (f(t + h) - f(t - h)) - (f(t + 2.0 * h) - f(t - 2.0 * h)));
}

// |gamma_nm| and its tau derivative at one instant.
struct CouplingJet {
  double value = 0.0;
  double rate = 0.0;
};

CouplingJet coupling_jet(const HamiltonianModel& model, std::size_t n, std::size_t m, double tau) {
  const EigenSystem es = eigh(model.evaluate(tau));
  const Matrix dh = model.derivative ? model.derivative(tau) : matrix_d1(model.evaluate, tau);
  const Matrix x = es.vectors.adjoint() * dh * es.vectors;
  const double gap = es.values[m] - es.values[n];
  if (std::abs(gap) < 1e-14) throw Error(ErrorKind::GapClosure, "coupling magnitude: levels touch");
  const Complex g = Complex(0.0, 1.0) * x(n, m) / gap;
  CouplingJet out;
  out.value = std::abs(g);
  if (!model.second_derivative || out.value <= kCouplingFloor) return out;

  // Diagonal gamma only rotates the phase of gamma_nm and drops out of d|gamma|.
  const std::size_t dim = model.dim;
  Matrix gamma(dim);
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b)
      if (a != b) gamma(a, b) = Complex(0.0, 1.0) * x(a, b) / (es.values[b] - es.values[a]);
  const Matrix xdot = es.vectors.adjoint() * model.second_derivative(tau) * es.vectors +
                      Complex(0.0, 1.0) * commutator(gamma, x);
  const double gap_rate = x(m, m).real() - x(n, n).real();
  const Complex gdot = Complex(0.0, 1.0) * xdot(n, m) / gap - g * gap_rate / gap;
  out.rate = (std::conj(g) * gdot).real() / out.value;
  return out;
}

// Inverts a strictly increasing map on [lo, hi] by Newton steps kept inside
// a shrinking bracket.
double invert_map(const TimeMap& map, double target, double lo, double hi) {
  double a = lo, b = hi;
  const double fa = map.forward(a) - target;
  const double fb = map.forward(b) - target;
  if (fa >= 0.0) return a;
  if (fb <= 0.0) return b;
  double x = a + (b - a) * (-fa) / (fb - fa);
  for (int it = 0; it < 200; ++it) {
    const double fx = map.forward(x) - target;
    if (fx == 0.0) return x;
    if (fx < 0.0) a = x; else b = x;
    const double d = map.rate(x);
    double next = (d > 0.0) ? x - fx / d : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x)) || b - a <= 1e-15 * std::max(1.0, std::abs(x))) {
      return next;
    }
    x = next;
  }
  return x;
}

}  // namespace

bool QgpSeries::all_valid() const {
  return std::all_of(valid.begin(), valid.end(), [](bool v) { return v; });
}

QgpSeries qgp_series(const SpectralFrame& frame, std::size_t m, std::size_t n) {
  check_pair(frame, m, n, "qgp_series");
  const std::size_t count = frame.size();
  const auto& tau = frame.grid.samples;
  QgpSeries s;
  s.grid = frame.grid;
  s.m = m;
  s.n = n;
  s.delta.assign(count, std::numeric_limits<double>::quiet_NaN());
  s.ratio.assign(count, std::numeric_limits<double>::quiet_NaN());
  s.gamma_abs.resize(count);
  s.valid.assign(count, false);

  std::vector<double> arg(count);
  for (std::size_t k = 0; k < count; ++k) {
    const Complex g = frame.gamma[k](n, m);
    s.gamma_abs[k] = std::abs(g);
    arg[k] = std::arg(g);
  }

  std::size_t good = 0;
  for (std::size_t k = 0; k < count; ++k) {
    if (s.gamma_abs[k] <= kCouplingFloor) continue;
    double rate = 0.0;
    if (frame.analytic_gamma_dot()) {
      rate = (frame.gamma_dot[k](n, m) / frame.gamma[k](n, m)).imag();
    } else {
      const auto [first, len] = numerics::stencil(k, count);
      bool usable = true;
      std::vector<double> local(len);
      for (std::size_t j = 0; j < len; ++j) {
        const std::size_t idx = first + j;
        if (s.gamma_abs[idx] <= kCouplingFloor) {
          usable = false;
          break;
        }
        local[j] = arg[k] + numerics::wrap_to_pi(arg[idx] - arg[k]);
      }
      // A jump of about pi between neighbours means gamma passed through zero.
      for (std::size_t j = 1; usable && j < len; ++j) {
        if (std::abs(local[j] - local[j - 1]) > 0.5 * std::numbers::pi) usable = false;
      }
      if (!usable) continue;
      const auto w = numerics::fd_weights(tau[k], std::span<const double>(tau).subspan(first, len), 1);
      for (std::size_t j = 0; j < len; ++j) rate += w[j] * local[j];
    }
    s.delta[k] = frame.gamma[k](m, m).real() - frame.gamma[k](n, n).real() + rate;
    s.ratio[k] = s.delta[k] / (2.0 * s.gamma_abs[k]);
    s.valid[k] = std::isfinite(s.delta[k]);
    if (s.valid[k]) ++good;
  }
  if (good == 0) {
    throw Error(ErrorKind::UndefinedArg, "qgp_series: gamma_" + std::to_string(n) + std::to_string(m) +
                                             " vanishes on the whole grid, arg is undefined");
  }
  return s;
}

SphereCurve SphereCurve::from(const SmoothFunction& theta, const SmoothFunction& phi) {
  SphereCurve c;
  c.theta = [theta](double t) { return theta.value(t); };
  c.phi = [phi](double t) { return phi.value(t); };
  c.theta_d1 = [theta](double t) { return theta.d1(t); };
  c.theta_d2 = [theta](double t) { return theta.d2(t); };
  c.phi_d1 = [phi](double t) { return phi.d1(t); };
  c.phi_d2 = [phi](double t) { return phi.d2(t); };
  return c;
}

SphereCurve SphereCurve::sampled(std::function<double(double)> theta, std::function<double(double)> phi) {
  SphereCurve c;
  c.theta = std::move(theta);
  c.phi = std::move(phi);
  return c;
}

SphereCurve::Jet SphereCurve::jet(double tau) const {
  Jet j{};
  j.theta = theta(tau);
  j.phi = phi(tau);
  j.theta_d1 = theta_d1 ? theta_d1(tau) : central_d1(theta, tau);
  j.theta_d2 = theta_d2 ? theta_d2(tau) : central_d2(theta, tau);
  j.phi_d1 = phi_d1 ? phi_d1(tau) : central_d1(phi, tau);
  j.phi_d2 = phi_d2 ? phi_d2(tau) : central_d2(phi, tau);
  return j;
}

double geodesic_curvature(const SphereCurve& curve, double tau) {
  const auto j = curve.jet(tau);
  const double st = std::sin(j.theta), ct = std::cos(j.theta);
  const double speed2 = j.theta_d1 * j.theta_d1 + j.phi_d1 * j.phi_d1 * st * st;
  const double speed = std::sqrt(speed2);
  if (!(speed >= 1e-10)) {
    throw Error(ErrorKind::SingularPoint, "geodesic_curvature: curve speed " + std::to_string(speed) +
                                              " at tau = " + std::to_string(tau));
  }
  const double num = j.theta_d1 * j.phi_d2 * st + 2.0 * j.theta_d1 * j.theta_d1 * j.phi_d1 * ct +
                     j.phi_d1 * j.phi_d1 * j.phi_d1 * st * st * ct - j.phi_d1 * j.theta_d2 * st;
  return num / (speed2 * speed);
}

IdentityCheck qgp_curvature_identity(const BlochCurveModel& curve, const TimeGrid& grid, DerivativeMode mode) {
  const HamiltonianModel model = bloch_curve(curve);
  SpectralFrame frame;
  SphereCurve sphere;
  if (mode == DerivativeMode::Analytic) {
    frame = build_frame(model, grid);
    sphere = SphereCurve::from(curve.theta, curve.phi);
  } else {
    frame = build_frame(model.without_derivatives(), grid);
    sphere = SphereCurve::sampled([c = curve.theta](double t) { return c.value(t); },
                                  [c = curve.phi](double t) { return c.value(t); });
  }
  const QgpSeries s = qgp_series(frame, kUpperLevel, kLowerLevel);
  IdentityCheck out;
  for (std::size_t k = 0; k < s.delta.size(); ++k) {
    if (!s.valid[k]) continue;
    const double rho = geodesic_curvature(sphere, grid.samples[k]);
    const double dev = std::abs(s.ratio[k] - rho);
    ++out.samples_checked;
    if (dev > out.max_deviation) {
      out.max_deviation = dev;
      out.tau_at_max = grid.samples[k];
    }
  }
  return out;
}

BerryDifference berry_difference(const SpectralFrame& frame, std::size_t m, std::size_t n) {
  check_pair(frame, m, n, "berry_difference");
  const std::size_t count = frame.size();
  const std::size_t last = count - 1;
  const auto& tau = frame.grid.samples;
  const double period = frame.grid.end() - frame.grid.start();

  double scale = 1.0;
  for (double e : frame.energies[0]) scale = std::max(scale, std::abs(e));
  std::array<double, 2> beta{};
  const std::array<std::size_t, 2> levels{m, n};
  for (std::size_t i = 0; i < 2; ++i) {
    const std::size_t l = levels[i];
    if (std::abs(frame.energies[last][l] - frame.energies[0][l]) > 1e-8 * scale) {
      throw Error(ErrorKind::NotClosed, "berry_difference: energy of level " + std::to_string(l) +
                                            " does not return to its initial value");
    }
    const Complex ov = inner(frame.state(0, l), frame.state(last, l));
    if (std::abs(ov) < 1.0 - 1e-8) {
      throw Error(ErrorKind::NotClosed, "berry_difference: eigenprojector of level " + std::to_string(l) +
                                            " does not close (overlap " + std::to_string(std::abs(ov)) + ")");
    }
    beta[i] = std::arg(ov);
  }

  // Single-valued gauge: |phi'_l> = exp(i f_l)|phi_l>, f_l = -beta_l (tau - tau0) / T.
  std::vector<double> gm(count), gn(count);
  for (std::size_t k = 0; k < count; ++k) {
    gm[k] = frame.gamma[k](m, m).real() + beta[0] / period;
    gn[k] = frame.gamma[k](n, n).real() + beta[1] / period;
  }
  BerryDifference out;
  out.berry_m = numerics::cumulative_integral(tau, gm).back();
  out.berry_n = numerics::cumulative_integral(tau, gn).back();

  double max_coupling = 0.0;
  for (std::size_t k = 0; k < count; ++k) max_coupling = std::max(max_coupling, std::abs(frame.gamma[k](n, m)));
  if (max_coupling <= kCouplingFloor) {
    // Arg term absent; Delta reduces to gamma_mm - gamma_nn.
    out.delta_integral = out.berry_m - out.berry_n;
    return out;
  }

  const QgpSeries s = qgp_series(frame, m, n);
  const auto delta = fill_masked(tau, s.delta, s.valid);
  out.delta_integral = numerics::cumulative_integral(tau, delta).back();

  // Accumulated change of arg gamma'_nm = arg gamma_nm + f_m - f_n. Steps
  // across a zero of the coupling (jumps near pi) are excluded, matching the
  // continuous extension of Delta through such points.
  double total = 0.0;
  bool jumps = false;
  for (std::size_t k = 1; k < count; ++k) {
    if (s.gamma_abs[k] <= kCouplingFloor || s.gamma_abs[k - 1] <= kCouplingFloor) {
      jumps = true;
      continue;
    }
    const double step = numerics::wrap_to_pi(std::arg(frame.gamma[k](n, m)) - std::arg(frame.gamma[k - 1](n, m)));
    if (std::abs(step) > 0.5 * std::numbers::pi) {
      jumps = true;
      continue;
    }
    total += step;
  }
  total += -(beta[0] - beta[1]);
  if (jumps) {
    // The skipped steps carry the smooth rate too; take it from Delta instead.
    total = out.delta_integral - (out.berry_m - out.berry_n);
  }
  out.winding_raw = total / kTwoPi;
  const double rounded = std::round(out.winding_raw);
  if (std::abs(out.winding_raw - rounded) > 0.05) {
    throw Error(ErrorKind::NotClosed, "berry_difference: accumulated arg gamma is " +
                                          std::to_string(out.winding_raw) + " turns, not an integer winding");
  }
  out.winding = static_cast<long>(rounded);
  out.residual = std::abs(out.delta_integral - (out.berry_m - out.berry_n) - kTwoPi * rounded);
  return out;
}

TimeMap TimeMap::identity() {
  TimeMap f;
  f.forward = [](double t) { return t; };
  f.rate = [](double) { return 1.0; };
  f.curvature = [](double) { return 0.0; };
  return f;
}

HamiltonianModel reparametrized(const HamiltonianModel& model, const TimeMap& map, double lo, double hi) {
  if (!(hi > lo)) throw Error(ErrorKind::InvalidParams, "reparametrized: need hi > lo");
  const double new_lo = map.forward(lo), new_hi = map.forward(hi);
  if (!(new_hi > new_lo)) throw Error(ErrorKind::InvalidParams, "reparametrized: map must be increasing");
  auto inverse = [map, lo, hi](double s) { return invert_map(map, s, lo, hi); };
  auto curvature = [map](double t) {
    return map.curvature ? map.curvature(t) : central_d1(map.rate, t);
  };

  HamiltonianModel out;
  out.dim = model.dim;
  out.label = model.label + " (reparametrized)";
  out.evaluate = [f = model.evaluate, inverse](double s) { return f(inverse(s)); };
  if (model.derivative) {
    out.derivative = [d = model.derivative, map, inverse](double s) {
      const double t = inverse(s);
      return (1.0 / map.rate(t)) * d(t);
    };
    if (model.second_derivative) {
      out.second_derivative = [d = model.derivative, d2 = model.second_derivative, map, inverse,
                               curvature](double s) {
        const double t = inverse(s);
        const double r = map.rate(t);
        return (1.0 / (r * r)) * d2(t) - (curvature(t) / (r * r * r)) * d(t);
      };
    }
  }
  return out;
}

ReparamCheck reparam_invariance_check(const HamiltonianModel& model, const SpectralFrame& frame, std::size_t m,
                                      std::size_t n, const TimeMap& map) {
  check_pair(frame, m, n, "reparam_invariance_check");
  const QgpSeries before = qgp_series(frame, m, n);
  std::vector<double> mapped(frame.size());
  for (std::size_t k = 0; k < frame.size(); ++k) mapped[k] = map.forward(frame.grid.samples[k]);
  const TimeGrid grid = TimeGrid::from_samples(std::move(mapped));
  const HamiltonianModel moved = reparametrized(model, map, frame.grid.start(), frame.grid.end());
  FrameOptions options;
  options.use_model_derivatives = frame.analytic_gamma();
  const SpectralFrame frame2 = build_frame(moved, grid, options);
  const QgpSeries after = qgp_series(frame2, m, n);

  ReparamCheck out;
  for (std::size_t k = 0; k < frame.size(); ++k) {
    if (!before.valid[k] || !after.valid[k]) continue;
    const double a = before.delta[k] / before.gamma_abs[k];
    const double b = after.delta[k] / after.gamma_abs[k];
    const double dev = std::abs(a - b);
    if (dev > out.max_deviation) {
      out.max_deviation = dev;
      out.tau_at_max = frame.grid.samples[k];
    }
  }
  return out;
}

double coupling_magnitude(const HamiltonianModel& model, std::size_t n, std::size_t m, double tau) {
  if (n == m) throw Error(ErrorKind::InvalidParams, "coupling_magnitude: levels must differ");
  if (n >= model.dim || m >= model.dim) throw Error(ErrorKind::OutOfRange, "coupling_magnitude: level out of range");
  return coupling_jet(model, n, m, tau).value;
}

FlatReparam reparametrize_flat(const HamiltonianModel& model, double start, double end, std::size_t count,
                               const FrameOptions& options) {
  if (model.dim != 2) throw Error(ErrorKind::InvalidParams, "reparametrize_flat: two-level models only");
  if (end < start) throw Error(ErrorKind::InvalidParams, "reparametrize_flat: end < start");
  FlatReparam out;
  if (end == start) {
    out.identity = true;
    out.new_tau = {start};
    out.old_tau = {start};
    return out;
  }
  if (count < 2) throw Error(ErrorKind::InvalidParams, "reparametrize_flat: need at least two samples");

  // Cumulative int |gamma| on a uniform panel grid, 4-point Gauss-Legendre per panel.
  static constexpr std::array<double, 4> gl_x{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                              0.8611363115940526};
  static constexpr std::array<double, 4> gl_w{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                              0.3478548451374538};
  const auto magnitude = [&model](double t) { return coupling_jet(model, 0, 1, t).value; };
  const auto panel = [&magnitude](double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) sum += gl_w[i] * magnitude(mid + half * gl_x[i]);
    return half * sum;
  };

  const TimeGrid nodes = TimeGrid::uniform(start, end, count);
  std::vector<double> cumulative(count, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    if (magnitude(nodes.samples[k]) <= kCouplingFloor) {
      throw Error(ErrorKind::DegenerateCoupling, "reparametrize_flat: |gamma| vanishes at tau = " +
                                                     std::to_string(nodes.samples[k]) + ", map not invertible");
    }
    if (k > 0) cumulative[k] = cumulative[k - 1] + panel(nodes.samples[k - 1], nodes.samples[k]);
  }
  const double total = cumulative.back();
  if (!(total > kCouplingFloor)) {
    throw Error(ErrorKind::DegenerateCoupling, "reparametrize_flat: int |gamma| is zero");
  }
  const double length = end - start;
  const double scale = length / total;

  TimeMap map;
  map.forward = [=, &model](double t) {
    t = std::clamp(t, start, end);
    const auto [i, frac] = numerics::locate(nodes.samples, t);
    (void)frac;
    return start + scale * (cumulative[i] + panel(nodes.samples[i], t));
  };
  map.rate = [=, &model](double t) { return scale * coupling_jet(model, 0, 1, t).value; };
  if (model.second_derivative) {
    map.curvature = [=, &model](double t) { return scale * coupling_jet(model, 0, 1, t).rate; };
  }

  const HamiltonianModel flat = reparametrized(model, map, start, end);
  out.new_tau = nodes.samples;
  out.old_tau.resize(count);
  for (std::size_t k = 0; k < count; ++k) out.old_tau[k] = invert_map(map, nodes.samples[k], start, end);
  out.frame = build_frame(flat, nodes, options);

  const QgpSeries s = qgp_series(out.frame, kUpperLevel, kLowerLevel);
  out.combination.resize(count);
  std::vector<bool> ok = s.valid;
  for (std::size_t k = 0; k < count; ++k) {
    out.combination[k] = out.frame.energies[k][kLowerLevel] - out.frame.energies[k][kUpperLevel] + s.delta[k];
  }
  out.combination = fill_masked(nodes.samples, out.combination, ok);
  double sum = 0.0;
  for (double c : out.combination) sum += c;
  out.mean = sum / static_cast<double>(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.max_deviation = std::max(out.max_deviation, std::abs(out.combination[k] - out.mean));
    if (k > 0) out.total_variation += std::abs(out.combination[k] - out.combination[k - 1]);
  }
  return out;
}

}  // namespace qgp
