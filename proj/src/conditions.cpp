#include "qgp/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "qgp/error.hpp"
#include "qgp/geometry.hpp"

namespace qgp {

namespace {

constexpr double kCouplingFloor = 1e-12;

void check_level(const SpectralFrame& frame, std::size_t m, const char* who) {
  if (frame.dim < 2) throw Error(ErrorKind::InvalidParams, std::string(who) + ": needs at least two levels");
  if (m >= frame.dim) throw Error(ErrorKind::OutOfRange, std::string(who) + ": level out of range");
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::InvalidParams, "delta must lie in (0, 1), got " + std::to_string(delta));
  }
}

bool coupled_somewhere(const SpectralFrame& frame, std::size_t m, std::size_t n) {
  for (const auto& g : frame.gamma)
    if (std::abs(g(n, m)) > kCouplingFloor) return true;
  return false;
}

void consider(ConditionVerdict& v, double ratio, double tau) {
  if (ratio > v.max_ratio || (std::isnan(ratio) && !std::isnan(v.max_ratio))) {
    v.max_ratio = ratio;
    v.tau_at_max = tau;
  }
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string verdict_line(const char* name, const ConditionVerdict& v) {
  std::ostringstream s;
  s << name << ": max ratio " << fmt17(v.max_ratio) << " at tau = " << fmt17(v.tau_at_max) << " (threshold "
    << fmt17(v.threshold) << ") " << (v.pass ? "PASS" : "FAIL");
  return s.str();
}

std::size_t square_dim(const std::vector<std::vector<double>>& a, const char* who) {
  const std::size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n) throw Error(ErrorKind::InvalidParams, std::string(who) + ": matrix must be square");
  return n;
}

}  // namespace

ConditionVerdict traditional_condition(const SpectralFrame& frame, std::size_t m, double threshold) {
  check_level(frame, m, "traditional_condition");
  ConditionVerdict v;
  v.threshold = threshold;
  for (std::size_t k = 0; k < frame.size(); ++k) {
    for (std::size_t n = 0; n < frame.dim; ++n) {
      if (n == m) continue;
      const double gap = std::abs(frame.energies[k][n] - frame.energies[k][m]);
      if (!(gap > 0.0)) {
        throw Error(ErrorKind::GapClosure, "traditional_condition: gap closes at tau = " +
                                               std::to_string(frame.grid.samples[k]));
      }
      consider(v, std::abs(frame.gamma[k](n, m)) / gap, frame.grid.samples[k]);
    }
  }
  v.pass = v.max_ratio <= threshold;
  return v;
}

ConditionVerdict new_condition(const SpectralFrame& frame, std::size_t m, double delta, Pairing pairing) {
  check_level(frame, m, "new_condition");
  check_delta(delta);
  const std::size_t dim = frame.dim;
  std::vector<bool> coupled(dim, false);
  std::vector<QgpSeries> qgp(dim);
  for (std::size_t n = 0; n < dim; ++n) {
    if (n == m || !coupled_somewhere(frame, m, n)) continue;
    coupled[n] = true;
    qgp[n] = qgp_series(frame, m, n);
  }

  ConditionVerdict v;
  v.threshold = delta / std::sqrt(static_cast<double>(dim - 1));
  for (std::size_t k = 0; k < frame.size(); ++k) {
    const double tau = frame.grid.samples[k];
    auto denominator = [&](std::size_t n) {
      return std::abs(frame.energies[k][n] - frame.energies[k][m] + qgp[n].delta[k]);
    };
    auto undefined = [&](std::size_t n) {
      return Error(ErrorKind::UndefinedArg, "new_condition: Delta_" + std::to_string(m) + std::to_string(n) +
                                                " undefined at tau = " + std::to_string(tau));
    };
    if (pairing == Pairing::Strict) {
      for (std::size_t n = 0; n < dim; ++n) {
        if (!coupled[n]) continue;
        const double num = std::abs(frame.gamma[k](n, m));
        if (!qgp[n].valid[k]) {
          if (num > kCouplingFloor) throw undefined(n);
          continue;
        }
        consider(v, num / denominator(n), tau);
      }
      continue;
    }
    double num = 0.0;
    for (std::size_t n = 0; n < dim; ++n)
      if (n != m) num = std::max(num, std::abs(frame.gamma[k](n, m)));
    if (num <= kCouplingFloor) continue;
    double den = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < dim; ++n) {
      if (!coupled[n]) continue;
      if (!qgp[n].valid[k]) throw undefined(n);
      den = std::min(den, denominator(n));
    }
    consider(v, num / den, tau);
  }
  v.pass = v.max_ratio <= v.threshold;
  return v;
}

ConditionVerdict new_condition_constant(const std::vector<std::vector<double>>& coupling,
                                        const std::vector<std::vector<double>>& theta_dot, std::size_t m,
                                        double delta, Pairing pairing) {
  const std::size_t dim = square_dim(coupling, "new_condition_constant");
  if (square_dim(theta_dot, "new_condition_constant") != dim || dim < 2) {
    throw Error(ErrorKind::InvalidParams, "new_condition_constant: inconsistent dimensions");
  }
  if (m >= dim) throw Error(ErrorKind::OutOfRange, "new_condition_constant: level out of range");
  check_delta(delta);
  ConditionVerdict v;
  v.threshold = delta / std::sqrt(static_cast<double>(dim - 1));
  if (pairing == Pairing::Strict) {
    for (std::size_t n = 0; n < dim; ++n)
      if (n != m && coupling[n][m] > 0.0) consider(v, coupling[n][m] / std::abs(theta_dot[m][n]), 0.0);
  } else {
    double num = 0.0, den = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < dim; ++n) {
      if (n == m) continue;
      num = std::max(num, coupling[n][m]);
      if (coupling[n][m] > 0.0) den = std::min(den, std::abs(theta_dot[m][n]));
    }
    if (num > 0.0) consider(v, num / den, 0.0);
  }
  v.pass = v.max_ratio <= v.threshold;
  return v;
}

ConditionReport condition_report(const SpectralFrame& frame, std::size_t m, const ConditionOptions& options,
                                 std::string label) {
  check_level(frame, m, "condition_report");
  ConditionReport r;
  r.label = std::move(label);
  r.level = m;
  r.dim = frame.dim;
  r.grid = frame.grid;
  r.delta = options.delta;
  r.floor = (1.0 - options.delta) * (1.0 - options.delta);
  r.traditional = traditional_condition(frame, m, options.traditional_threshold);
  r.conservative = new_condition(frame, m, options.delta, Pairing::Conservative);
  r.strict = new_condition(frame, m, options.delta, Pairing::Strict);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t n = 0; n < frame.dim; ++n) {
    if (n == m) continue;
    PairSeries p;
    p.m = m;
    p.n = n;
    const std::size_t count = frame.size();
    p.gap.resize(count);
    p.gamma_abs.resize(count);
    p.delta_qgp.assign(count, nan);
    p.traditional_ratio.resize(count);
    p.new_ratio.resize(count);
    const bool coupled = coupled_somewhere(frame, m, n);
    const QgpSeries q = coupled ? qgp_series(frame, m, n) : QgpSeries{};
    for (std::size_t k = 0; k < count; ++k) {
      p.gap[k] = frame.energies[k][n] - frame.energies[k][m];
      p.gamma_abs[k] = std::abs(frame.gamma[k](n, m));
      p.traditional_ratio[k] = p.gamma_abs[k] / std::abs(p.gap[k]);
      if (coupled && q.valid[k]) {
        p.delta_qgp[k] = q.delta[k];
        p.new_ratio[k] = p.gamma_abs[k] / std::abs(p.gap[k] + q.delta[k]);
      } else {
        p.new_ratio[k] = p.gamma_abs[k] <= kCouplingFloor ? 0.0 : nan;
      }
    }
    r.pairs.push_back(std::move(p));
  }
  return r;
}

void write_conditions_csv(std::ostream& out, const ConditionReport& report) {
  out << "tau,gap,|gamma|,delta_qgp,traditional_ratio,new_ratio\n";
  for (const auto& p : report.pairs) {
    for (std::size_t k = 0; k < p.gap.size(); ++k) {
      out << fmt17(report.grid.samples[k]) << ',' << fmt17(p.gap[k]) << ',' << fmt17(p.gamma_abs[k]) << ','
          << fmt17(p.delta_qgp[k]) << ',' << fmt17(p.traditional_ratio[k]) << ',' << fmt17(p.new_ratio[k]) << '\n';
    }
  }
}

std::string condition_summary(const ConditionReport& report) {
  std::ostringstream s;
  s << "model: " << (report.label.empty() ? "(unnamed)" : report.label) << '\n';
  s << "level: " << report.level << "  levels: " << report.dim << "  samples: " << report.grid.size() << '\n';
  s << verdict_line("traditional", report.traditional) << '\n';
  s << verdict_line("new (conservative)", report.conservative) << '\n';
  s << verdict_line("new (strict)", report.strict) << '\n';
  s << "delta: " << fmt17(report.delta) << "  predicted floor (1-delta)^2: " << fmt17(report.floor) << '\n';
  if (report.observed_min_probability) {
    s << "observed min P_" << report.level << ": " << fmt17(*report.observed_min_probability) << '\n';
  }
  return s.str();
}

RrcpResult rrcp_check(const std::vector<std::vector<double>>& theta_dot) {
  const std::size_t n = square_dim(theta_dot, "rrcp_check");
  if (n == 0) throw Error(ErrorKind::InvalidParams, "rrcp_check: empty matrix");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      if (!std::isfinite(theta_dot[a][b]) || std::abs(theta_dot[a][b] + theta_dot[b][a]) > 1e-8) {
        throw Error(ErrorKind::NotAntisymmetric, "rrcp_check: theta_dot[" + std::to_string(a) + "][" +
                                                     std::to_string(b) + "] breaks antisymmetry");
      }
    }
  RrcpResult r;
  r.omega.resize(n);
  for (std::size_t a = 0; a < n; ++a) r.omega[a] = theta_dot[a][n - 1];
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t b = 0; b < n; ++b)
        r.max_violation = std::max(r.max_violation, std::abs(theta_dot[a][l] + theta_dot[l][b] - theta_dot[a][b]));
  r.holds = r.max_violation <= 1e-8;
  return r;
}

void PiMatrix::validate() const {
  const std::size_t n = omegas.size();
  if (n == 0 || couplings.size() != n) throw Error(ErrorKind::InvalidParams, "PiMatrix: inconsistent dimensions");
  for (std::size_t a = 0; a < n; ++a) {
    if (couplings[a].size() != n) throw Error(ErrorKind::InvalidParams, "PiMatrix: coupling matrix not square");
    if (!std::isfinite(omegas[a])) throw Error(ErrorKind::InvalidParams, "PiMatrix: non-finite omega");
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const double g = couplings[a][b];
      if (!std::isfinite(g) || g < 0.0) throw Error(ErrorKind::InvalidParams, "PiMatrix: couplings must be >= 0");
      if (a == b && g != 0.0) throw Error(ErrorKind::InvalidParams, "PiMatrix: coupling diagonal must be zero");
      if (std::abs(g - couplings[b][a]) > 1e-12) {
        throw Error(ErrorKind::InvalidParams, "PiMatrix: couplings must be symmetric");
      }
    }
}

Matrix PiMatrix::matrix() const {
  validate();
  const std::size_t n = dim();
  Matrix p(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) p(a, b) = a == b ? omegas[a] : couplings[a][b];
  return p;
}

PiBound pi_bound(const PiMatrix& pi, bool throw_on_ambiguity) {
  const Matrix p = pi.matrix();
  const std::size_t n = pi.dim();
  const EigenSystem es = eigh(p);
  PiBound b;
  b.eigenvalues = es.values;
  b.bound.resize(n);
  b.nearest_shift.resize(n);
  b.sorted_shift.resize(n);
  b.margin.resize(n);

  std::vector<double> radius(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    double sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == a) continue;
      sq += pi.couplings[k][a] * pi.couplings[k][a];
      radius[a] += pi.couplings[a][k];
    }
    b.bound[a] = std::sqrt(2.0 * sq);
  }

  std::vector<std::size_t> nearest(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < n; ++j)
      if (std::abs(es.values[j] - pi.omegas[a]) < std::abs(es.values[best] - pi.omegas[a])) best = j;
    nearest[a] = best;
    b.nearest_shift[a] = std::abs(es.values[best] - pi.omegas[a]);
    b.margin[a] = b.bound[a] - b.nearest_shift[a];
    // Slack for rounding in eigh when the bound is exactly attained (zero coupling).
    if (b.nearest_shift[a] > b.bound[a] + 1e-12 * std::max(1.0, std::abs(pi.omegas[a]))) b.holds = false;
  }
  std::vector<std::size_t> sorted_nearest = nearest;
  std::sort(sorted_nearest.begin(), sorted_nearest.end());
  b.nearest_is_bijection = std::adjacent_find(sorted_nearest.begin(), sorted_nearest.end()) == sorted_nearest.end();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pi.omegas[x] < pi.omegas[y]; });
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t a = order[r];
    b.sorted_shift[a] = std::abs(es.values[r] - pi.omegas[a]);
    if (b.sorted_shift[a] > b.bound[a] + 1e-12 * std::max(1.0, std::abs(pi.omegas[a]))) b.sorted_holds = false;
  }

  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t c = a + 1; c < n; ++c) {
      const double reach = radius[a] + radius[c];
      if (reach > 0.0 && std::abs(pi.omegas[a] - pi.omegas[c]) <= reach) b.ambiguous = true;
    }
  if (b.ambiguous && throw_on_ambiguity) {
    throw Error(ErrorKind::MatchingAmbiguity,
                "pi_bound: omega values closer than the total coupling, eigenvalue pairing is ill-defined");
  }
  return b;
}

Complex constant_case_solution(const PiMatrix& pi, std::size_t m, double tau) {
  if (m >= pi.dim()) throw Error(ErrorKind::OutOfRange, "constant_case_solution: level out of range");
  const EigenSystem es = eigh(pi.matrix());
  Complex c = 0.0;
  for (std::size_t k = 0; k < pi.dim(); ++k) c += std::norm(es.vectors(m, k)) * std::polar(1.0, es.values[k] * tau);
  return c;
}

PiMatrix pi_from_constant_system(const std::vector<std::vector<double>>& coupling,
                                 const std::vector<std::vector<double>>& theta_dot) {
  const RrcpResult r = rrcp_check(theta_dot);
  if (!r.holds) {
    throw Error(ErrorKind::InvalidParams, "pi_from_constant_system: theta_dot violates the combination principle");
  }
  PiMatrix p;
  p.omegas.resize(r.omega.size());
  for (std::size_t k = 0; k < r.omega.size(); ++k) p.omegas[k] = -r.omega[k];
  p.couplings = coupling;
  p.validate();
  return p;
}

TheoremBound theorem_bound(const TheoremInputs& in) {
  if (in.levels < 2 || in.terms < 1 || !(in.derivative_bound >= 0.0) || !(in.max_amplitude >= 0.0) ||
      !(in.omega_min > 0.0) || !std::isfinite(in.derivative_bound) || !std::isfinite(in.max_amplitude) ||
      !std::isfinite(in.omega_min)) {
    throw Error(ErrorKind::InvalidParams, "theorem_bound: inputs must be finite with N >= 2, p >= 1, B, D >= 0, "
                                          "omega_min > 0");
  }
  TheoremBound t;
  const double n = static_cast<double>(in.levels);
  t.eps_prime = 1.0 / in.omega_min;
  t.eps = t.eps_prime * 2.0 * static_cast<double>(in.terms) * n * (n - 1.0) * in.derivative_bound * in.max_amplitude;
  if (!(t.eps_prime < 1.0)) {
    t.violated = "eps' < 1";
    return t;
  }
  if (!(t.eps + t.eps_prime <= 1.0)) {
    t.violated = "eps + eps' <= 1";
    return t;
  }
  t.applicable = true;
  t.delta = t.eps / (1.0 - t.eps_prime);
  t.floor = (1.0 - t.delta) * (1.0 - t.delta);
  return t;
}

}  // namespace qgp
