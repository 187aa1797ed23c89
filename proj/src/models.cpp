#include "qgp/models.hpp"

#include <cmath>
#include <sstream>

#include "qgp/error.hpp"

namespace qgp {

HamiltonianModel HamiltonianModel::without_derivatives() const {
  HamiltonianModel copy;
  copy.dim = dim;
  copy.evaluate = evaluate;
  copy.label = label + " [finite differences]";
  return copy;
}

SmoothFunction SmoothFunction::constant(double c) { return polynomial({c}); }

SmoothFunction SmoothFunction::polynomial(std::vector<double> coefficients) {
  SmoothFunction f;
  f.poly = std::move(coefficients);
  return f;
}

SmoothFunction SmoothFunction::sinusoid(double amplitude, double omega, double phase, double offset) {
  SmoothFunction f;
  f.poly = {offset};
  f.waves.push_back({amplitude, omega, phase});
  return f;
}

double SmoothFunction::value(double tau) const {
  double v = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) v = v * tau + *it;
  for (const auto& w : waves) v += w.amplitude * std::sin(w.omega * tau + w.phase);
  return v;
}

double SmoothFunction::d1(double tau) const {
  double v = 0.0;
  for (std::size_t k = poly.size(); k-- > 1;) v = v * tau + static_cast<double>(k) * poly[k];
  for (const auto& w : waves) v += w.amplitude * w.omega * std::cos(w.omega * tau + w.phase);
  return v;
}

double SmoothFunction::d2(double tau) const {
  double v = 0.0;
  for (std::size_t k = poly.size(); k-- > 2;) v = v * tau + static_cast<double>(k * (k - 1)) * poly[k];
  for (const auto& w : waves) v -= w.amplitude * w.omega * w.omega * std::sin(w.omega * tau + w.phase);
  return v;
}

RotatingSpinParams RotatingSpinParams::normalized(double eta, double xi, double K) {
  const double e = std::hypot(eta, xi);
  if (!(e > 0.0)) throw Error(ErrorKind::InvalidParams, "normalized: eta and xi both zero");
  return {eta / e, xi / e, K};
}

double RotatingSpinParams::energy() const { return std::hypot(eta, xi); }
double RotatingSpinParams::cos_theta() const { return eta / energy(); }
double RotatingSpinParams::sin_theta() const { return xi / energy(); }

bool RobustModelParams::strong_transverse_over_eta() const { return eta0 >= 10.0 * std::abs(eta); }
bool RobustModelParams::strong_transverse_over_eta1() const { return eta0 >= 10.0 * std::abs(eta1); }

double RobustModelParams::envelope(double tau) const {
  const double c = eta + eta1 * std::cos(2.0 * eta2 * tau);
  const double s = eta1 * std::sin(2.0 * eta2 * tau);
  return std::sqrt(eta0 * eta0 + c * c + s * s);
}

AnalyticFrame bloch_analytic_frame(double A, double B, double theta, double theta_dot, double phi,
                                   double phi_dot) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const Complex e = std::polar(1.0, phi);
  AnalyticFrame f;
  f.energies = {A - B, A + B};
  f.vectors = Matrix(2);
  f.vectors(0, 0) = s;
  f.vectors(1, 0) = -e * c;
  f.vectors(0, 1) = c;
  f.vectors(1, 1) = e * s;
  f.gamma = Matrix(2);
  f.gamma(0, 0) = -phi_dot * c * c;
  f.gamma(1, 1) = -phi_dot * s * s;
  // gamma_{+-} = i <+| d/dtau |->
  const Complex upper_lower(0.5 * phi_dot * std::sin(theta), 0.5 * theta_dot);
  f.gamma(1, 0) = upper_lower;
  f.gamma(0, 1) = std::conj(upper_lower);
  return f;
}

HamiltonianModel rotating_spin(const RotatingSpinParams& p) {
  if (!(p.eta > 0.0) || !(p.xi > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "rotating_spin: eta and xi must be positive");
  }
  const double omega = p.rotation_rate();
  HamiltonianModel m;
  m.dim = 2;
  m.evaluate = [p, omega](double tau) {
    return pauli::from_vector(p.xi * std::cos(omega * tau), p.xi * std::sin(omega * tau), p.eta);
  };
  m.derivative = [p, omega](double tau) {
    return pauli::from_vector(-p.xi * omega * std::sin(omega * tau), p.xi * omega * std::cos(omega * tau), 0.0);
  };
  m.second_derivative = [p, omega](double tau) {
    const double w2 = omega * omega;
    return pauli::from_vector(-p.xi * w2 * std::cos(omega * tau), -p.xi * w2 * std::sin(omega * tau), 0.0);
  };
  const double theta = std::atan2(p.xi, p.eta);
  const double energy = p.energy();
  m.analytic_frame = [theta, energy, omega](double tau) {
    return bloch_analytic_frame(0.0, energy, theta, 0.0, omega * tau, omega);
  };
  std::ostringstream label;
  label << "rotating_spin(eta=" << p.eta << ", xi=" << p.xi << ", K=" << p.K << ")";
  m.label = label.str();
  return m;
}

HamiltonianModel robust_model(const RobustModelParams& p) {
  for (double v : {p.eta, p.eta0, p.eta1, p.eta2}) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidParams, "robust_model: parameters must be finite");
  }
  const Matrix sx = pauli::x();
  const Matrix sz = pauli::z();
  const Matrix outer_gen = p.eta * sz;   // R = exp(-i outer_gen tau)
  const Matrix inner_gen = -p.eta2 * sx; // S = exp(-i inner_gen tau)
  const Complex minus_i(0.0, -1.0);
  // d/dtau (S X S^dagger) = S (-i [G, X]) S^dagger for S = exp(-i G tau).
  const Matrix c1 = minus_i * commutator(inner_gen, sz);
  const Matrix c2 = minus_i * commutator(inner_gen, c1);

  struct Pieces {
    Matrix r, k, k1, k2;
  };
  auto pieces = [=](double tau) {
    const Matrix s = expm_unitary(inner_gen, tau);
    const Matrix sd = s.adjoint();
    return Pieces{expm_unitary(outer_gen, tau), p.eta0 * sx + p.eta1 * (s * sz * sd), p.eta1 * (s * c1 * sd),
                  p.eta1 * (s * c2 * sd)};
  };

  HamiltonianModel m;
  m.dim = 2;
  m.evaluate = [=](double tau) {
    const Pieces q = pieces(tau);
    return outer_gen + q.r * q.k * q.r.adjoint();
  };
  m.derivative = [=](double tau) {
    const Pieces q = pieces(tau);
    const Matrix inner = q.k1 + minus_i * commutator(outer_gen, q.k);
    return q.r * inner * q.r.adjoint();
  };
  m.second_derivative = [=](double tau) {
    const Pieces q = pieces(tau);
    const Matrix inner = q.k2 + (2.0 * minus_i) * commutator(outer_gen, q.k1) -
                         commutator(outer_gen, commutator(outer_gen, q.k));
    return q.r * inner * q.r.adjoint();
  };
  std::ostringstream label;
  label << "robust(eta=" << p.eta << ", eta0=" << p.eta0 << ", eta1=" << p.eta1 << ", eta2=" << p.eta2 << ")";
  m.label = label.str();
  return m;
}

namespace {

struct UnitVectorJet {
  double n[3], dn[3], ddn[3];
};

UnitVectorJet unit_vector_jet(double th, double th1, double th2, double ph, double ph1, double ph2) {
  const double st = std::sin(th), ct = std::cos(th), sp = std::sin(ph), cp = std::cos(ph);
  UnitVectorJet j{};
  j.n[0] = st * cp;
  j.n[1] = st * sp;
  j.n[2] = ct;
  // n_x + i n_y = sin(theta) e^{i phi}
  const Complex e = std::polar(1.0, ph);
  const Complex w1 = Complex(ct * th1, st * ph1) * e;
  const Complex w2 = Complex(-st * th1 * th1 + ct * th2 - st * ph1 * ph1, 2.0 * ct * th1 * ph1 + st * ph2) * e;
  j.dn[0] = w1.real();
  j.dn[1] = w1.imag();
  j.dn[2] = -st * th1;
  j.ddn[0] = w2.real();
  j.ddn[1] = w2.imag();
  j.ddn[2] = -ct * th1 * th1 - st * th2;
  return j;
}

Matrix sigma_dot(const double v[3]) { return pauli::from_vector(v[0], v[1], v[2]); }

void require_gap(double b, double tau) {
  if (!(b > 0.0)) {
    throw Error(ErrorKind::GapClosure, "bloch_curve: B(tau) <= 0 at tau = " + std::to_string(tau));
  }
}

}  // namespace

HamiltonianModel bloch_curve(const BlochCurveModel& c) {
  HamiltonianModel m;
  m.dim = 2;
  auto jet = [c](double tau) {
    return unit_vector_jet(c.theta.value(tau), c.theta.d1(tau), c.theta.d2(tau), c.phi.value(tau), c.phi.d1(tau),
                           c.phi.d2(tau));
  };
  m.evaluate = [c, jet](double tau) {
    const double b = c.B.value(tau);
    require_gap(b, tau);
    const auto j = jet(tau);
    return c.A.value(tau) * Matrix::identity(2) + b * sigma_dot(j.n);
  };
  m.derivative = [c, jet](double tau) {
    const auto j = jet(tau);
    return c.A.d1(tau) * Matrix::identity(2) + c.B.d1(tau) * sigma_dot(j.n) + c.B.value(tau) * sigma_dot(j.dn);
  };
  m.second_derivative = [c, jet](double tau) {
    const auto j = jet(tau);
    return c.A.d2(tau) * Matrix::identity(2) + c.B.d2(tau) * sigma_dot(j.n) +
           (2.0 * c.B.d1(tau)) * sigma_dot(j.dn) + c.B.value(tau) * sigma_dot(j.ddn);
  };
  m.analytic_frame = [c](double tau) {
    const double b = c.B.value(tau);
    require_gap(b, tau);
    return bloch_analytic_frame(c.A.value(tau), b, c.theta.value(tau), c.theta.d1(tau), c.phi.value(tau),
                                c.phi.d1(tau));
  };
  m.label = "bloch_curve";
  return m;
}

HamiltonianModel fourier_nlevel(std::size_t dim, const std::vector<FourierTerm>& terms) {
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& t = terms[k];
    if (t.op.dim() != dim) {
      throw Error(ErrorKind::InvalidParams, "fourier_nlevel: term " + std::to_string(k) + " has wrong dimension");
    }
    if (hermiticity_defect(t.op) > std::max(1e-12, default_hermiticity_tol(t.op))) {
      throw Error(ErrorKind::NotHermitian, "fourier_nlevel: term " + std::to_string(k) + " is not Hermitian");
    }
  }
  auto combine = [dim, terms](double tau, int order) {
    Matrix h(dim);
    for (const auto& t : terms) {
      const double arg = t.omega * tau + t.phase;
      double f = 0.0;
      switch (order) {
        case 0: f = std::cos(arg); break;
        case 1: f = -t.omega * std::sin(arg); break;
        default: f = -t.omega * t.omega * std::cos(arg); break;
      }
      h += (t.amplitude * f) * t.op;
    }
    return h;
  };
  HamiltonianModel m;
  m.dim = dim;
  m.evaluate = [combine](double tau) { return combine(tau, 0); };
  m.derivative = [combine](double tau) { return combine(tau, 1); };
  m.second_derivative = [combine](double tau) { return combine(tau, 2); };
  m.label = "fourier(" + std::to_string(terms.size()) + " terms)";
  return m;
}

HamiltonianModel constant_model(const Matrix& h, std::string label) {
  if (hermiticity_defect(h) > std::max(1e-12, default_hermiticity_tol(h))) {
    throw Error(ErrorKind::NotHermitian, "constant_model: matrix is not Hermitian");
  }
  const std::size_t n = h.dim();
  HamiltonianModel m;
  m.dim = n;
  m.evaluate = [h](double) { return h; };
  m.derivative = [n](double) { return Matrix(n); };
  m.second_derivative = [n](double) { return Matrix(n); };
  m.label = std::move(label);
  return m;
}

HamiltonianModel normalize_by_level(const HamiltonianModel& model, std::size_t level) {
  const EigenSystem es = eigh(model.evaluate(0.0));
  if (level >= es.values.size()) throw Error(ErrorKind::OutOfRange, "normalize_by_level: level out of range");
  const double scale = std::abs(es.values[level]);
  if (!(scale > 0.0)) throw Error(ErrorKind::InvalidParams, "normalize_by_level: E_m(0) is zero");
  const double inv = 1.0 / scale;
  HamiltonianModel m;
  m.dim = model.dim;
  m.evaluate = [f = model.evaluate, inv](double tau) { return inv * f(tau); };
  if (model.derivative) m.derivative = [f = model.derivative, inv](double tau) { return inv * f(tau); };
  if (model.second_derivative) {
    m.second_derivative = [f = model.second_derivative, inv](double tau) { return inv * f(tau); };
  }
  if (model.analytic_frame) {
    m.analytic_frame = [f = model.analytic_frame, inv](double tau) {
      AnalyticFrame a = f(tau);
      for (double& e : a.energies) e *= inv;
      return a;
    };
  }
  std::ostringstream label;
  label << model.label << " / " << scale;
  m.label = label.str();
  return m;
}

}  // namespace qgp
