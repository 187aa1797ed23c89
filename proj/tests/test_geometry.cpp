#include <array>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qgp/error.hpp"
#include "qgp/geometry.hpp"
#include "qgp/models.hpp"
#include "qgp/spectral.hpp"
#include "support.hpp"

using namespace qgp;
using namespace testing;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no qgp::Error thrown");
  return ErrorKind::ConfigError;
}

// Closed-form Delta_{+-} for n(theta, phi) from the derivatives of the angles.
double delta_formula(const SmoothFunction& th, const SmoothFunction& ph, double t) {
  const double a = th.value(t), a1 = th.d1(t), a2 = th.d2(t), b1 = ph.d1(t), b2 = ph.d2(t);
  const double s = std::sin(a), c = std::cos(a);
  const double num = a1 * b2 * s + 2 * a1 * a1 * b1 * c + b1 * b1 * b1 * s * s * c - b1 * a2 * s;
  return num / (a1 * a1 + b1 * b1 * s * s);
}

using Vec3 = std::array<double, 3>;

Vec3 unit(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

// (r x r') . r'' / |r'|^3 with r', r'' from central differences of the
// Cartesian curve, which is the arclength-frame curvature written in tau.
double frenet_curvature(const std::function<double(double)>& th, const std::function<double(double)>& ph, double t) {
  const double h = 1e-3;
  const auto r = [&](double s) { return unit(th(s), ph(s)); };
  const Vec3 rm2 = r(t - 2 * h), rm = r(t - h), r0 = r(t), rp = r(t + h), rp2 = r(t + 2 * h);
  Vec3 d1, d2;
  for (int i = 0; i < 3; ++i) {
    d1[i] = (rm2[i] - 8 * rm[i] + 8 * rp[i] - rp2[i]) / (12 * h);
    d2[i] = (-rm2[i] + 16 * rm[i] - 30 * r0[i] + 16 * rp[i] - rp2[i]) / (12 * h * h);
  }
  const Vec3 cr{r0[1] * d1[2] - r0[2] * d1[1], r0[2] * d1[0] - r0[0] * d1[2], r0[0] * d1[1] - r0[1] * d1[0]};
  const double speed = std::sqrt(d1[0] * d1[0] + d1[1] * d1[1] + d1[2] * d1[2]);
  return (cr[0] * d2[0] + cr[1] * d2[1] + cr[2] * d2[2]) / (speed * speed * speed);
}

BlochCurveModel random_curve() {
  return {SmoothFunction::polynomial({uniform(0.6, 1.2), uniform(-0.5, 0.5), uniform(-0.3, 0.3)}),
          SmoothFunction::polynomial({uniform(-1, 1), uniform(0.5, 2), uniform(-0.5, 0.5), uniform(-0.2, 0.2)})};
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("rotating-spin QGP is 2 K eta cos(theta)") {
    for (const RotatingSpinParams p : {RotatingSpinParams{1.0, 0.05, 1.0}, RotatingSpinParams{0.6, 0.8, 3.0},
                                       RotatingSpinParams{0.995, 0.0999, 1.0}}) {
      const double expected = 2 * p.K * p.eta * p.cos_theta();
      const auto grid = TimeGrid::uniform(0, 3, 4096);
      const auto model = rotating_spin(p);
      const auto a = qgp_series(build_frame(model, grid), kUpperLevel, kLowerLevel);
      const auto f = qgp_series(build_frame(model.without_derivatives(), grid), kUpperLevel, kLowerLevel);
      CHECK(a.all_valid());
      for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(std::abs(a.delta[k] - expected) < 1e-8);
        CHECK(std::abs(f.delta[k] - expected) < 1e-5);
        CHECK(a.ratio[k] == doctest::Approx(a.delta[k] / (2 * a.gamma_abs[k])));
      }
    }
  }

  TEST_CASE("Bloch-curve QGP matches the closed-form angle expression") {
    for (int trial = 0; trial < 5; ++trial) {
      const BlochCurveModel c = random_curve();
      const auto grid = TimeGrid::uniform(0, 1, 2048);
      const auto q = qgp_series(build_frame(bloch_curve(c), grid), kUpperLevel, kLowerLevel);
      const auto qf = qgp_series(build_frame(bloch_curve(c).without_derivatives(), grid), kUpperLevel, kLowerLevel);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double expected = delta_formula(c.theta, c.phi, grid.samples[k]);
        CHECK(std::abs(q.delta[k] - expected) < 1e-8);
        CHECK(std::abs(qf.delta[k] - expected) < 1e-5);
      }
    }
  }

  TEST_CASE("QGP antisymmetry and degenerate input") {
    const auto f = build_frame(bloch_curve(random_curve()), TimeGrid::uniform(0, 1, 1024));
    const auto up = qgp_series(f, 1, 0), down = qgp_series(f, 0, 1);
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(std::abs(up.delta[k] + down.delta[k]) < 1e-8);
    CHECK(kind_of([&] { qgp_series(f, 1, 1); }) == ErrorKind::InvalidParams);
    CHECK(kind_of([&] { qgp_series(f, 1, 2); }) == ErrorKind::OutOfRange);
    const auto flat = build_frame(constant_model(pauli::z()), TimeGrid::uniform(0, 1, 128));
    CHECK(kind_of([&] { qgp_series(flat, 1, 0); }) == ErrorKind::UndefinedArg);
  }

  TEST_CASE("QGP masks an isolated zero of the coupling") {
    // theta' vanishes and phi is constant at tau = 0.5, so gamma passes through zero there.
    const BlochCurveModel c{SmoothFunction::polynomial({1.0, -1.0, 1.0}), SmoothFunction::constant(0.3)};
    const auto f = build_frame(bloch_curve(c), TimeGrid::uniform(0, 1, 1025));
    const auto q = qgp_series(f, 1, 0);
    CHECK_FALSE(q.all_valid());
    CHECK_FALSE(q.valid[512]);
    CHECK(q.valid[0]);
  }

  TEST_CASE("geodesic curvature: great circle, parallel circle, random curves") {
    const auto great = SphereCurve::from(SmoothFunction::constant(kPi / 2), SmoothFunction::polynomial({0, 1}));
    CHECK(std::abs(geodesic_curvature(great, 0.4)) < 1e-14);
    for (double t0 : {0.3, 1.0, 2.0}) {
      const auto circle = SphereCurve::from(SmoothFunction::constant(t0), SmoothFunction::polynomial({0, 1}));
      CHECK(geodesic_curvature(circle, 0.7) == doctest::Approx(1.0 / std::tan(t0)).epsilon(1e-12));
    }
    for (int trial = 0; trial < 10; ++trial) {
      const BlochCurveModel c = random_curve();
      const auto exact = SphereCurve::from(c.theta, c.phi);
      const auto th = [&](double t) { return c.theta.value(t); };
      const auto ph = [&](double t) { return c.phi.value(t); };
      const auto sampled = SphereCurve::sampled(th, ph);
      for (double t : {0.1, 0.5, 0.9}) {
        const double oracle = frenet_curvature(th, ph, t);
        CHECK(std::abs(geodesic_curvature(exact, t) - oracle) < 1e-4);
        CHECK(std::abs(geodesic_curvature(sampled, t) - oracle) < 1e-4);
      }
    }
    const auto still = SphereCurve::from(SmoothFunction::constant(1.0), SmoothFunction::constant(0.0));
    CHECK(kind_of([&] { geodesic_curvature(still, 0.0); }) == ErrorKind::SingularPoint);
  }

  TEST_CASE("QGP over twice the coupling is the geodesic curvature") {
    const auto grid = TimeGrid::uniform(0, 1, 2048);
    const BlochCurveModel cone{SmoothFunction::constant(kPi / 3), SmoothFunction::polynomial({0, 2})};
    CHECK(qgp_curvature_identity(cone, grid, DerivativeMode::Analytic).max_deviation <= 1e-8);
    const BlochCurveModel equator{SmoothFunction::constant(kPi / 2), SmoothFunction::polynomial({0, 1})};
    CHECK(qgp_curvature_identity(equator, grid, DerivativeMode::Analytic).max_deviation <= 1e-8);
    const auto eq_frame = qgp_series(build_frame(bloch_curve(equator), grid), 1, 0);
    for (double d : eq_frame.delta) CHECK(std::abs(d) < 1e-10);
    for (int trial = 0; trial < 10; ++trial) {
      const BlochCurveModel c = random_curve();
      const auto fd = qgp_curvature_identity(c, grid, DerivativeMode::FiniteDifference);
      CHECK(fd.max_deviation <= 1e-4);
      CHECK(fd.samples_checked == grid.size());
      CHECK(qgp_curvature_identity(c, grid, DerivativeMode::Analytic).max_deviation <= 1e-8);
    }
  }

  TEST_CASE("Berry-phase difference on the rotating spin") {
    const RotatingSpinParams p{0.8, 0.6, 1.0};
    const double period = kPi / (p.K * p.eta);
    const auto f = build_frame(rotating_spin(p), TimeGrid::uniform(0, period, 4096));
    const auto b = berry_difference(f, kUpperLevel, kLowerLevel);
    // Holonomies -/+ pi (1 - cos theta) of the two levels, defined modulo 2 pi.
    const double solid = kPi * (1 - p.cos_theta());
    CHECK(std::abs(std::remainder(b.berry_m + solid, 2 * kPi)) < 1e-6);
    CHECK(std::abs(std::remainder(b.berry_n - solid, 2 * kPi)) < 1e-6);
    CHECK(b.residual < 1e-5);
    CHECK(b.delta_integral - (b.berry_m - b.berry_n) == doctest::Approx(2 * kPi * b.winding).epsilon(1e-6));
    CHECK(b.delta_integral == doctest::Approx(2 * p.K * p.eta * p.cos_theta() * period).epsilon(1e-8));
  }

  TEST_CASE("Berry-phase difference on a cone loop") {
    const double theta = 1.0;
    const BlochCurveModel c{SmoothFunction::constant(theta), SmoothFunction::polynomial({0, 1})};
    const auto f = build_frame(bloch_curve(c), TimeGrid::uniform(0, 2 * kPi, 4096));
    const auto b = berry_difference(f, kUpperLevel, kLowerLevel);
    CHECK(std::abs(std::remainder(b.berry_m + kPi * (1 - std::cos(theta)), 2 * kPi)) < 1e-6);
    CHECK(b.residual < 1e-5);
  }

  TEST_CASE("Berry-phase difference on random closed curves") {
    for (int trial = 0; trial < 5; ++trial) {
      const int j = 1 + trial % 2;
      const BlochCurveModel c{SmoothFunction::sinusoid(uniform(0.1, 0.4), j, uniform(0, 1), uniform(0.8, 2.2)),
                              SmoothFunction::sinusoid(uniform(0.1, 0.5), 1, 0, 0)};
      BlochCurveModel winding = c;
      winding.phi.poly = {0.0, 1.0};
      for (const auto& curve : {c, winding}) {
        const auto f = build_frame(bloch_curve(curve), TimeGrid::uniform(0, 2 * kPi, 4096));
        CHECK(berry_difference(f, 1, 0).residual < 1e-5);
      }
    }
  }

  TEST_CASE("back-and-forth loop has vanishing integrals") {
    // theta runs 0.6 -> 1.2 -> 0.6 along a fixed meridian; no area is enclosed.
    const BlochCurveModel c{SmoothFunction::sinusoid(0.3, 1, -kPi / 2, 0.9), SmoothFunction::constant(0.4)};
    const auto f = build_frame(bloch_curve(c), TimeGrid::uniform(0, 2 * kPi, 2048));
    const auto b = berry_difference(f, 1, 0);
    CHECK(std::abs(b.delta_integral) < 1e-8);
    CHECK(std::abs(b.berry_m) < 1e-8);
    CHECK(std::abs(b.berry_n) < 1e-8);
    CHECK(b.winding == 0);
  }

  TEST_CASE("open paths are rejected") {
    const BlochCurveModel c{SmoothFunction::constant(1.0), SmoothFunction::polynomial({0, 1})};
    const auto f = build_frame(bloch_curve(c), TimeGrid::uniform(0, 3, 1024));
    CHECK(kind_of([&] { berry_difference(f, 1, 0); }) == ErrorKind::NotClosed);
  }

  TEST_CASE("QGP over coupling is invariant under time maps") {
    const auto grid = TimeGrid::uniform(0, 2, 2048);
    const auto spin = rotating_spin({0.9, 0.4, 1.3});
    const auto spin_frame = build_frame(spin, grid);
    CHECK(reparam_invariance_check(spin, spin_frame, 1, 0, TimeMap::identity()).max_deviation < 1e-12);
    const TimeMap wobble{[](double t) { return t + 0.3 * std::sin(t); }, [](double t) { return 1 + 0.3 * std::cos(t); },
                         [](double t) { return -0.3 * std::sin(t); }};
    CHECK(reparam_invariance_check(spin, spin_frame, 1, 0, wobble).max_deviation <= 1e-4);

    const TimeMap cubic{[](double t) { return t * t * t + t; }, [](double t) { return 3 * t * t + 1; },
                        [](double t) { return 6 * t; }};
    for (int trial = 0; trial < 3; ++trial) {
      const auto model = bloch_curve(random_curve());
      const auto f = build_frame(model, TimeGrid::uniform(0, 1, 2048));
      CHECK(reparam_invariance_check(model, f, 1, 0, cubic).max_deviation <= 1e-3);
      CHECK(reparam_invariance_check(model, f, 1, 0, wobble).max_deviation <= 1e-4);
    }
  }

  TEST_CASE("reparametrized model evaluates the original at the inverse time") {
    const auto model = bloch_curve(random_curve());
    const TimeMap cubic{[](double t) { return t * t * t + t; }, [](double t) { return 3 * t * t + 1; },
                        [](double t) { return 6 * t; }};
    const auto r = reparametrized(model, cubic, 0, 1);
    for (double t : {0.0, 0.3, 0.8, 1.0}) CHECK(max_abs_diff(r.evaluate(t * t * t + t), model.evaluate(t)) < 1e-12);
  }

  TEST_CASE("flattening reparametrization") {
    const auto spin = reparametrize_flat(rotating_spin({0.8, 0.6, 1.5}), 0, 2, 1024);
    CHECK(spin.max_deviation < 1e-8);
    // The map is affine for a constant coupling.
    for (std::size_t k = 0; k < spin.new_tau.size(); k += 50) {
      CHECK(std::abs(spin.old_tau[k] - spin.new_tau[k]) < 1e-9);
    }

    const BlochCurveModel c{SmoothFunction::constant(kPi / 3), SmoothFunction::polynomial({0, 0, 1})};
    const auto cone = reparametrize_flat(bloch_curve(c), 0.5, 2.5, 2048);
    CHECK(cone.max_deviation <= 1e-4);
    CHECK(cone.total_variation <= 1e-3 * std::abs(cone.mean));
    for (std::size_t k = 1; k < cone.old_tau.size(); ++k) CHECK(cone.old_tau[k] > cone.old_tau[k - 1]);

    const auto same = reparametrize_flat(bloch_curve(c), 1.0, 1.0);
    CHECK(same.identity);

    CHECK(kind_of([&] { reparametrize_flat(bloch_curve(c), 2.0, 1.0); }) == ErrorKind::InvalidParams);
    // gamma vanishes at tau = 0 where phi' = 0.
    CHECK(kind_of([&] { reparametrize_flat(bloch_curve(c), 0.0, 1.0); }) == ErrorKind::DegenerateCoupling);
    CHECK(kind_of([&] { reparametrize_flat(constant_model(Matrix::identity(3)), 0.0, 1.0); }) ==
          ErrorKind::InvalidParams);
  }

  TEST_CASE("coupling magnitude from a single diagonalization") {
    const RotatingSpinParams p{0.8, 0.6, 1.5};
    CHECK(coupling_magnitude(rotating_spin(p), 1, 0, 0.7) == doctest::Approx(p.K * p.eta * p.sin_theta()));
  }
}
