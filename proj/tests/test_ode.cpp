#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "perwave/ode.hpp"
#include "perwave/trig_interp.hpp"

using namespace perwave;

TEST_CASE("scalar exponential to machine accuracy") {
  Vec y0(1);
  y0 << 1.0;
  const Vec y = integrate_ode<double>(
      [](double, const Vec& v) { return v; }, y0, 0.0, 1.0);
  CHECK(std::abs(y(0) - std::exp(1.0)) < 1e-12);
}

TEST_CASE("hyperbolic rotation matches the closed form") {
  // y' = A y with A = [[0,1],[1,0]]: y(t) = (cosh t, sinh t) from (1, 0).
  Vec y0(2);
  y0 << 1.0, 0.0;
  Mat a(2, 2);
  a << 0, 1, 1, 0;
  const Vec y = integrate_ode<double>(
      [&a](double, const Vec& v) { return (a * v).eval(); }, y0, 0.0, 2.0);
  CHECK(std::abs(y(0) - std::cosh(2.0)) < 1e-11);
  CHECK(std::abs(y(1) - std::sinh(2.0)) < 1e-11);
}

TEST_CASE("complex oscillator both directions") {
  CVec y0(1);
  y0 << Complex(1.0, 0.0);
  const CVec fwd = integrate_ode<Complex>(
      [](double, const CVec& v) { return (kImag * v).eval(); }, y0, 0.0, 3.0);
  CHECK(std::abs(fwd(0) - std::exp(kImag * 3.0)) < 1e-12);
  const CVec bwd = integrate_ode<Complex>(
      [](double, const CVec& v) { return (kImag * v).eval(); }, y0, 0.0, -2.0);
  CHECK(std::abs(bwd(0) - std::exp(kImag * -2.0)) < 1e-12);
}

TEST_CASE("eighth-order convergence under tolerance tightening") {
  // Nonlinear problem y' = y^2, y(0) = 1, y(t) = 1/(1-t).
  auto run = [](double tol) {
    Vec y0(1);
    y0 << 1.0;
    OdeOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = tol * 1e-2;
    const Vec y = integrate_ode<double>(
        [](double, const Vec& v) { return (v.array() * v.array()).matrix().eval(); },
        y0, 0.0, 0.5, opt);
    return std::abs(y(0) - 2.0);
  };
  CHECK(run(1e-6) < 1e-5);
  CHECK(run(1e-12) < 1e-11);
}

TEST_CASE("blow-up reports step-size underflow") {
  Vec y0(1);
  y0 << 1.0;
  CHECK_THROWS_AS(integrate_ode<double>(
                      [](double, const Vec& v) {
                        return (v.array() * v.array()).matrix().eval();
                      },
                      y0, 0.0, 2.0),
                  SolverError);
}

TEST_CASE("integrate_at_times hits sample points") {
  Vec y0(1);
  y0 << 1.0;
  std::vector<double> ts = {0.0, 0.25, 0.5, 0.75, 1.0};
  const auto states = integrate_at_times<double>(
      [](double, const Vec& v) { return v; }, y0, ts);
  REQUIRE(states.size() == ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i)
    CHECK(std::abs(states[i](0) - std::exp(ts[i])) < 1e-12);
}

TEST_CASE("trig interpolant reproduces smooth periodic data spectrally") {
  const int m = 64;
  const double period = 2.0 * std::numbers::pi;
  Mat samples(2, m);
  for (int i = 0; i < m; ++i) {
    const double y = period * i / m;
    samples(0, i) = std::sin(y) + 0.25 * std::cos(3 * y);
    samples(1, i) = std::exp(std::cos(y));
  }
  const TrigInterpolant interp(samples, period);
  for (double y : {0.1, 1.7, 4.2, 6.0}) {
    CHECK(interp.eval(y)(0) ==
          doctest::Approx(std::sin(y) + 0.25 * std::cos(3 * y)).epsilon(1e-12));
    CHECK(interp.eval(y)(1) == doctest::Approx(std::exp(std::cos(y))).epsilon(1e-12));
    CHECK(interp.deriv(y, 1)(0) ==
          doctest::Approx(std::cos(y) - 0.75 * std::sin(3 * y)).epsilon(1e-10));
  }
  CHECK(interp.mean()(0) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("fft round trip") {
  CVec a(8);
  for (int i = 0; i < 8; ++i) a(i) = Complex(i * 0.3, -i * 0.1);
  CVec b = a;
  fft_radix2(b, -1);
  fft_radix2(b, +1);
  b /= 8.0;
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-14);
}
