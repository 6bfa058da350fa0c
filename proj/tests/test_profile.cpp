#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "perwave/profile.hpp"

using namespace perwave;

namespace {

double hamiltonian(const Vec& u) {
  const double v = u(0), w = u(1);
  return 0.25 * v * v * v * v - 0.5 * v * v + 0.5 * w * w;
}

}  // namespace

TEST_CASE("linear profile flow matches the matrix exponential") {
  Mat a1(2, 2), a2(2, 2);
  a1 << 0, 1, 1, 0;
  a2.setZero();
  std::vector<std::vector<Mat>> b(2, std::vector<Mat>(2));
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      b[j][k] = (j == k) ? Mat::Identity(2, 2).eval() : Mat::Zero(2, 2).eval();
  const System sys = make_constant_coefficient({a1, a2}, b);
  const ProfileParams params = fixtures::vdw_params();
  Vec u0(2);
  u0 << 0.3, -0.8;
  const Trajectory traj = integrate_profile(sys, params, 1.7, u0);
  // exp(y A) u0 with A = [[0,1],[1,0]]: rotation by cosh/sinh.
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double y = traj.times[i];
    Mat e(2, 2);
    e << std::cosh(y), std::sinh(y), std::sinh(y), std::cosh(y);
    CHECK((traj.states[i] - e * u0).norm() < 1e-10);
  }
}

TEST_CASE("Hamiltonian is conserved along the vdw profile flow") {
  const System& sys = fixtures::vdw_plain_system();
  const ProfileParams params = fixtures::vdw_params();
  Vec u0(2);
  u0 << 1.08, 0.0;
  const double h0 = hamiltonian(u0);
  const Trajectory traj = integrate_profile(sys, params, 5.0, u0);
  double drift = 0.0;
  for (const Vec& u : traj.states) drift = std::max(drift, std::abs(hamiltonian(u) - h0));
  CHECK(drift < 1e-10);
}

TEST_CASE("equilibrium initial data stays constant") {
  const System& sys = fixtures::vdw_plain_system();
  const ProfileParams params = fixtures::vdw_params();
  Vec u0(2);
  u0 << 1.0, 0.0;  // p(1) = 0, w = 0: fixed point
  const Trajectory traj = integrate_profile(sys, params, 3.0, u0);
  for (const Vec& u : traj.states) CHECK((u - u0).norm() < 1e-12);
}

TEST_CASE("linear center of the vdw fixture sits at (1,0) with kappa = sqrt(2)") {
  const System& sys = fixtures::vdw_plain_system();
  Vec guess(2);
  guess << 0.8, 0.1;
  const LinearCenter center = find_linear_center(sys, fixtures::vdw_params(), guess);
  CHECK(center.center(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(center.center(1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(center.kappa == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("small-amplitude orbit has the harmonic period and tight closure") {
  const PeriodicProfile& p = fixtures::vdw_profile();
  CHECK(std::abs(p.X - std::numbers::pi * std::sqrt(2.0)) <= 0.05);
  CHECK(p.closure_residual <= 1e-10 * (1.0 + p.params.a.norm()));
  CHECK(p.amplitude >= 0.04);
  // Samples satisfy the profile equation: check the interpolant derivative.
  const System& sys = fixtures::vdw_system();
  ProfileField field(sys, p.params);
  double resid = 0.0;
  for (int i = 0; i < 32; ++i) {
    const double y = p.X * i / 32.0;
    resid = std::max(resid,
                     (p.interpolant.deriv(y, 1) - field.value(p.interpolant.eval(y)))
                         .cwiseAbs()
                         .maxCoeff());
  }
  CHECK(resid < 1e-8);
}

TEST_CASE("reversed orientation traverses the same orbit") {
  const PeriodicProfile& p = fixtures::vdw_profile();
  const System& sys = fixtures::vdw_system();
  const Trajectory back = integrate_profile(sys, p.params, -p.X, p.params.a);
  for (std::size_t i = 0; i < back.times.size(); ++i) {
    const double y = back.times[i];  // u(-y) = u(X - y) by periodicity
    CHECK((back.states[i] - p.interpolant.eval(p.X + y)).norm() < 1e-8);
  }
}

TEST_CASE("translation of the anchor reproduces the orbit and the period") {
  const PeriodicProfile& p = fixtures::vdw_profile();
  const System& sys = fixtures::vdw_system();
  for (double frac : {0.23, 0.61}) {
    const double h = frac * p.X;
    ProfileGuess guess{p.interpolant.eval(h), p.X};
    const PeriodicProfile q = find_periodic(sys, guess, p.params);
    CHECK(std::abs(q.X - p.X) <= 1e-10 * p.X);
    // Align phases through the interpolant, then compare pointwise.
    double shift = h;
    for (int it = 0; it < 50; ++it) {
      const Vec diff = p.interpolant.eval(shift) - q.params.a;
      const Vec dudy = p.interpolant.deriv(shift, 1);
      const double step = diff.dot(dudy) / dudy.squaredNorm();
      shift -= step;
      if (std::abs(step) < 1e-14) break;
    }
    double hausdorff = 0.0;
    for (int i = 0; i < 64; ++i) {
      const double y = q.X * i / 64.0;
      hausdorff = std::max(hausdorff,
                           (q.interpolant.eval(y) - p.interpolant.eval(y + shift)).norm());
    }
    CHECK(hausdorff < 1e-8);
  }
}

TEST_CASE("q2 continuation: center shifts to the p(v) = q2 root") {
  const System& sys = fixtures::vdw_plain_system();
  const PeriodicProfile& p = fixtures::vdw_profile();
  ProfileParams params = p.params;
  params.q(1) = 1e-3;
  ProfileSolveOptions opt;
  opt.max_iterations = 5;  // warm start must reconverge quickly
  const PeriodicProfile q = find_periodic(sys, ProfileGuess{p.params.a, p.X}, params, opt);
  CHECK(q.closure_residual <= 1e-10 * (1 + q.params.a.norm()));
  // New center: p(v*) = q2 => v* ~ 1 + q2 / p'(1).
  const Vec mean = q.interpolant.mean();
  CHECK(mean(0) == doctest::Approx(1.0 + 1e-3 / 2.0).epsilon(2e-3));
}

TEST_CASE("constant-state guess at an equilibrium violates the amplitude floor") {
  const System& sys = fixtures::vdw_plain_system();
  Vec a(2);
  a << 1.0, 0.0;
  CHECK_THROWS_WITH_AS(find_periodic(sys, ProfileGuess{a, 4.0}, fixtures::vdw_params()),
                       doctest::Contains("amplitude floor"), SolverError);
}

TEST_CASE("submersion check on the vdw fixture") {
  const System& sys = fixtures::vdw_system();
  const PeriodicProfile& p = fixtures::vdw_profile();
  const SubmersionReport rep = check_submersion(sys, p);
  CHECK(rep.pass);
  CHECK(rep.min_singular_value > 0.0);

  ProfileField field(sys, p.params);
  // dH/dX column = u'(X) = u'(0) by periodicity.
  CHECK((rep.jacobian.col(0) - field.value(p.params.a)).norm() < 1e-6);
  // dH/da block = monodromy - I, cross-checked against the variational flow.
  const Mat mono = profile_monodromy(sys, p);
  CHECK((rep.jacobian.block(0, 1, 2, 2) - (mono - Mat::Identity(2, 2))).norm() < 1e-8);
}

TEST_CASE("vdw monodromy has a double Floquet multiplier at one") {
  // Planar Hamiltonian profile flow: volume preserving, so both multipliers
  // are 1; this is the degeneracy the truncated-SVD Newton handles.
  const Mat mono = profile_monodromy(fixtures::vdw_system(), fixtures::vdw_profile());
  Eigen::EigenSolver<Mat> es(mono);
  for (int i = 0; i < 2; ++i)
    CHECK(std::abs(es.eigenvalues()(i) - Complex(1.0, 0.0)) < 1e-6);
}
