#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "perwave/system.hpp"

using namespace perwave;

namespace {

System vdw(int d = 2) {
  return make_vdw_psystem(d, parse_flux_expression("u1^3 - u1", 1));
}

}  // namespace

TEST_CASE("constant-coefficient builtin") {
  Mat a1(2, 2), a2(2, 2);
  a1 << 0, 1, 1, 0;
  a2 << 0, 0, 0, 0;
  std::vector<std::vector<Mat>> b(2, std::vector<Mat>(2));
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      b[j][k] = (j == k) ? Mat::Identity(2, 2).eval() : Mat::Zero(2, 2).eval();
  const System sys = make_constant_coefficient({a1, a2}, b);
  CHECK(sys.n == 2);
  CHECK(sys.d == 2);
  CHECK(sys.laplacian);
  Vec u(2);
  u << 3.0, -2.0;
  CHECK((sys.flux[0](u) - a1 * u).norm() == 0.0);
  CHECK((sys.flux_jacobian[0](u) - a1).norm() == 0.0);
}

TEST_CASE("vdw builtin: Jacobian of (-w, p(v))") {
  const System sys = vdw();
  CHECK(sys.laplacian);
  Vec u0(2);
  u0 << 0.0, 0.0;
  Mat expected(2, 2);
  expected << 0, -1, -1, 0;  // p'(0) = -1
  CHECK((sys.flux_jacobian[0](u0) - expected).norm() < 1e-15);

  Vec u2(2);
  u2 << 2.0, 0.3;
  const Mat jac = sys.flux_jacobian[0](u2);
  CHECK(jac(1, 0) == doctest::Approx(11.0));  // p'(2) = 3*4 - 1
  CHECK(jac(1, 1) == 0.0);
}

TEST_CASE("flux Jacobians match finite differences at quasi-random states") {
  Mat box(2, 2);
  box << -1.5, 1.5, -1.5, 1.5;
  const auto states = halton_box(box, 100, 42);

  const System sys = vdw();
  CHECK(flux_jacobian_residual(sys, states) < 1e-6);

  std::vector<std::vector<Polynomial>> extra = {
      {parse_flux_expression("u1*u2", 2), parse_flux_expression("0.5*u1^2", 2)}};
  const System sys2 = make_vdw_psystem(2, parse_flux_expression("u1^3 - u1", 1), extra);
  CHECK(flux_jacobian_residual(sys2, states) < 1e-6);
}

TEST_CASE("parabolicity: Laplacian always returns theta = 1 exactly") {
  const System sys = vdw();
  Mat box(2, 2);
  box << -1, 1, -1, 1;
  const auto report = check_parabolicity(sys, sphere_directions(2, 8),
                                         halton_box(box, 5, 0));
  CHECK(report.theta_estimate == 1.0);
  CHECK(report.pass);
}

TEST_CASE("parabolicity: singular and triangular viscosity blocks") {
  auto with_b11 = [](const Mat& b11) {
    Mat a = Mat::Zero(2, 2);
    std::vector<std::vector<Mat>> b(2, std::vector<Mat>(2, Mat::Zero(2, 2)));
    b[0][0] = b11;
    b[1][1] = Mat::Identity(2, 2);
    return make_constant_coefficient({a, a}, b);
  };
  Vec e1(2);
  e1 << 1.0, 0.0;
  Vec u = Vec::Zero(2);

  Mat singular(2, 2);
  singular << 1, 0, 0, 0;
  auto rep = check_parabolicity(with_b11(singular), {e1}, {u});
  CHECK(rep.theta_estimate == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(rep.pass);

  Mat tri(2, 2);
  tri << 2, 1, 0, 3;
  rep = check_parabolicity(with_b11(tri), {e1}, {u});
  CHECK(rep.theta_estimate == doctest::Approx(2.0));
  CHECK(rep.pass);
}

TEST_CASE("vdw extra flux shape errors are reported") {
  CHECK_THROWS_AS(make_vdw_psystem(2, parse_flux_expression("u1 + u2", 2)), ConfigError);
  std::vector<std::vector<Polynomial>> bad = {{parse_flux_expression("u1", 2)}};
  CHECK_THROWS_AS(make_vdw_psystem(2, parse_flux_expression("u1^2", 1), bad), ConfigError);
}
