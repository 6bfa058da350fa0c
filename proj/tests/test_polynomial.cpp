#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "perwave/polynomial.hpp"

using namespace perwave;

namespace {

const Monomial* find_term(const Polynomial& p, const std::vector<int>& exps) {
  for (const auto& m : p.terms())
    if (m.exponents == exps) return &m;
  return nullptr;
}

}  // namespace

TEST_CASE("cubic minus linear expands to two monomials") {
  const Polynomial p = parse_flux_expression("u1^3 - u1", 1);
  REQUIRE(p.terms().size() == 2);
  const auto* cubic = find_term(p, {3});
  const auto* linear = find_term(p, {1});
  REQUIRE(cubic != nullptr);
  REQUIRE(linear != nullptr);
  CHECK(cubic->coeff == 1.0);
  CHECK(linear->coeff == -1.0);
}

TEST_CASE("zero literal gives the empty polynomial") {
  const Polynomial p = parse_flux_expression("0", 1);
  CHECK(p.is_zero());
  Vec u(1);
  u << 3.7;
  CHECK(p.eval(u) == 0.0);
}

TEST_CASE("binomial square expands canonically and evaluates like the source") {
  const Polynomial p = parse_flux_expression("(u1 + u2)^2", 2);
  REQUIRE(p.terms().size() == 3);
  CHECK(find_term(p, {2, 0})->coeff == 1.0);
  CHECK(find_term(p, {1, 1})->coeff == 2.0);
  CHECK(find_term(p, {0, 2})->coeff == 1.0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    Vec u(2);
    u << dist(rng), dist(rng);
    const double direct = (u(0) + u(1)) * (u(0) + u(1));
    CHECK(p.eval(u) == doctest::Approx(direct).epsilon(1e-14));
  }
}

TEST_CASE("differentiation is exact on monomials") {
  const Polynomial p = parse_flux_expression("2*u1^3*u2 - u2^2 + 4", 2);
  const Polynomial dp1 = p.derivative(0);
  const Polynomial dp2 = p.derivative(1);
  Vec u(2);
  u << 1.5, -0.5;
  CHECK(dp1.eval(u) == doctest::Approx(6 * 1.5 * 1.5 * -0.5).epsilon(1e-15));
  CHECK(dp2.eval(u) == doctest::Approx(2 * 1.5 * 1.5 * 1.5 - 2 * -0.5).epsilon(1e-15));
}

TEST_CASE("parse of print is the identity on canonical forms") {
  const char* cases[] = {"u1^3 - u1", "(u1 + u2)^2", "0", "-2.5*u1*u2 + 1e-3",
                         "u2^4 - 0.125*u1^2*u2 + 7"};
  for (const char* text : cases) {
    const Polynomial p = parse_flux_expression(text, 2);
    const Polynomial q = parse_flux_expression(p.print(), 2);
    REQUIRE(q.terms().size() == p.terms().size());
    for (std::size_t i = 0; i < p.terms().size(); ++i) {
      CHECK(q.terms()[i].exponents == p.terms()[i].exponents);
      CHECK(q.terms()[i].coeff == p.terms()[i].coeff);
    }
  }
}

TEST_CASE("syntax errors carry a position") {
  CHECK_THROWS_WITH_AS(parse_flux_expression("u1 + ", 1),
                       doctest::Contains("position"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_flux_expression("u1^-2", 1),
                       doctest::Contains("nonnegative integer"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_flux_expression("u1^2.5", 1),
                       doctest::Contains("integer"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_flux_expression("x1 + 1", 1),
                       doctest::Contains("unknown variable"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_flux_expression("u5", 2),
                       doctest::Contains("unknown variable"), ConfigError);
}

TEST_CASE("unary minus and scientific literals parse") {
  const Polynomial p = parse_flux_expression("-u1 + 1.5e2 - -u2", 2);
  Vec u(2);
  u << 2.0, 3.0;
  CHECK(p.eval(u) == doctest::Approx(-2.0 + 150.0 + 3.0));
}
