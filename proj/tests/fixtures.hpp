#ifndef PERWAVE_TEST_FIXTURES_HPP
#define PERWAVE_TEST_FIXTURES_HPP

// Shared fixtures.  The end-to-end wave is the viscous p-system with
// p(v) = v^3 - v and a transverse flux f^2 = (v w, v^2 / 2), at the
// amplitude-0.05 orbit around the center (1, 0) of
// v' = -w, w' = p(v) (limiting period 2 pi / sqrt(p'(1)) = pi sqrt(2)).

#include "perwave/constant_system.hpp"
#include "perwave/manifold.hpp"
#include "perwave/profile.hpp"
#include "perwave/system.hpp"

namespace fixtures {

inline const perwave::System& vdw_system() {
  static const perwave::System sys = [] {
    using namespace perwave;
    std::vector<std::vector<Polynomial>> extra = {
        {parse_flux_expression("u1*u2", 2), parse_flux_expression("0.5*u1^2", 2)}};
    return make_vdw_psystem(2, parse_flux_expression("u1^3 - u1", 1), extra);
  }();
  return sys;
}

// Transverse flux left at zero; only for tests of the degenerate default.
inline const perwave::System& vdw_plain_system() {
  static const perwave::System sys =
      perwave::make_vdw_psystem(2, perwave::parse_flux_expression("u1^3 - u1", 1));
  return sys;
}

inline perwave::ProfileParams vdw_params() {
  return perwave::ProfileParams::make(perwave::Vec::Zero(2), 0.0,
                                      perwave::Vec::Zero(1), perwave::Vec::Zero(2));
}

inline const perwave::PeriodicProfile& vdw_profile() {
  static const perwave::PeriodicProfile profile = [] {
    using namespace perwave;
    const System& sys = vdw_system();
    ProfileParams params = vdw_params();
    Vec guess(2);
    guess << 0.9, 0.0;
    const LinearCenter center = find_linear_center(sys, params, guess);
    return find_periodic(sys, harmonic_guess(center, 0.05), params);
  }();
  return profile;
}

inline const perwave::FamilyChart& vdw_chart() {
  static const perwave::FamilyChart chart =
      perwave::FamilyChart::make(vdw_system(), vdw_profile());
  return chart;
}

inline const perwave::HomogenizedJacobians& vdw_jacobians() {
  static const perwave::HomogenizedJacobians h =
      perwave::homogenized_jacobians(vdw_chart());
  return h;
}

// The constant-coefficient reference of the acceptance grid:
// n = 2, d = 2, A^1 = [[0,1],[1,0]], A^2 = diag(1,-1), B = I, X = 2 pi.
inline const perwave::ConstantSystem& oracle_system() {
  static const perwave::ConstantSystem sys = [] {
    perwave::ConstantSystem cs;
    perwave::Mat a1(2, 2), a2(2, 2);
    a1 << 0, 1, 1, 0;
    a2 << 1, 0, 0, -1;
    cs.a = {a1, a2};
    cs.b.assign(2, std::vector<perwave::Mat>(2));
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        cs.b[j][k] = (j == k) ? perwave::Mat::Identity(2, 2).eval() : perwave::Mat::Zero(2, 2).eval();
    cs.X = 2.0 * std::numbers::pi;
    return cs;
  }();
  return sys;
}

}  // namespace fixtures

#endif
