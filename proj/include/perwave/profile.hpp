#ifndef PERWAVE_PROFILE_HPP
#define PERWAVE_PROFILE_HPP

// Periodic traveling-wave profiles.  After one integration the wave solves
// the first-order profile equation
//
//   (sum_{jk} nu_j nu_k B^{jk}(u)) u' = sum_j nu_j f^j(u) - s u - q,
//
// a closed orbit of which is located by Newton shooting on (anchor, period)
// with a phase condition removing the translation degeneracy.

#include <optional>

#include "perwave/ode.hpp"
#include "perwave/system.hpp"
#include "perwave/trig_interp.hpp"

namespace perwave {

// Direction chart nu = (1, delta) / sqrt(1 + |delta|^2) near e_1.
inline Vec direction_from_chart(const Vec& delta) {
  Vec nu(delta.size() + 1);
  nu(0) = 1.0;
  nu.tail(delta.size()) = delta;
  return nu / nu.norm();
}

struct ProfileParams {
  Vec a;      // anchor point u(0)
  double s = 0.0;
  Vec delta;  // chart coordinates, length d-1
  Vec q;      // integration constant

  Vec nu() const { return direction_from_chart(delta); }

  static ProfileParams make(Vec a, double s, Vec delta, Vec q) {
    ProfileParams p;
    p.a = std::move(a);
    p.s = s;
    p.delta = std::move(delta);
    p.q = std::move(q);
    return p;
  }
};

// u' = G(u) with G = Btilde(u)^{-1} (sum_j nu_j f^j(u) - s u - q).
class ProfileField {
 public:
  ProfileField(const System& sys, const ProfileParams& params)
      : sys_(&sys), s_(params.s), q_(params.q), nu_(params.nu()) {}

  const Vec& nu() const { return nu_; }

  Vec operator()(double, const Vec& u) const { return value(u); }

  Vec value(const Vec& u) const {
    Vec rhs = -s_ * u - q_;
    for (int j = 0; j < sys_->d; ++j) rhs += nu_(j) * sys_->flux[static_cast<std::size_t>(j)](u);
    if (sys_->laplacian) return rhs;
    return solve_viscosity(u, rhs);
  }

  // Directional derivative DG(u) z.
  Vec jacobian_apply(const Vec& u, const Vec& z) const {
    Vec rhs = -s_ * z;
    for (int j = 0; j < sys_->d; ++j)
      rhs += nu_(j) * (sys_->flux_jacobian[static_cast<std::size_t>(j)](u) * z);
    if (sys_->laplacian) return rhs;
    const Tensor3 db = sys_->viscosity_derivative_in_direction(nu_, u);
    rhs -= partial_contract(db, z) * value(u);
    return solve_viscosity(u, rhs);
  }

  Mat jacobian(const Vec& u) const {
    Mat out(sys_->n, sys_->n);
    for (int v = 0; v < sys_->n; ++v)
      out.col(v) = jacobian_apply(u, Vec::Unit(sys_->n, v));
    return out;
  }

  // Forcing of the speed variation: d(du/ds)/dy = DG z - Btilde^{-1} u.
  Vec speed_forcing(const Vec& u) const {
    if (sys_->laplacian) return u;
    return solve_viscosity(u, u);
  }

 private:
  Vec solve_viscosity(const Vec& u, const Vec& rhs) const {
    Eigen::FullPivLU<Mat> lu(sys_->viscosity_in_direction(nu_, u));
    if (!lu.isInvertible())
      throw SolverError("profile: viscosity matrix singular along trajectory");
    return lu.solve(rhs);
  }

  const System* sys_;
  double s_;
  Vec q_;
  Vec nu_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
};

inline Trajectory integrate_profile(const System& sys, const ProfileParams& params,
                                    double y_end, const Vec& u0,
                                    const OdeOptions& ode = {}) {
  ProfileField field(sys, params);
  Trajectory traj;
  integrate_ode<double>(
      field, u0, 0.0, y_end, ode,
      [&traj](double t, const Vec& y) {
        traj.times.push_back(t);
        traj.states.push_back(y);
      });
  return traj;
}

struct PeriodicProfile {
  ProfileParams params;
  double X = 0.0;           // period
  Mat samples;              // n x m states on y_i = i X / m
  TrigInterpolant interpolant;
  double closure_residual = 0.0;
  double amplitude = 0.0;   // max component variation over the orbit

  double omega() const { return 1.0 / X; }
  Vec value(double y) const { return interpolant.eval(y); }
};

struct ProfileSolveOptions {
  OdeOptions ode{};
  double newton_tol = 5e-13;
  int max_iterations = 30;
  int sample_count = 256;
  double amplitude_floor = 1e-6;  // <= 0 waives the nonconstant check
  // Phase condition <a - ref_point, ref_tangent> = 0; when absent, the
  // component of a with the largest |u'(0)| entry is frozen.
  std::optional<std::pair<Vec, Vec>> phase_reference;
};

struct ProfileGuess {
  Vec a;
  double X = 0.0;
};

namespace profile_detail {

// Integrate (u, Z) with Z' = DG(u) Z, Z(0) = I: endpoint state and monodromy.
inline std::pair<Vec, Mat> flow_with_monodromy(const ProfileField& field, const Vec& a,
                                               double X, const OdeOptions& ode) {
  const int n = static_cast<int>(a.size());
  Vec state(n + n * n);
  state.head(n) = a;
  Mat z0 = Mat::Identity(n, n);
  state.tail(n * n) = Eigen::Map<const Vec>(z0.data(), n * n);
  auto rhs = [&field, n](double, const Vec& y) {
    Vec dy(y.size());
    const Vec u = y.head(n);
    dy.head(n) = field.value(u);
    const Eigen::Map<const Mat> z(y.tail(n * n).data(), n, n);
    Mat dz(n, n);
    for (int c = 0; c < n; ++c) dz.col(c) = field.jacobian_apply(u, z.col(c));
    dy.tail(n * n) = Eigen::Map<const Vec>(dz.data(), n * n);
    return dy;
  };
  const Vec end = integrate_ode<double>(rhs, state, 0.0, X, ode);
  Mat mono = Eigen::Map<const Mat>(end.tail(n * n).data(), n, n);
  return {end.head(n).eval(), mono};
}

// Sample the converged orbit on the uniform grid and package the profile.
inline PeriodicProfile finalize_profile(const System& sys, const ProfileParams& params,
                                        const Vec& a, double X, int m,
                                        const OdeOptions& ode) {
  ProfileField field(sys, params);
  PeriodicProfile profile;
  profile.params = params;
  profile.params.a = a;
  profile.X = X;
  std::vector<double> times(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) times[static_cast<std::size_t>(i)] = X * i / m;
  const auto states = integrate_at_times<double>(field, a, times, ode);
  profile.samples.resize(sys.n, m);
  for (int i = 0; i < m; ++i) profile.samples.col(i) = states[static_cast<std::size_t>(i)];
  profile.closure_residual = (states.back() - a).norm();
  profile.interpolant = TrigInterpolant(profile.samples, X);
  profile.amplitude =
      (profile.samples.rowwise().maxCoeff() - profile.samples.rowwise().minCoeff()).maxCoeff();
  return profile;
}

}  // namespace profile_detail

// Monodromy of the linearized profile equation about a periodic profile.
inline Mat profile_monodromy(const System& sys, const PeriodicProfile& profile,
                             const OdeOptions& ode = {}) {
  ProfileField field(sys, profile.params);
  return profile_detail::flow_with_monodromy(field, profile.params.a, profile.X, ode).second;
}

// Newton shooting for a closed orbit: unknowns (a, X), residuals
// u(X; a) - a plus one phase condition.
inline PeriodicProfile find_periodic(const System& sys, const ProfileGuess& guess,
                                     const ProfileParams& held,
                                     const ProfileSolveOptions& opt = {}) {
  const int n = sys.n;
  ProfileParams params = held;
  params.a = guess.a;
  ProfileField field(sys, params);

  Vec phase_point, phase_tangent;
  if (opt.phase_reference) {
    phase_point = opt.phase_reference->first;
    phase_tangent = opt.phase_reference->second;
  } else {
    phase_point = guess.a;
    const Vec up0 = field.value(guess.a);
    int imax = 0;
    up0.cwiseAbs().maxCoeff(&imax);
    phase_tangent = Vec::Unit(n, imax);
  }
  const double tangent_norm = phase_tangent.norm();
  if (tangent_norm < 1e-14)
    throw SolverError("find_periodic: degenerate phase condition");
  phase_tangent /= tangent_norm;

  if (!(guess.X > 0.0)) throw ConfigError("find_periodic: period guess must be positive");

  // Newton on (a, X) with the phase row.  Quasi-Hamiltonian profile fields
  // carry a conserved quantity, so closed orbits come in one-parameter
  // families at fixed (s, nu, q); plain Newton then slides along the family
  // and lands on the constant state at its center.  When that happens the
  // solve is repeated with the anchor coordinate transverse to the flow
  // pinned at its guessed value (a consistent overdetermined system on the
  // family), which selects the intended orbit.
  auto newton = [&](bool pin_section) -> std::pair<Vec, double> {
    Vec a = guess.a;
    double X = guess.X;
    int section = 0;
    field.value(guess.a).cwiseAbs().minCoeff(&section);
    const int rows = n + 1 + (pin_section ? 1 : 0);
    for (int it = 0; it < opt.max_iterations; ++it) {
      const auto [uX, mono] = profile_detail::flow_with_monodromy(field, a, X, opt.ode);
      Vec residual = Vec::Zero(rows);
      residual.head(n) = uX - a;
      residual(n) = phase_tangent.dot(a - phase_point);
      if (pin_section) residual(n + 1) = a(section) - guess.a(section);
      const double scale = 1.0 + a.norm();
      if (residual.norm() <= opt.newton_tol * scale) return {a, X};
      Mat jac = Mat::Zero(rows, n + 1);
      jac.topLeftCorner(n, n) = mono - Mat::Identity(n, n);
      jac.block(0, n, n, 1) = field.value(uX);
      jac.block(n, 0, 1, n) = phase_tangent.transpose();
      if (pin_section) jac(n + 1, section) = 1.0;
      Eigen::JacobiSVD<Mat> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd.setThreshold(1e-10);
      if (svd.rank() == 0)
        throw SolverError("find_periodic: singular shooting Jacobian (phase condition degenerate?)");
      const Vec step = svd.solve(residual);
      a -= step.head(n);
      X -= step(n);
      if (!(X > 1e-8))
        throw SolverError("find_periodic: period collapsed during Newton iteration");
    }
    throw SolverError("find_periodic: Newton did not converge within iteration limit");
  };

  auto solve_and_package = [&](bool pin_section) {
    const auto [a, X] = newton(pin_section);
    return profile_detail::finalize_profile(sys, params, a, X, opt.sample_count, opt.ode);
  };

  PeriodicProfile profile = solve_and_package(false);
  if (opt.amplitude_floor > 0.0 && profile.amplitude < opt.amplitude_floor) {
    profile = solve_and_package(true);
    if (profile.amplitude < opt.amplitude_floor)
      throw SolverError("find_periodic: converged to a constant state (amplitude floor violated)");
  }
  return profile;
}

// Equilibrium of the profile field near `guess` and the angular frequency of
// its linear center, for harmonic initial guesses.
struct LinearCenter {
  Vec center;
  double kappa = 0.0;  // linearization eigenvalues +- i kappa
};

inline LinearCenter find_linear_center(const System& sys, const ProfileParams& params,
                                       Vec guess, double tol = 1e-13, int max_iter = 50) {
  ProfileField field(sys, params);
  for (int it = 0; it < max_iter; ++it) {
    const Vec r = field.value(guess);
    if (r.norm() <= tol * (1.0 + guess.norm())) break;
    Eigen::FullPivLU<Mat> lu(field.jacobian(guess));
    if (!lu.isInvertible()) throw SolverError("find_linear_center: singular Jacobian");
    guess -= lu.solve(r);
    if (it + 1 == max_iter)
      throw SolverError("find_linear_center: Newton did not converge");
  }
  Eigen::EigenSolver<Mat> es(field.jacobian(guess));
  double kappa = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Complex ev = es.eigenvalues()(i);
    if (std::abs(ev.real()) < 1e-8 * (1.0 + std::abs(ev.imag())))
      kappa = std::max(kappa, std::abs(ev.imag()));
  }
  if (kappa == 0.0)
    throw SolverError("find_linear_center: equilibrium is not a linear center");
  return {guess, kappa};
}

inline ProfileGuess harmonic_guess(const LinearCenter& center, double amplitude,
                                   int component = 0) {
  ProfileGuess g;
  g.a = center.center;
  g.a(component) += amplitude;
  g.X = 2.0 * std::numbers::pi / center.kappa;
  return g;
}

struct SubmersionReport {
  Mat jacobian;       // n x (2n + d + 1), columns ordered (X; a; s; delta; q)
  double min_singular_value = 0.0;
  double max_singular_value = 0.0;
  bool pass = false;
};

// (H2): rank of d/d(X; a, s, delta, q) [u(X; a, s, nu(delta), q) - a] at the
// profile, by central differences on the flow (the X column is exact).
inline SubmersionReport check_submersion(const System& sys, const PeriodicProfile& profile,
                                         double fd_step = 1e-5, double threshold = 1e-6,
                                         const OdeOptions& ode = {}) {
  const int n = sys.n;
  const int d = sys.d;
  const int ncols = 2 * n + d + 1;
  Mat jac(n, ncols);

  auto endpoint = [&](const ProfileParams& p, double X) {
    ProfileField f(sys, p);
    return integrate_ode<double>(f, p.a, 0.0, X, ode);
  };

  ProfileField field(sys, profile.params);
  jac.col(0) = field.value(endpoint(profile.params, profile.X));

  auto central = [&](auto&& bump, double scale) {
    ProfileParams pp = profile.params, pm = profile.params;
    const double h = fd_step * (1.0 + std::abs(scale));
    bump(pp, h);
    bump(pm, -h);
    return ((endpoint(pp, profile.X) - pp.a) - (endpoint(pm, profile.X) - pm.a)) / (2 * h);
  };

  int col = 1;
  for (int i = 0; i < n; ++i, ++col)
    jac.col(col) = central([i](ProfileParams& p, double h) { p.a(i) += h; },
                           profile.params.a(i));
  jac.col(col++) = central([](ProfileParams& p, double h) { p.s += h; }, profile.params.s);
  for (int j = 0; j < d - 1; ++j, ++col)
    jac.col(col) = central([j](ProfileParams& p, double h) { p.delta(j) += h; },
                           profile.params.delta(j));
  for (int i = 0; i < n; ++i, ++col)
    jac.col(col) = central([i](ProfileParams& p, double h) { p.q(i) += h; },
                           profile.params.q(i));

  Eigen::JacobiSVD<Mat> svd(jac);
  SubmersionReport rep;
  rep.jacobian = jac;
  rep.min_singular_value = svd.singularValues().minCoeff();
  rep.max_singular_value = svd.singularValues().maxCoeff();
  rep.pass = rep.min_singular_value >= threshold * rep.max_singular_value;
  return rep;
}

}  // namespace perwave

#endif
