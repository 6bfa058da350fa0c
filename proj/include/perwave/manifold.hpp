#ifndef PERWAVE_MANIFOLD_HPP
#define PERWAVE_MANIFOLD_HPP

// The local (n+d)-parameter family of periodic orbits around a base profile,
// charted by theta = (s, delta_2..delta_d, q_1..q_n), and the averaged
// quantities entering the homogenized (slow modulation) system:
//
//   M   = (1/X) int u dy,
//   F^j = (1/X) int (f^j(u) - sum_k B^{jk}(u) nu_k u') dy,
//   Omega = 1/X,  S = s,  N = nu(delta).
//
// The pairing sum_j nu_j F^j = S M + Q holds exactly by the profile
// equation and is used as a consistency check downstream.

#include "perwave/profile.hpp"

namespace perwave {

struct AveragedQuantities {
  Vec m;                // mean state, R^n
  std::vector<Vec> f;   // averaged fluxes F^j, j = 1..d
  double omega = 0.0;
  double s = 0.0;
  Vec n;                // unit direction
  Vec q;

  // sum_j N_j F^j - (S M + Q); zero up to quadrature error.
  Vec flux_identity_residual() const {
    Vec acc = -(s * m + q);
    for (std::size_t j = 0; j < f.size(); ++j) acc += n(static_cast<Eigen::Index>(j)) * f[j];
    return acc;
  }
};

inline AveragedQuantities averaged_quantities(const System& sys,
                                              const PeriodicProfile& profile) {
  const int m = static_cast<int>(profile.samples.cols());
  ProfileField field(sys, profile.params);
  const Vec nu = profile.params.nu();

  AveragedQuantities out;
  out.m = periodic_average(profile.samples);
  out.omega = 1.0 / profile.X;
  out.s = profile.params.s;
  out.n = nu;
  out.q = profile.params.q;
  out.f.assign(static_cast<std::size_t>(sys.d), Vec::Zero(sys.n));
  for (int i = 0; i < m; ++i) {
    const Vec u = profile.samples.col(i);
    const Vec uprime = field.value(u);
    for (int j = 0; j < sys.d; ++j) {
      Vec integrand = sys.flux[static_cast<std::size_t>(j)](u);
      if (sys.laplacian) {
        integrand -= nu(j) * uprime;
      } else {
        for (int k = 0; k < sys.d; ++k)
          integrand -= nu(k) * (sys.viscosity[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)](u) * uprime);
      }
      out.f[static_cast<std::size_t>(j)] += integrand;
    }
  }
  for (auto& fj : out.f) fj /= static_cast<double>(m);
  return out;
}

// Chart of the orbit family: theta = (c, delta_2..delta_d, q_1..q_n), where
// c is the anchor coordinate a(section) on the phase section.  Speed s,
// the remaining anchor components, and the period X are dependent variables
// recovered by Newton.
//
// The seemingly simpler chart (s, delta, q) degenerates at quasi-Hamiltonian
// profiles: there the closed orbits at fixed (delta, q) form an energy
// family entirely inside {s = 0} (the field's divergence is -ns for the
// Laplacian p-system, so s != 0 admits no closed orbit at delta = 0), and
// the energy direction projects to zero.  The anchor-section coordinate
// parametrizes the energy family directly and reduces to the generic case
// otherwise; every determinant built from the chart Jacobians changes only
// by a constant factor under this choice.
struct FamilyChart {
  const System* sys = nullptr;
  PeriodicProfile base;
  ProfileSolveOptions solve{};
  int section = 0;      // index of the chart anchor coordinate
  Vec phase_tangent;    // <a - a_base, tangent> = 0
  Vec uprime_base;      // u'(0) of the base profile

  static FamilyChart make(const System& sys, const PeriodicProfile& base,
                          ProfileSolveOptions solve = {}) {
    FamilyChart chart;
    chart.sys = &sys;
    chart.base = base;
    ProfileField field(sys, base.params);
    chart.uprime_base = field.value(base.params.a);
    chart.phase_tangent = chart.uprime_base / chart.uprime_base.norm();
    // Most transverse anchor coordinate: the flow moves it least.
    chart.uprime_base.cwiseAbs().minCoeff(&chart.section);
    chart.solve = std::move(solve);
    return chart;
  }

  int dim() const { return sys->n + sys->d; }

  Vec theta_base() const {
    Vec theta(dim());
    theta(0) = base.params.a(section);
    theta.segment(1, sys->d - 1) = base.params.delta;
    theta.tail(sys->n) = base.params.q;
    return theta;
  }

  ProfileParams params_at(const Vec& theta) const {
    ProfileParams p = base.params;
    p.delta = theta.segment(1, sys->d - 1);
    p.q = theta.tail(sys->n);
    return p;
  }
};

namespace manifold_detail {

// Endpoint, monodromy, and speed variation in one pass.
struct FamilyFlow {
  Vec u_end;
  Mat monodromy;
  Vec z_s;  // du(X)/ds at fixed anchor
};

inline FamilyFlow family_flow(const System& sys, const ProfileParams& params,
                              const Vec& a, double X, const OdeOptions& ode) {
  const int n = sys.n;
  ProfileField field(sys, params);
  Vec state = Vec::Zero(n + n * n + n);
  state.head(n) = a;
  for (int j = 0; j < n; ++j) state(n + j * n + j) = 1.0;
  auto rhs = [&field, n](double, const Vec& y) {
    Vec dy(y.size());
    const Vec u = y.head(n);
    dy.head(n) = field.value(u);
    const Eigen::Map<const Mat> z(y.segment(n, n * n).data(), n, n);
    Mat dz(n, n);
    for (int c = 0; c < n; ++c) dz.col(c) = field.jacobian_apply(u, z.col(c));
    dy.segment(n, n * n) = Eigen::Map<const Vec>(dz.data(), n * n);
    // d/ds of the profile equation: z' = DG z - Btilde^{-1} u.
    const Vec zs = y.tail(n);
    dy.tail(n) = field.jacobian_apply(u, zs) - field.speed_forcing(u);
    return dy;
  };
  const Vec end = integrate_ode<double>(rhs, state, 0.0, X, ode);
  FamilyFlow out;
  out.u_end = end.head(n);
  out.monodromy = Eigen::Map<const Mat>(end.segment(n, n * n).data(), n, n);
  out.z_s = end.tail(n);
  return out;
}

}  // namespace manifold_detail

// Newton on (a, s, X) with conditions: closure u(X) = a, the base phase
// condition, and the section pin a(section) = c.
inline PeriodicProfile solve_family_point(const FamilyChart& chart, const Vec& theta) {
  if (theta.size() != chart.dim())
    throw ConfigError("solve_family_point: theta has wrong dimension");
  const System& sys = *chart.sys;
  const int n = sys.n;
  ProfileParams params = chart.params_at(theta);
  const double c = theta(0);

  Vec a = chart.base.params.a;
  a(chart.section) = c;
  double s = chart.base.params.s;
  double X = chart.base.X;
  const auto& opt = chart.solve;

  bool converged = false;
  for (int it = 0; it < opt.max_iterations; ++it) {
    params.s = s;
    const auto flow = manifold_detail::family_flow(sys, params, a, X, opt.ode);
    Vec residual(n + 2);
    residual.head(n) = flow.u_end - a;
    residual(n) = chart.phase_tangent.dot(a - chart.base.params.a);
    residual(n + 1) = a(chart.section) - c;
    if (residual.norm() <= opt.newton_tol * (1.0 + a.norm())) {
      converged = true;
      break;
    }
    ProfileField field(sys, params);
    Mat jac = Mat::Zero(n + 2, n + 2);
    jac.topLeftCorner(n, n) = flow.monodromy - Mat::Identity(n, n);
    jac.block(0, n, n, 1) = flow.z_s;
    jac.block(0, n + 1, n, 1) = field.value(flow.u_end);
    jac.block(n, 0, 1, n) = chart.phase_tangent.transpose();
    jac(n + 1, chart.section) = 1.0;
    Eigen::JacobiSVD<Mat> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-10);
    const Vec step = svd.solve(residual);
    a -= step.head(n);
    s -= step(n);
    X -= step(n + 1);
    if (!(X > 1e-8))
      throw SolverError("solve_family_point: period collapsed (chart radius exceeded?)");
  }
  if (!converged)
    throw SolverError("solve_family_point: Newton diverged (chart radius exceeded)");

  params.s = s;
  return profile_detail::finalize_profile(sys, params, a, X, opt.sample_count, opt.ode);
}

// Value maps whose theta-Jacobians form the dispersion pencil:
//   g(theta)   = (M, Omega N)          (rows 1..n, n+1..n+d)
//   h_j(theta) = (F^j, S Omega e_j).
inline Vec chart_conserved_values(const System& sys, const AveragedQuantities& avg) {
  Vec g(sys.n + sys.d);
  g.head(sys.n) = avg.m;
  g.tail(sys.d) = avg.omega * avg.n;
  return g;
}

inline Vec chart_flux_values(const System& sys, const AveragedQuantities& avg, int j) {
  Vec h = Vec::Zero(sys.n + sys.d);
  h.head(sys.n) = avg.f[static_cast<std::size_t>(j)];
  h(sys.n + j) = avg.s * avg.omega;
  return h;
}

struct HomogenizedJacobians {
  int n = 0;
  int d = 0;
  Mat p;                // d(M, Omega N)/d theta
  std::vector<Mat> q;   // d(F^j, S Omega e_j)/d theta, j = 1..d
  double step = 0.0;
  double richardson_error = 0.0;  // max entry estimate relative to block norms

  int dim() const { return n + d; }
};

struct JacobianOptions {
  double step = 1e-5;            // scaled per coordinate by (1 + |theta_i|)
  double richardson_tol = 1e-5;  // accept only below this relative estimate
};

// Central differences in each chart direction at steps h and h/2 with one
// Richardson refinement; throws when the error estimate exceeds tolerance.
inline HomogenizedJacobians homogenized_jacobians(const FamilyChart& chart,
                                                  const JacobianOptions& opt = {}) {
  const System& sys = *chart.sys;
  const int dim = chart.dim();
  const Vec theta0 = chart.theta_base();

  HomogenizedJacobians out;
  out.n = sys.n;
  out.d = sys.d;
  out.p.resize(dim, dim);
  out.q.assign(static_cast<std::size_t>(sys.d), Mat(dim, dim));
  out.step = opt.step;

  auto values_at = [&](const Vec& theta) {
    const PeriodicProfile prof = solve_family_point(chart, theta);
    const AveragedQuantities avg = averaged_quantities(sys, prof);
    Mat vals(dim, 1 + sys.d);
    vals.col(0) = chart_conserved_values(sys, avg);
    for (int j = 0; j < sys.d; ++j) vals.col(1 + j) = chart_flux_values(sys, avg, j);
    return vals;
  };

  double err = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double h = opt.step * (1.0 + std::abs(theta0(i)));
    auto central = [&](double hh) {
      Vec tp = theta0, tm = theta0;
      tp(i) += hh;
      tm(i) -= hh;
      return ((values_at(tp) - values_at(tm)) / (2 * hh)).eval();
    };
    const Mat dh = central(h);
    const Mat dh2 = central(h / 2);
    const Mat refined = (4.0 * dh2 - dh) / 3.0;
    err = std::max(err, (dh2 - dh).cwiseAbs().maxCoeff() / 3.0);
    out.p.col(i) = refined.col(0);
    for (int j = 0; j < sys.d; ++j) out.q[static_cast<std::size_t>(j)].col(i) = refined.col(1 + j);
  }
  double scale = out.p.norm();
  for (const auto& qj : out.q) scale = std::max(scale, qj.norm());
  out.richardson_error = err / std::max(scale, 1e-300);
  if (out.richardson_error > opt.richardson_tol)
    throw SolverError("homogenized_jacobians: Richardson estimate above tolerance");
  return out;
}

}  // namespace perwave

#endif
