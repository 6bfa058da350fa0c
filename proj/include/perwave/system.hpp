#ifndef PERWAVE_SYSTEM_HPP
#define PERWAVE_SYSTEM_HPP

// Viscous conservation-law systems
//
//   u_t + sum_j f^j(u)_{x_j} = sum_{j,k} (B^{jk}(u) u_{x_k})_{x_j},
//
// u in R^n, x in R^d (d >= 2): flux maps with exact first and second
// derivatives, viscosity maps with first derivatives, built-in example
// systems, and the uniform-parabolicity check
// Re sigma(sum_{jk} nu_j nu_k B^{jk}) >= theta > 0.

#include <functional>
#include <utility>

#include "perwave/polynomial.hpp"
#include "perwave/sampling.hpp"
#include "perwave/types.hpp"

namespace perwave {

struct System {
  int n = 0;
  int d = 0;

  // flux[j], flux_jacobian[j], flux_hessian[j] evaluate f^j, Df^j, D2f^j.
  std::vector<std::function<Vec(const Vec&)>> flux;
  std::vector<std::function<Mat(const Vec&)>> flux_jacobian;
  std::vector<std::function<Tensor3(const Vec&)>> flux_hessian;

  // viscosity[j][k] evaluates B^{jk}; viscosity_derivative[j][k] evaluates
  // DB^{jk} as dB/du_k slices (empty tensor means identically zero).
  std::vector<std::vector<std::function<Mat(const Vec&)>>> viscosity;
  std::vector<std::vector<std::function<Tensor3(const Vec&)>>> viscosity_derivative;

  // true iff B^{jk}(u) == delta_{jk} I for all u.
  bool laplacian = false;

  Mat viscosity_in_direction(const Vec& nu, const Vec& u) const {
    Mat acc = Mat::Zero(n, n);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) acc += nu(j) * nu(k) * viscosity[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)](u);
    return acc;
  }

  Tensor3 viscosity_derivative_in_direction(const Vec& nu, const Vec& u) const {
    Tensor3 acc(static_cast<std::size_t>(n), Mat::Zero(n, n));
    if (laplacian) return acc;
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        const Tensor3 t = viscosity_derivative[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)](u);
        if (t.empty()) continue;
        for (int v = 0; v < n; ++v) acc[static_cast<std::size_t>(v)] += nu(j) * nu(k) * t[static_cast<std::size_t>(v)];
      }
    return acc;
  }
};

namespace system_detail {

inline std::function<Tensor3(const Vec&)> zero_tensor(int n) {
  return [n](const Vec&) { return Tensor3(static_cast<std::size_t>(n), Mat::Zero(n, n)); };
}

inline void attach_laplacian_viscosity(System& sys) {
  sys.laplacian = true;
  sys.viscosity.assign(static_cast<std::size_t>(sys.d), {});
  sys.viscosity_derivative.assign(static_cast<std::size_t>(sys.d), {});
  for (int j = 0; j < sys.d; ++j)
    for (int k = 0; k < sys.d; ++k) {
      const bool diag = (j == k);
      const int n = sys.n;
      sys.viscosity[static_cast<std::size_t>(j)].push_back(
          [n, diag](const Vec&) { return diag ? Mat::Identity(n, n).eval() : Mat::Zero(n, n).eval(); });
      sys.viscosity_derivative[static_cast<std::size_t>(j)].push_back(zero_tensor(n));
    }
}

inline void attach_constant_viscosity(System& sys, const std::vector<std::vector<Mat>>& b) {
  sys.viscosity.assign(static_cast<std::size_t>(sys.d), {});
  sys.viscosity_derivative.assign(static_cast<std::size_t>(sys.d), {});
  bool is_laplacian = true;
  for (int j = 0; j < sys.d; ++j)
    for (int k = 0; k < sys.d; ++k) {
      Mat m = b[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      if (m.rows() != sys.n || m.cols() != sys.n)
        throw ConfigError("viscosity block has wrong shape");
      is_laplacian &= m.isApprox(j == k ? Mat::Identity(sys.n, sys.n).eval() : Mat::Zero(sys.n, sys.n).eval(), 0.0);
      sys.viscosity[static_cast<std::size_t>(j)].push_back([m](const Vec&) { return m; });
      sys.viscosity_derivative[static_cast<std::size_t>(j)].push_back(zero_tensor(sys.n));
    }
  sys.laplacian = is_laplacian;
}

}  // namespace system_detail

// Build a system from per-component flux polynomials; derivatives are exact.
inline System make_polynomial_system(int n, int d,
                                     const std::vector<std::vector<Polynomial>>& fluxes) {
  if (d < 2) throw ConfigError("system: d must be >= 2");
  if (static_cast<int>(fluxes.size()) != d)
    throw ConfigError("system: need one flux vector per space dimension");
  System sys;
  sys.n = n;
  sys.d = d;
  for (int j = 0; j < d; ++j) {
    const auto& fj = fluxes[static_cast<std::size_t>(j)];
    if (static_cast<int>(fj.size()) != n)
      throw ConfigError("system: flux component count mismatch");
    std::vector<std::vector<Polynomial>> grad(static_cast<std::size_t>(n));
    std::vector<std::vector<std::vector<Polynomial>>> hess(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      for (int v = 0; v < n; ++v)
        grad[static_cast<std::size_t>(i)].push_back(fj[static_cast<std::size_t>(i)].derivative(v));
      for (int v = 0; v < n; ++v) {
        std::vector<Polynomial> row;
        for (int w = 0; w < n; ++w)
          row.push_back(grad[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)].derivative(w));
        hess[static_cast<std::size_t>(i)].push_back(std::move(row));
      }
    }
    sys.flux.push_back([fj, n](const Vec& u) {
      Vec out(n);
      for (int i = 0; i < n; ++i) out(i) = fj[static_cast<std::size_t>(i)].eval(u);
      return out;
    });
    sys.flux_jacobian.push_back([grad, n](const Vec& u) {
      Mat out(n, n);
      for (int i = 0; i < n; ++i)
        for (int v = 0; v < n; ++v) out(i, v) = grad[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)].eval(u);
      return out;
    });
    sys.flux_hessian.push_back([hess, n](const Vec& u) {
      Tensor3 out(static_cast<std::size_t>(n), Mat(n, n));
      for (int i = 0; i < n; ++i)
        for (int v = 0; v < n; ++v)
          for (int w = 0; w < n; ++w)
            out[static_cast<std::size_t>(i)](v, w) = hess[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)][static_cast<std::size_t>(w)].eval(u);
      return out;
    });
  }
  system_detail::attach_laplacian_viscosity(sys);
  return sys;
}

// f^j(u) = A^j u with constant viscosity blocks B^{jk}.
inline System make_constant_coefficient(const std::vector<Mat>& a,
                                        const std::vector<std::vector<Mat>>& b) {
  const int d = static_cast<int>(a.size());
  if (d < 2) throw ConfigError("constant_coefficient: d must be >= 2");
  const int n = static_cast<int>(a[0].rows());
  System sys;
  sys.n = n;
  sys.d = d;
  for (int j = 0; j < d; ++j) {
    Mat aj = a[static_cast<std::size_t>(j)];
    if (aj.rows() != n || aj.cols() != n)
      throw ConfigError("constant_coefficient: flux matrix has wrong shape");
    sys.flux.push_back([aj](const Vec& u) { return (aj * u).eval(); });
    sys.flux_jacobian.push_back([aj](const Vec&) { return aj; });
    sys.flux_hessian.push_back(system_detail::zero_tensor(n));
  }
  system_detail::attach_constant_viscosity(sys, b);
  return sys;
}

// Viscous p-system variant: u = (v, w), f^1(v, w) = (-w, p(v)), optional
// user fluxes f^j for j >= 2 (zero by default), Laplacian viscosity.  The
// pressure polynomial p is given in the variable u1 = v.
inline System make_vdw_psystem(int d, const Polynomial& pressure,
                               const std::vector<std::vector<Polynomial>>& extra_flux = {}) {
  if (pressure.nvars() != 1 && pressure.nvars() != 2)
    throw ConfigError("vdw_psystem: pressure must be a polynomial in u1");
  const int n = 2;
  // Lift p(u1) into two variables.
  Polynomial p2(n);
  for (const auto& m : pressure.terms()) {
    Polynomial t = Polynomial::constant(n, m.coeff);
    t = t * Polynomial::variable(n, 0).pow(m.exponents[0]);
    if (pressure.nvars() == 2 && m.exponents[1] != 0)
      throw ConfigError("vdw_psystem: pressure may depend on u1 only");
    p2 += t;
  }
  std::vector<std::vector<Polynomial>> fluxes;
  fluxes.push_back({-Polynomial::variable(n, 1), p2});
  for (int j = 1; j < d; ++j) {
    if (static_cast<std::size_t>(j - 1) < extra_flux.size())
      fluxes.push_back(extra_flux[static_cast<std::size_t>(j - 1)]);
    else
      fluxes.push_back({Polynomial(n), Polynomial(n)});
  }
  return make_polynomial_system(n, d, fluxes);
}

struct ParabolicityReport {
  double theta_estimate = 0.0;
  bool pass = false;
  Vec worst_direction;
  Vec worst_state;
};

// (H1) check: minimum over samples of the smallest real part of the
// eigenvalues of sum nu_j nu_k B^{jk}(u).  For Laplacian viscosity the
// matrix is |nu|^2 I = I on unit directions, so theta = 1 exactly.
inline ParabolicityReport check_parabolicity(const System& sys,
                                             const std::vector<Vec>& directions,
                                             const std::vector<Vec>& states,
                                             double threshold = 1e-8) {
  if (directions.empty() || states.empty())
    throw ConfigError("check_parabolicity: empty sample set");
  ParabolicityReport rep;
  if (sys.laplacian) {
    rep.theta_estimate = 1.0;
    rep.pass = true;
    rep.worst_direction = directions.front();
    rep.worst_state = states.front();
    return rep;
  }
  double theta = std::numeric_limits<double>::infinity();
  for (const Vec& nu : directions)
    for (const Vec& u : states) {
      const Mat m = sys.viscosity_in_direction(nu, u);
      Eigen::EigenSolver<Mat> es(m, false);
      if (es.info() != Eigen::Success)
        throw SolverError("check_parabolicity: eigenvalue computation failed");
      const double lo = es.eigenvalues().real().minCoeff();
      if (lo < theta) {
        theta = lo;
        rep.worst_direction = nu;
        rep.worst_state = u;
      }
    }
  rep.theta_estimate = theta;
  rep.pass = theta > threshold;
  return rep;
}

// Spot check that flux_jacobian agrees with a central difference of flux.
inline double flux_jacobian_residual(const System& sys, const std::vector<Vec>& states) {
  double worst = 0.0;
  for (const Vec& u : states)
    for (int j = 0; j < sys.d; ++j) {
      const Mat jac = sys.flux_jacobian[static_cast<std::size_t>(j)](u);
      Mat fd(sys.n, sys.n);
      for (int v = 0; v < sys.n; ++v) {
        const double h = 1e-6 * (1.0 + std::abs(u(v)));
        Vec up = u, um = u;
        up(v) += h;
        um(v) -= h;
        fd.col(v) = (sys.flux[static_cast<std::size_t>(j)](up) - sys.flux[static_cast<std::size_t>(j)](um)) / (2 * h);
      }
      const double scale = std::max(1.0, jac.norm());
      worst = std::max(worst, (jac - fd).norm() / scale);
    }
  return worst;
}

}  // namespace perwave

#endif
