#ifndef PERWAVE_ODE_HPP
#define PERWAVE_ODE_HPP

// Adaptive Runge-Kutta-Fehlberg 7(8) integration for dense real or complex
// states.  The 8th-order solution is propagated; the embedded 7th-order
// difference drives step control.  Works on Eigen column vectors of any
// scalar; the right-hand side is any callable f(t, y) -> dy/dt.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "perwave/types.hpp"

namespace perwave {

struct OdeOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  double initial_step = 0.0;  // 0: span/64
  long max_steps = 2'000'000;
};

namespace rkf78 {

inline constexpr int kStages = 13;

inline const double* nodes() {
  static const double c[kStages] = {
      0.0,       2.0 / 27.0, 1.0 / 9.0, 1.0 / 6.0, 5.0 / 12.0, 0.5,
      5.0 / 6.0, 1.0 / 6.0,  2.0 / 3.0, 1.0 / 3.0, 1.0,        0.0,
      1.0};
  return c;
}

inline const double (*coupling())[kStages - 1] {
  static const double a[kStages][kStages - 1] = {
      {},
      {2.0 / 27},
      {1.0 / 36, 1.0 / 12},
      {1.0 / 24, 0, 1.0 / 8},
      {5.0 / 12, 0, -25.0 / 16, 25.0 / 16},
      {1.0 / 20, 0, 0, 1.0 / 4, 1.0 / 5},
      {-25.0 / 108, 0, 0, 125.0 / 108, -65.0 / 27, 125.0 / 54},
      {31.0 / 300, 0, 0, 0, 61.0 / 225, -2.0 / 9, 13.0 / 900},
      {2.0, 0, 0, -53.0 / 6, 704.0 / 45, -107.0 / 9, 67.0 / 90, 3.0},
      {-91.0 / 108, 0, 0, 23.0 / 108, -976.0 / 135, 311.0 / 54, -19.0 / 60,
       17.0 / 6, -1.0 / 12},
      {2383.0 / 4100, 0, 0, -341.0 / 164, 4496.0 / 1025, -301.0 / 82,
       2133.0 / 4100, 45.0 / 82, 45.0 / 164, 18.0 / 41},
      {3.0 / 205, 0, 0, 0, 0, -6.0 / 41, -3.0 / 205, -3.0 / 41, 3.0 / 41,
       6.0 / 41, 0},
      {-1777.0 / 4100, 0, 0, -341.0 / 164, 4496.0 / 1025, -289.0 / 82,
       2193.0 / 4100, 51.0 / 82, 33.0 / 164, 12.0 / 41, 0, 1.0}};
  return a;
}

inline const double* weights8() {
  static const double b[kStages] = {0,
                                    0,
                                    0,
                                    0,
                                    0,
                                    34.0 / 105,
                                    9.0 / 35,
                                    9.0 / 35,
                                    9.0 / 280,
                                    9.0 / 280,
                                    0,
                                    41.0 / 840,
                                    41.0 / 840};
  return b;
}

}  // namespace rkf78

namespace detail {
inline double abs_of(double x) { return std::abs(x); }
inline double abs_of(const Complex& x) { return std::abs(x); }
}  // namespace detail

// One trial step from (t, y).  On output err_norm holds the scaled error
// max_i |e_i| / (atol + rtol |y_i|); caller accepts when err_norm <= 1.
template <class Scalar, class Rhs>
Vector<Scalar> rkf78_step(Rhs&& rhs, double t, const Vector<Scalar>& y,
                          double h, double rel_tol, double abs_tol,
                          double& err_norm) {
  const auto* c = rkf78::nodes();
  const auto a = rkf78::coupling();
  const auto* b = rkf78::weights8();
  const Eigen::Index dim = y.size();

  std::vector<Vector<Scalar>> k(rkf78::kStages);
  k[0] = rhs(t, y);
  Vector<Scalar> stage(dim);
  for (int s = 1; s < rkf78::kStages; ++s) {
    stage = y;
    for (int j = 0; j < s; ++j)
      if (a[s][j] != 0.0) stage += (h * a[s][j]) * k[j];
    k[s] = rhs(t + c[s] * h, stage);
  }

  Vector<Scalar> ynew = y;
  for (int s = 0; s < rkf78::kStages; ++s)
    if (b[s] != 0.0) ynew += (h * b[s]) * k[s];

  // yhat8 - y7 = (41/840) h (k1 + k11 - k12 - k13)
  Vector<Scalar> err = (41.0 / 840.0 * h) * (k[0] + k[10] - k[11] - k[12]);
  err_norm = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double scale =
        abs_tol + rel_tol * std::max(detail::abs_of(y(i)), detail::abs_of(ynew(i)));
    err_norm = std::max(err_norm, detail::abs_of(err(i)) / scale);
  }
  return ynew;
}

// Integrate y' = rhs(t, y) from t0 to t1 (either direction).  An optional
// observer sees every accepted step as observer(t, y).
template <class Scalar, class Rhs, class Observer>
Vector<Scalar> integrate_ode(Rhs&& rhs, Vector<Scalar> y, double t0, double t1,
                             const OdeOptions& opt, Observer&& observer) {
  const double span = t1 - t0;
  if (span == 0.0) {
    observer(t0, y);
    return y;
  }
  const double dir = span > 0 ? 1.0 : -1.0;
  double h = opt.initial_step != 0.0 ? std::abs(opt.initial_step)
                                     : std::abs(span) / 64.0;
  h = std::min(h, std::abs(span));
  double t = t0;
  observer(t, y);

  const double h_floor = std::abs(span) * 1e-15;
  long steps = 0;
  while (dir * (t1 - t) > 0.0) {
    if (++steps > opt.max_steps)
      throw SolverError("ode: step limit exceeded (stiff or divergent problem)");
    h = std::min(h, std::abs(t1 - t));
    double err_norm = 0.0;
    Vector<Scalar> ynew =
        rkf78_step(rhs, t, y, dir * h, opt.rel_tol, opt.abs_tol, err_norm);
    if (!std::isfinite(err_norm))
      throw SolverError("ode: non-finite state encountered (blow-up)");
    if (err_norm <= 1.0) {
      t = (std::abs(t1 - t) <= h * (1 + 1e-12)) ? t1 : t + dir * h;
      y.swap(ynew);
      observer(t, y);
      const double grow =
          err_norm == 0.0 ? 5.0 : 0.9 * std::pow(err_norm, -1.0 / 8.0);
      h *= std::clamp(grow, 0.2, 5.0);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err_norm, -1.0 / 8.0));
      if (h < h_floor)
        throw SolverError("ode: step-size underflow (blow-up or singularity)");
    }
  }
  return y;
}

template <class Scalar, class Rhs>
Vector<Scalar> integrate_ode(Rhs&& rhs, Vector<Scalar> y, double t0, double t1,
                             const OdeOptions& opt = {}) {
  return integrate_ode(std::forward<Rhs>(rhs), std::move(y), t0, t1, opt,
                       [](double, const Vector<Scalar>&) {});
}

// Integrate and record the state at each of the given times (strictly
// monotone, times.front() == t0).  Endpoints are hit exactly.
template <class Scalar, class Rhs>
std::vector<Vector<Scalar>> integrate_at_times(Rhs&& rhs, Vector<Scalar> y0,
                                               const std::vector<double>& times,
                                               const OdeOptions& opt = {}) {
  std::vector<Vector<Scalar>> out;
  out.reserve(times.size());
  out.push_back(y0);
  Vector<Scalar> y = std::move(y0);
  for (std::size_t i = 1; i < times.size(); ++i) {
    y = integrate_ode(rhs, std::move(y), times[i - 1], times[i], opt);
    out.push_back(y);
  }
  return out;
}

}  // namespace perwave

#endif
