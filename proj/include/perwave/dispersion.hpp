#ifndef PERWAVE_DISPERSION_HPP
#define PERWAVE_DISPERSION_HPP

// The averaged dispersion polynomial and the hyperbolicity analysis.
//
//   Delta_hat(xi, lambda) = det(lambda P + sum_j i xi_j Q_j),
//   Delta(xi, lambda)     = lambda^{1-d} Delta_hat(xi, lambda),
//
// where P, Q_j are the chart Jacobians of (M, Omega N) and (F^j, S Omega e_j).
// The operator A = (sum_j xi_j Q_j) P^{-1} on value space (m, g) maps
// everything into W_xi = {(m, alpha xi)} because the g-image is always
// parallel to xi; its restriction to W_xi carries the n+1 physical
// characteristics a_j(xi), while the d-1 complementary eigenvalues vanish
// identically (phase-gradient curl constraint).

#include "perwave/manifold.hpp"
#include "perwave/sampling.hpp"

namespace perwave {

struct NondegeneracyCheck {
  double det_p = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool ok = false;
};

inline NondegeneracyCheck nondegeneracy(const HomogenizedJacobians& h,
                                        double threshold = 1e-10) {
  Eigen::JacobiSVD<Mat> svd(h.p);
  NondegeneracyCheck out;
  out.det_p = h.p.determinant();
  out.sigma_min = svd.singularValues().minCoeff();
  out.sigma_max = svd.singularValues().maxCoeff();
  out.ok = out.sigma_min > threshold * out.sigma_max;
  return out;
}

inline CMat dispersion_pencil(const HomogenizedJacobians& h, const Vec& xi, Complex lambda) {
  CMat m = lambda * h.p.cast<Complex>();
  for (int j = 0; j < h.d; ++j)
    m += kImag * xi(j) * h.q[static_cast<std::size_t>(j)].cast<Complex>();
  return m;
}

inline Complex delta_hat(const HomogenizedJacobians& h, const Vec& xi, Complex lambda) {
  return dispersion_pencil(h, xi, lambda).determinant();
}

struct ConstrainedSpectrum {
  CVec a;                       // n+1 constrained characteristic values
  Mat restricted;               // (n+1) x (n+1) restriction of A to W_xi
  Mat full;                     // A itself
  double norm = 0.0;            // ||A||_F
  double invariance_residual = 0.0;  // relative defect of A(W_xi) in W_xi
  int zero_mode_count = 0;      // eigenvalues of full A below tolerance
};

// Eigenvalues of A restricted to the curl-constrained subspace
// W_xi = {(m, alpha xi)}; also verifies the complementary d-1 eigenvalues
// of the full operator vanish within tolerance.
inline ConstrainedSpectrum constrained_characteristics(const HomogenizedJacobians& h,
                                                       const Vec& xi,
                                                       double zero_tol = 1e-8) {
  if (xi.norm() == 0.0)
    throw ConfigError("constrained_characteristics: xi must be nonzero");
  const NondegeneracyCheck nd = nondegeneracy(h);
  if (!nd.ok)
    throw SolverError("constrained_characteristics: nondegeneracy gate failed (det P ~ 0)");
  const int n = h.n, d = h.d, dim = h.dim();
  const Vec xhat = xi / xi.norm();

  Mat k = Mat::Zero(dim, dim);
  for (int j = 0; j < d; ++j) k += xi(j) * h.q[static_cast<std::size_t>(j)];
  Eigen::PartialPivLU<Mat> plu(h.p);
  const Mat a = k * plu.inverse();

  ConstrainedSpectrum out;
  out.full = a;
  out.norm = a.norm();

  // Basis of W_xi: (e_i, 0) for i = 1..n and (0, xhat).
  Mat basis = Mat::Zero(dim, n + 1);
  basis.topLeftCorner(n, n) = Mat::Identity(n, n);
  basis.col(n).tail(d) = xhat;
  const Mat images = a * basis;
  out.restricted.resize(n + 1, n + 1);
  double defect = 0.0;
  for (int c = 0; c <= n; ++c) {
    const Vec img = images.col(c);
    const double alpha = xhat.dot(img.tail(d));
    out.restricted.col(c).head(n) = img.head(n);
    out.restricted(n, c) = alpha;
    defect = std::max(defect, (img.tail(d) - alpha * xhat).norm());
  }
  out.invariance_residual = defect / std::max(out.norm, 1e-300);
  if (out.invariance_residual > 1e-8)
    throw SolverError("constrained_characteristics: W_xi not invariant "
                      "(inconsistent homogenized Jacobians)");

  Eigen::EigenSolver<Mat> res(out.restricted, false);
  if (res.info() != Eigen::Success)
    throw SolverError("constrained_characteristics: eigenvalue solver failed");
  out.a = res.eigenvalues();

  Eigen::EigenSolver<Mat> fes(a, false);
  if (fes.info() != Eigen::Success)
    throw SolverError("constrained_characteristics: eigenvalue solver failed");
  for (Eigen::Index i = 0; i < fes.eigenvalues().size(); ++i)
    if (std::abs(fes.eigenvalues()(i)) <= zero_tol * out.norm) ++out.zero_mode_count;
  return out;
}

// lambda^{1-d} Delta_hat, with the lambda -> 0 limit taken through the
// restricted pencil det P * prod_j (lambda + i a_j(xi)) instead of division.
inline Complex delta(const HomogenizedJacobians& h, const Vec& xi, Complex lambda,
                     double deflation_threshold = 1e-8) {
  const int d = h.d;
  if (xi.norm() == 0.0) {
    Complex acc = h.p.determinant();
    for (int k = 0; k < h.n + 1; ++k) acc *= lambda;
    return acc;
  }
  if (std::abs(lambda) >= deflation_threshold)
    return std::pow(lambda, 1 - d) * delta_hat(h, xi, lambda);
  const ConstrainedSpectrum cs = constrained_characteristics(h, xi);
  Complex acc = h.p.determinant();
  for (Eigen::Index j = 0; j < cs.a.size(); ++j) acc *= (lambda + kImag * cs.a(j));
  return acc;
}

struct DirectionVerdict {
  Vec xi;
  CVec a;
  int zero_mode_count = 0;
  double max_im = 0.0;
  double norm = 0.0;
};

struct DispersionReport {
  bool nondegenerate = false;
  double det_p = 0.0;
  bool weakly_hyperbolic = false;
  double tolerance = 0.0;
  std::vector<DirectionVerdict> directions;
  Vec worst_direction;
  double worst_im = 0.0;
  int expected_zero_modes = 0;
  bool zero_modes_ok = false;
};

// Weak hyperbolicity over sampled directions: all constrained
// characteristics real to tol * ||A(xi)||, with exactly d-1 zero modes of
// the unconstrained operator at every sample.
inline DispersionReport hyperbolicity_verdict(const HomogenizedJacobians& h,
                                              const std::vector<Vec>& sphere_samples,
                                              double tol = 1e-6) {
  DispersionReport rep;
  rep.tolerance = tol;
  rep.expected_zero_modes = h.d - 1;
  const NondegeneracyCheck nd = nondegeneracy(h);
  rep.nondegenerate = nd.ok;
  rep.det_p = nd.det_p;
  if (!nd.ok)
    throw SolverError("hyperbolicity_verdict: nondegeneracy gate failed (det P ~ 0)");
  rep.weakly_hyperbolic = true;
  rep.zero_modes_ok = true;
  rep.worst_im = 0.0;
  for (const Vec& xhat : sphere_samples) {
    const ConstrainedSpectrum cs = constrained_characteristics(h, xhat);
    DirectionVerdict v;
    v.xi = xhat;
    v.a = cs.a;
    v.zero_mode_count = cs.zero_mode_count;
    v.norm = cs.norm;
    v.max_im = cs.a.imag().cwiseAbs().maxCoeff();
    rep.zero_modes_ok &= (v.zero_mode_count == rep.expected_zero_modes);
    const double rel = v.max_im / std::max(v.norm, 1e-300);
    if (rel > rep.worst_im) {
      rep.worst_im = rel;
      rep.worst_direction = xhat;
    }
    if (rel > tol) rep.weakly_hyperbolic = false;
    rep.directions.push_back(std::move(v));
  }
  return rep;
}

}  // namespace perwave

#endif
