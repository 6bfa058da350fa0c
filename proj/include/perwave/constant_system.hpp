#ifndef PERWAVE_CONSTANT_SYSTEM_HPP
#define PERWAVE_CONSTANT_SYSTEM_HPP

// Closed forms for constant-coefficient systems: characteristic roots of
// the quadratic pencil, the product form of the Evans function over an
// artificial period X, and the dispersion relation
// det(-B^xi - i A^xi - lambda I) = 0.  These serve as the independent
// reference that the variable-coefficient machinery must reproduce.

#include "perwave/profile.hpp"
#include "perwave/system.hpp"

namespace perwave {

struct ConstantSystem {
  std::vector<Mat> a;               // A^j, j = 1..d
  std::vector<std::vector<Mat>> b;  // B^{jk}
  double X = 2.0 * std::numbers::pi;

  int n() const { return static_cast<int>(a[0].rows()); }
  int d() const { return static_cast<int>(a.size()); }

  Mat a_in_direction(const Vec& xi) const {
    Mat acc = Mat::Zero(n(), n());
    for (int j = 0; j < d(); ++j) acc += xi(j) * a[static_cast<std::size_t>(j)];
    return acc;
  }

  Mat b_in_direction(const Vec& xi) const {
    Mat acc = Mat::Zero(n(), n());
    for (int j = 0; j < d(); ++j)
      for (int k = 0; k < d(); ++k)
        acc += xi(j) * xi(k) * b[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
    return acc;
  }

  System as_system() const { return make_constant_coefficient(a, b); }

  // A constant state u == c is a legitimate (degenerate) profile of period X
  // when f^1(c) - s c - q = 0; the amplitude floor is waived.
  PeriodicProfile constant_profile(const Vec& c, int m = 256) const {
    PeriodicProfile p;
    const int dim = d();
    p.params = ProfileParams::make(c, 0.0, Vec::Zero(dim - 1),
                                   (a[0] * c).eval());
    p.X = X;
    p.samples = c.replicate(1, m);
    p.interpolant = TrigInterpolant(p.samples, X);
    p.closure_residual = 0.0;
    p.amplitude = 0.0;
    return p;
  }
};

// Quadratic pencil of the eigenvalue ODE: coefficient matrices of
// mu^2 M2 + mu M1 + M0 acting on exp(mu x_1) modes.
inline void characteristic_pencil(const ConstantSystem& sys, Complex lambda,
                                  const Vec& xi_t, CMat& m2, CMat& m1, CMat& m0) {
  const int n = sys.n();
  const int d = sys.d();
  m2 = sys.b[0][0].cast<Complex>();
  m1 = (-sys.a[0]).cast<Complex>();
  CMat zero_block = CMat::Zero(n, n);
  CMat transverse_a = zero_block, transverse_b = zero_block;
  for (int j = 1; j < d; ++j) {
    m1 += kImag * xi_t(j - 1) *
          (sys.b[static_cast<std::size_t>(j)][0] + sys.b[0][static_cast<std::size_t>(j)]).cast<Complex>();
    transverse_a += kImag * xi_t(j - 1) * sys.a[static_cast<std::size_t>(j)].cast<Complex>();
    for (int k = 1; k < d; ++k)
      transverse_b += (xi_t(j - 1) * xi_t(k - 1)) *
                      sys.b[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)].cast<Complex>();
  }
  m0 = -(transverse_a + transverse_b + lambda * CMat::Identity(n, n));
}

struct CharacteristicRoots {
  CVec mu;                 // 2n roots
  bool near_defective = false;
};

// Roots of det(mu^2 B^11 + mu M1 + M0) = 0 by companion linearization.
inline CharacteristicRoots characteristic_roots(const ConstantSystem& sys, Complex lambda,
                                                const Vec& xi_t) {
  const int n = sys.n();
  CMat m2, m1, m0;
  characteristic_pencil(sys, lambda, xi_t, m2, m1, m0);
  Eigen::FullPivLU<CMat> lu(m2);
  if (!lu.isInvertible())
    throw SolverError("characteristic_roots: B^11 not invertible");
  CMat comp = CMat::Zero(2 * n, 2 * n);
  comp.topRightCorner(n, n) = CMat::Identity(n, n);
  comp.bottomLeftCorner(n, n) = -lu.solve(m0);
  comp.bottomRightCorner(n, n) = -lu.solve(m1);
  Eigen::ComplexEigenSolver<CMat> es(comp, false);
  if (es.info() != Eigen::Success)
    throw SolverError("characteristic_roots: eigenvalue solver failed");
  CharacteristicRoots out;
  out.mu = es.eigenvalues();
  for (Eigen::Index i = 0; i < out.mu.size(); ++i)
    for (Eigen::Index j = i + 1; j < out.mu.size(); ++j)
      out.near_defective |= std::abs(out.mu(i) - out.mu(j)) < 1e-10;
  return out;
}

// D(lambda, xi) = prod_l (exp(mu_l X) - exp(i xi_1 X)).
inline Complex evans_closed_form(const ConstantSystem& sys, Complex lambda, double xi1,
                                 const Vec& xi_t) {
  const auto roots = characteristic_roots(sys, lambda, xi_t);
  const Complex shift = std::exp(kImag * (xi1 * sys.X));
  Complex prod = 1.0;
  for (Eigen::Index i = 0; i < roots.mu.size(); ++i)
    prod *= std::exp(roots.mu(i) * sys.X) - shift;
  return prod;
}

// The normalized basis of the evans module multiplies the raw product by
// det W(0) = (-1)^n / det B^11; oracle comparisons account for it.
inline Complex evans_normalization_factor(const ConstantSystem& sys) {
  const double detb = sys.b[0][0].determinant();
  return ((sys.n() % 2 == 0) ? 1.0 : -1.0) / detb;
}

// Eigenvalues of -B^xi - i A^xi: the n dispersion roots lambda_j(xi).
inline CVec dispersion_roots(const ConstantSystem& sys, const Vec& xi) {
  const CMat m = (-sys.b_in_direction(xi)).cast<Complex>() -
                 kImag * sys.a_in_direction(xi).cast<Complex>();
  Eigen::ComplexEigenSolver<CMat> es(m, false);
  if (es.info() != Eigen::Success)
    throw SolverError("dispersion_roots: eigenvalue solver failed");
  return es.eigenvalues();
}

}  // namespace perwave

#endif
