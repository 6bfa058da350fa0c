#ifndef PERWAVE_VARIATIONAL_HPP
#define PERWAVE_VARIATIONAL_HPP

// Laplacian-case (B^{jk} = delta_{jk} I) traveling-wave variations and the
// explicit leading-order polynomial of the Evans function.  With A^j = Df^j
// along the profile and Lhat z = z' - A^1 z, the variations solve
//
//   d(du/da_j)    = A^1 z,            z(0) = e_j     (the basis w^j at 0,0)
//   d(du/dq_j)    = A^1 z - e_j,      z(0) = 0       (w^{n+j}; Lhat z = -e_j)
//   d(du/ds)      = A^1 z - u,        z(0) = 0
//   d(du/ddelta^j)= A^1 z + f^j(u),   z(0) = 0,
//
// and the degree-(n+1) leading part is det N with
//
//   N = [ c(xi,lambda)  [w^2] ... [w^{2n}]
//         C(xi,lambda)  C^2   ... C^{2n}  ],
//
//   c   = -lambda [du/ds] + i sum_{j>1} xi_j [du/ddelta^j] - i X xi_1 u'(0),
//   C   = -lambda^2 int du/ds
//         + i lambda sum_{j>1} xi_j int (du/ddelta^j - A^j du/ds)
//         - sum_{j,k>1} xi_j xi_k int A^j du/ddelta^k
//         - i X xi_1 lambda u(0) + X xi_1 sum_{j>1} xi_j f^j(u(0)),
//   C^l = lambda int w^l + i sum_{j>1} xi_j int A^j w^l - i X xi_1 Lhat w^l(0).

#include "perwave/profile.hpp"

namespace perwave {

struct VariationalBundle {
  int n = 0, d = 0;
  double X = 0.0;
  Vec anchor;    // u(0)
  Vec uprime0;   // u'(0)
  std::vector<Vec> f_anchor;  // f^j(u(0)), j = 1..d

  // Endpoint values at X.
  Mat za_end;      // n x n, columns du/da_j
  Mat zq_end;      // n x n, columns du/dq_j
  Vec zs_end;      // du/ds
  Mat zdelta_end;  // n x (d-1)

  // Period integrals int_0^X z dy and int_0^X A^j z dy (j = 2..d).
  Mat int_za, int_zq;
  Vec int_zs;
  Mat int_zdelta;
  std::vector<Mat> int_a_za;      // index j-2
  std::vector<Mat> int_a_zq;
  std::vector<Vec> int_a_zs;
  std::vector<Mat> int_a_zdelta;

  // [w^l] and int w^l etc. in the column order l = 2..2n
  // (l <= n: a-variations, l = n+j: q-variations).
  Mat w_bracket(int l) const {
    return l <= n ? (za_end.col(l - 1) - Vec::Unit(n, l - 1)).eval()
                  : zq_end.col(l - n - 1).eval();
  }
  Vec w_integral(int l) const {
    return l <= n ? int_za.col(l - 1) : int_zq.col(l - n - 1);
  }
  Vec aw_integral(int j, int l) const {  // j = 2..d
    return l <= n ? int_a_za[static_cast<std::size_t>(j - 2)].col(l - 1)
                  : int_a_zq[static_cast<std::size_t>(j - 2)].col(l - n - 1);
  }
  Vec lhat_at_zero(int l) const {  // Lhat w^l(0): 0 or -e_{l-n}
    return l <= n ? Vec::Zero(n).eval() : (-Vec::Unit(n, l - n - 1)).eval();
  }
};

// Solve all variational equations along the profile in one augmented pass,
// with the running integrals carried as quadrature states.
inline VariationalBundle solve_variations(const System& sys, const PeriodicProfile& profile,
                                          const OdeOptions& ode = {}) {
  if (!sys.laplacian)
    throw ConfigError("solve_variations: Laplacian viscosity required "
                      "(use the numeric leading-part fit for general B)");
  if (profile.params.s != 0.0 || profile.params.delta.cwiseAbs().maxCoeff() != 0.0)
    throw ConfigError("solve_variations: profile must be normalized to s = 0, nu = e1");

  const int n = sys.n, d = sys.d;
  const int ncols = 2 * n + d;        // a (n), q (n), s (1), delta (d-1)
  const int per_col = n * (1 + d);    // z, int z, int A^j z (j = 2..d)
  ProfileField field(sys, profile.params);

  Vec state = Vec::Zero(n + ncols * per_col);
  state.head(n) = profile.params.a;
  for (int j = 0; j < n; ++j)
    state(n + j * per_col + j) = 1.0;  // du/da_j starts at e_j

  auto col_rhs = [&sys, n, d](int col, const Vec& u, const Vec& z, const Mat& a1) {
    Vec dz = a1 * z;
    if (col < n) return dz;                       // a-variation
    if (col < 2 * n) return (dz - Vec::Unit(n, col - n)).eval();  // q
    if (col == 2 * n) return (dz - u).eval();     // s
    return (dz + sys.flux[static_cast<std::size_t>(col - 2 * n)](u)).eval();  // delta^j
  };

  auto rhs = [&](double, const Vec& y) {
    Vec dy(y.size());
    const Vec u = y.head(n);
    dy.head(n) = field.value(u);
    const Mat a1 = sys.flux_jacobian[0](u);
    std::vector<Mat> aj(static_cast<std::size_t>(d - 1));
    for (int j = 2; j <= d; ++j)
      aj[static_cast<std::size_t>(j - 2)] = sys.flux_jacobian[static_cast<std::size_t>(j - 1)](u);
    for (int col = 0; col < ncols; ++col) {
      const int base = n + col * per_col;
      const Vec z = y.segment(base, n);
      dy.segment(base, n) = col_rhs(col, u, z, a1);
      dy.segment(base + n, n) = z;
      for (int j = 2; j <= d; ++j)
        dy.segment(base + n * j, n) = aj[static_cast<std::size_t>(j - 2)] * z;
    }
    return dy;
  };

  const Vec end = integrate_ode<double>(rhs, state, 0.0, profile.X, ode);

  VariationalBundle b;
  b.n = n;
  b.d = d;
  b.X = profile.X;
  b.anchor = profile.params.a;
  b.uprime0 = field.value(b.anchor);
  for (int j = 0; j < d; ++j) b.f_anchor.push_back(sys.flux[static_cast<std::size_t>(j)](b.anchor));

  b.za_end.resize(n, n);
  b.zq_end.resize(n, n);
  b.zdelta_end.resize(n, d - 1);
  b.int_za.resize(n, n);
  b.int_zq.resize(n, n);
  b.int_zdelta.resize(n, d - 1);
  b.int_a_za.assign(static_cast<std::size_t>(d - 1), Mat(n, n));
  b.int_a_zq.assign(static_cast<std::size_t>(d - 1), Mat(n, n));
  b.int_a_zs.assign(static_cast<std::size_t>(d - 1), Vec(n));
  b.int_a_zdelta.assign(static_cast<std::size_t>(d - 1), Mat(n, d - 1));

  auto read = [&](int col, int block) { return end.segment(n + col * per_col + n * block, n); };
  for (int j = 0; j < n; ++j) {
    b.za_end.col(j) = read(j, 0);
    b.int_za.col(j) = read(j, 1);
    b.zq_end.col(j) = read(n + j, 0);
    b.int_zq.col(j) = read(n + j, 1);
    for (int k = 2; k <= d; ++k) {
      b.int_a_za[static_cast<std::size_t>(k - 2)].col(j) = read(j, k);
      b.int_a_zq[static_cast<std::size_t>(k - 2)].col(j) = read(n + j, k);
    }
  }
  b.zs_end = read(2 * n, 0);
  b.int_zs = read(2 * n, 1);
  for (int k = 2; k <= d; ++k) b.int_a_zs[static_cast<std::size_t>(k - 2)] = read(2 * n, k);
  for (int j = 0; j < d - 1; ++j) {
    b.zdelta_end.col(j) = read(2 * n + 1 + j, 0);
    b.int_zdelta.col(j) = read(2 * n + 1 + j, 1);
    for (int k = 2; k <= d; ++k)
      b.int_a_zdelta[static_cast<std::size_t>(k - 2)].col(j) = read(2 * n + 1 + j, k);
  }
  return b;
}

// The degree-(n+1) homogeneous leading polynomial Delta_1 = det N.
class LeadingPart {
 public:
  explicit LeadingPart(VariationalBundle bundle) : b_(std::move(bundle)) {}

  const VariationalBundle& bundle() const { return b_; }

  CMat matrix(const Vec& xi, Complex lambda) const {
    const int n = b_.n, d = b_.d;
    if (xi.size() != d) throw ConfigError("LeadingPart: xi must have d components");
    const double xi1 = xi(0);
    CMat m(2 * n, 2 * n);

    CVec c = (-lambda) * b_.zs_end.cast<Complex>() -
             (kImag * (b_.X * xi1)) * b_.uprime0.cast<Complex>();
    CVec cc = (-lambda * lambda) * b_.int_zs.cast<Complex>() -
              (kImag * (b_.X * xi1) * lambda) * b_.anchor.cast<Complex>();
    for (int j = 2; j <= d; ++j) {
      const double xj = xi(j - 1);
      const auto jdx = static_cast<std::size_t>(j - 2);
      c += (kImag * xj) * b_.zdelta_end.col(j - 2).cast<Complex>();
      cc += (kImag * lambda * xj) *
            (b_.int_zdelta.col(j - 2) - b_.int_a_zs[jdx]).cast<Complex>();
      cc += (b_.X * xi1 * xj) * b_.f_anchor[static_cast<std::size_t>(j - 1)].cast<Complex>();
      for (int k = 2; k <= d; ++k)
        cc -= (xj * xi(k - 1)) * b_.int_a_zdelta[jdx].col(k - 2).cast<Complex>();
    }
    m.col(0).head(n) = c;
    m.col(0).tail(n) = cc;

    for (int l = 2; l <= 2 * n; ++l) {
      CVec top = b_.w_bracket(l).cast<Complex>();
      CVec bot = lambda * b_.w_integral(l).cast<Complex>() -
                 (kImag * (b_.X * xi1)) * b_.lhat_at_zero(l).cast<Complex>();
      for (int j = 2; j <= d; ++j)
        bot += (kImag * xi(j - 1)) * b_.aw_integral(j, l).cast<Complex>();
      m.col(l - 1).head(n) = top;
      m.col(l - 1).tail(n) = bot;
    }
    return m;
  }

  Complex delta1(const Vec& xi, Complex lambda) const {
    return matrix(xi, lambda).determinant();
  }

 private:
  VariationalBundle b_;
};

inline LeadingPart assemble_delta1(VariationalBundle bundle) {
  return LeadingPart(std::move(bundle));
}

}  // namespace perwave

#endif
