#ifndef PERWAVE_TYPES_HPP
#define PERWAVE_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace perwave {

using Complex = std::complex<double>;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = Vector<double>;
using Mat = Matrix<double>;
using CVec = Vector<Complex>;
using CMat = Matrix<Complex>;

inline constexpr Complex kImag{0.0, 1.0};

// Configuration / input problems (bad schema, unknown names, ill-shaped
// parameters).  CLI maps these to exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures (divergent Newton, singular viscosity, step-size
// underflow, degenerate pencils).  CLI maps these to exit code 2.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

// Rank-3 object stored as a list of n x n slices.  Two conventions are used
// and named at the call sites:
//  - flux Hessians:  slice[i] = Hessian of component i, so
//    (D2f [x, y])_i = x^T slice[i] y;
//  - viscosity derivatives:  slice[k] = dB/du_k, so
//    (DB v) = sum_k v_k slice[k].
using Tensor3 = std::vector<Mat>;

inline Vec hessian_apply(const Tensor3& hess, const Vec& x, const Vec& y) {
  Vec out(static_cast<Eigen::Index>(hess.size()));
  for (std::size_t i = 0; i < hess.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = x.dot(hess[i] * y);
  return out;
}

inline Mat partial_contract(const Tensor3& deriv, const Vec& v) {
  if (deriv.empty()) return Mat();
  Mat out = Mat::Zero(deriv[0].rows(), deriv[0].cols());
  for (std::size_t k = 0; k < deriv.size(); ++k)
    out += v(static_cast<Eigen::Index>(k)) * deriv[k];
  return out;
}

}  // namespace perwave

#endif
