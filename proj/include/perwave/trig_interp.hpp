#ifndef PERWAVE_TRIG_INTERP_HPP
#define PERWAVE_TRIG_INTERP_HPP

// Trigonometric interpolation of smooth periodic vector data on a uniform
// grid, via an in-place radix-2 FFT.  Spectrally accurate evaluation,
// differentiation, and period averages (the uniform-grid trapezoid rule is
// exact through the interpolant's bandwidth).

#include <cmath>
#include <numbers>

#include "perwave/types.hpp"

namespace perwave {

inline bool is_power_of_two(std::size_t m) { return m && !(m & (m - 1)); }

// In-place iterative radix-2 FFT; sign = -1 forward, +1 inverse (unscaled).
inline void fft_radix2(CVec& a, int sign) {
  const std::size_t m = static_cast<std::size_t>(a.size());
  if (!is_power_of_two(m)) throw ConfigError("fft: length must be a power of two");
  for (std::size_t i = 1, j = 0; i < m; ++i) {
    std::size_t bit = m >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a(static_cast<Eigen::Index>(i)), a(static_cast<Eigen::Index>(j)));
  }
  for (std::size_t len = 2; len <= m; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const Complex wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < m; i += len) {
      Complex w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        Complex u = a(static_cast<Eigen::Index>(i + j));
        Complex v = a(static_cast<Eigen::Index>(i + j + len / 2)) * w;
        a(static_cast<Eigen::Index>(i + j)) = u + v;
        a(static_cast<Eigen::Index>(i + j + len / 2)) = u - v;
        w *= wl;
      }
    }
  }
}

class TrigInterpolant {
 public:
  TrigInterpolant() = default;

  // samples: n x m matrix, column i = value at y_i = i * period / m.
  TrigInterpolant(const Mat& samples, double period)
      : period_(period), m_(samples.cols()), coeff_(samples.rows(), samples.cols()) {
    if (!is_power_of_two(static_cast<std::size_t>(m_)))
      throw ConfigError("trig interpolant: sample count must be a power of two");
    CVec row(m_);
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
      for (Eigen::Index c = 0; c < m_; ++c) row(c) = samples(r, c);
      fft_radix2(row, -1);
      coeff_.row(r) = row.transpose() / static_cast<double>(m_);
    }
  }

  double period() const { return period_; }
  Eigen::Index dim() const { return coeff_.rows(); }
  Eigen::Index size() const { return m_; }

  // kth frequency in integer units: 0..m/2, then negative.
  double freq(Eigen::Index k) const {
    return (k <= m_ / 2) ? static_cast<double>(k)
                         : static_cast<double>(k - m_);
  }

  Vec eval(double y) const { return deriv(y, 0); }

  // order-th derivative; the Nyquist mode is dropped from odd derivatives so
  // real data stays real.
  Vec deriv(double y, int order) const {
    const double w0 = 2.0 * std::numbers::pi / period_;
    CVec acc = CVec::Zero(coeff_.rows());
    for (Eigen::Index k = 0; k < m_; ++k) {
      const double fk = freq(k);
      if (order % 2 == 1 && k == m_ / 2) continue;
      Complex factor = std::pow(kImag * (w0 * fk), order);
      if (order == 0) factor = 1.0;
      const Complex phase = std::exp(kImag * (w0 * fk * y));
      acc += (factor * phase) * coeff_.col(k);
    }
    return acc.real();
  }

  // Period average of the data (the k = 0 Fourier coefficient).
  Vec mean() const { return coeff_.col(0).real(); }

 private:
  double period_ = 0.0;
  Eigen::Index m_ = 0;
  CMat coeff_;  // n x m
};

// Period average of samples of a smooth periodic function on the uniform
// grid y_i = i * period / m (trapezoid rule; spectral accuracy).
inline Vec periodic_average(const Mat& samples) {
  return samples.rowwise().mean();
}

}  // namespace perwave

#endif
