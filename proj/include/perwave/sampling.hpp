#ifndef PERWAVE_SAMPLING_HPP
#define PERWAVE_SAMPLING_HPP

// Deterministic sample generators: Halton low-discrepancy points for box
// sampling, uniform angular grids and subdivided icosahedra for spheres,
// and seeded product-sphere directions for the frequency fits.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <utility>

#include "perwave/types.hpp"

namespace perwave {

inline double halton(std::uint64_t index, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

// Quasi-uniform points in the box given by bounds (rows: [lo, hi] per
// coordinate).  The seed offsets the sequence, keeping runs reproducible.
inline std::vector<Vec> halton_box(const Mat& bounds, int count,
                                   std::uint64_t seed = 0) {
  static const std::uint64_t primes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                         23, 29, 31, 37, 41, 43, 47, 53};
  const Eigen::Index dim = bounds.rows();
  if (dim > static_cast<Eigen::Index>(std::size(primes)))
    throw ConfigError("halton_box: dimension too large");
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vec p(dim);
    for (Eigen::Index d = 0; d < dim; ++d) {
      const double t = halton(seed + 1 + static_cast<std::uint64_t>(i),
                              primes[static_cast<std::size_t>(d)]);
      p(d) = bounds(d, 0) + t * (bounds(d, 1) - bounds(d, 0));
    }
    out.push_back(std::move(p));
  }
  return out;
}

// Directions on S^{d-1}: uniform angles for d = 2, a subdivided icosahedron
// for d = 3, seeded Gaussian directions otherwise.
inline std::vector<Vec> sphere_directions(int d, int count, std::uint64_t seed = 0) {
  std::vector<Vec> out;
  if (d == 2) {
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const double th = 2.0 * std::numbers::pi * i / count;
      Vec v(2);
      v << std::cos(th), std::sin(th);
      out.push_back(std::move(v));
    }
    return out;
  }
  if (d == 3) {
    // Icosahedron vertices + repeated edge-midpoint subdivision, projected to
    // the sphere, until at least `count` distinct directions exist.
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> verts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& v : verts) v.normalize();
    std::vector<Eigen::Vector3i> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    while (static_cast<int>(verts.size()) < count) {
      std::map<std::pair<int, int>, int> midpoint;
      auto mid = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        Eigen::Vector3d m = (verts[static_cast<std::size_t>(a)] +
                             verts[static_cast<std::size_t>(b)]).normalized();
        verts.push_back(m);
        const int idx = static_cast<int>(verts.size()) - 1;
        midpoint.emplace(key, idx);
        return idx;
      };
      std::vector<Eigen::Vector3i> next;
      next.reserve(faces.size() * 4);
      for (const auto& f : faces) {
        const int a = mid(f(0), f(1)), b = mid(f(1), f(2)), c = mid(f(2), f(0));
        next.push_back({f(0), a, c});
        next.push_back({f(1), b, a});
        next.push_back({f(2), c, b});
        next.push_back({a, b, c});
      }
      faces = std::move(next);
    }
    out.reserve(verts.size());
    for (const auto& v : verts) {
      Vec w(3);
      w << v(0), v(1), v(2);
      out.push_back(std::move(w));
    }
    return out;
  }
  std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vec v(d);
    do {
      for (int k = 0; k < d; ++k) v(k) = gauss(rng);
    } while (v.norm() < 1e-8);
    out.push_back(v / v.norm());
  }
  return out;
}

// A direction on the product sphere |xi|^2 + |lambda|^2 = 1 with lambda
// complex, used to probe the Evans function's leading homogeneous part.
struct FrequencyDirection {
  Vec xi;          // length d
  Complex lambda;  // |xi|^2 + |lambda|^2 = 1
};

// Seeded directions with |lambda| >= lambda_floor, generated in conjugate
// pairs (xi, lambda) / (-xi, conj lambda) so the set is closed under the
// reality symmetry of real-coefficient systems.
inline std::vector<FrequencyDirection> product_sphere_directions(
    int d, int count, double lambda_floor, std::uint64_t seed) {
  std::mt19937_64 rng(seed + 0x51ab5e1b0ull);
  std::normal_distribution<double> gauss;
  std::vector<FrequencyDirection> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    Vec xi(d);
    for (int k = 0; k < d; ++k) xi(k) = gauss(rng);
    Complex lam(gauss(rng), gauss(rng));
    const double norm = std::sqrt(xi.squaredNorm() + std::norm(lam));
    if (norm < 1e-8) continue;
    xi /= norm;
    lam /= norm;
    if (std::abs(lam) < lambda_floor) continue;
    out.push_back({xi, lam});
    if (static_cast<int>(out.size()) < count)
      out.push_back({-xi, std::conj(lam)});
  }
  return out;
}

}  // namespace perwave

#endif
