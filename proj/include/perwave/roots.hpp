#ifndef PERWAVE_ROOTS_HPP
#define PERWAVE_ROOTS_HPP

// Argument-principle root counting and low-frequency root tracking for
// analytic functions.  Winding numbers are computed by adaptive phase
// tracking (each segment's phase step kept below pi/2); localization inside
// a disk uses rectangle subdivision followed by Newton polishing with a
// centered-difference derivative.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "perwave/types.hpp"

namespace perwave {

using AnalyticFn = std::function<Complex(Complex)>;

struct WindingOptions {
  int initial_samples = 32;
  int max_depth = 40;          // per-segment bisection depth
  double magnitude_floor = 0.0;  // absolute |f| floor; 0: relative heuristic
  double floor_rel = 1e-13;      // floor = floor_rel * max |f| seen on contour
};

namespace roots_detail {

struct PhaseTracker {
  double total = 0.0;
  double min_mag = std::numeric_limits<double>::infinity();
  double max_mag = 0.0;

  void note(Complex f) {
    min_mag = std::min(min_mag, std::abs(f));
    max_mag = std::max(max_mag, std::abs(f));
  }
};

// Accumulate the phase change of f along the segment [z0, z1], splitting
// until each piece turns by less than pi/2.
inline void track_segment(const AnalyticFn& f, Complex z0, Complex f0, Complex z1,
                          Complex f1, int depth, const WindingOptions& opt,
                          PhaseTracker& acc) {
  const double dphi = std::arg(f1 / f0);
  if (std::abs(dphi) < std::numbers::pi / 2) {
    acc.total += dphi;
    return;
  }
  if (depth >= opt.max_depth)
    throw SolverError("count_roots: phase not resolved (root on or near the contour)");
  const Complex zm = 0.5 * (z0 + z1);
  const Complex fm = f(zm);
  acc.note(fm);
  track_segment(f, z0, f0, zm, fm, depth + 1, opt, acc);
  track_segment(f, zm, fm, z1, f1, depth + 1, opt, acc);
}

inline int winding_closed_polyline(const AnalyticFn& f, const std::vector<Complex>& pts,
                                   const WindingOptions& opt) {
  std::vector<Complex> vals(pts.size());
  PhaseTracker acc;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    vals[i] = f(pts[i]);
    acc.note(vals[i]);
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::size_t j = (i + 1) % pts.size();
    track_segment(f, pts[i], vals[i], pts[j], vals[j], 0, opt, acc);
  }
  const double floor = opt.magnitude_floor > 0.0 ? opt.magnitude_floor
                                                 : opt.floor_rel * acc.max_mag;
  if (acc.min_mag < floor)
    throw SolverError("count_roots: |f| fell below the contour floor (root on or near the contour)");
  const double w = acc.total / (2 * std::numbers::pi);
  const long rounded = std::lround(w);
  if (std::abs(w - static_cast<double>(rounded)) > 0.1)
    throw SolverError("count_roots: winding number failed to converge to an integer");
  return static_cast<int>(rounded);
}

}  // namespace roots_detail

// Number of zeros (with multiplicity) of f inside the circle |z - center| = radius.
inline int count_roots(const AnalyticFn& f, Complex center, double radius,
                       const WindingOptions& opt = {}) {
  std::vector<Complex> pts(static_cast<std::size_t>(opt.initial_samples));
  for (int i = 0; i < opt.initial_samples; ++i) {
    const double th = 2 * std::numbers::pi * i / opt.initial_samples;
    pts[static_cast<std::size_t>(i)] = center + radius * Complex(std::cos(th), std::sin(th));
  }
  return roots_detail::winding_closed_polyline(f, pts, opt);
}

inline int count_roots_rectangle(const AnalyticFn& f, Complex lo, Complex hi,
                                 const WindingOptions& opt = {}) {
  const std::vector<Complex> pts = {lo, Complex(hi.real(), lo.imag()), hi,
                                    Complex(lo.real(), hi.imag())};
  return roots_detail::winding_closed_polyline(f, pts, opt);
}

struct PolishOptions {
  double step_scale = 1e-7;   // centered-difference step = step_scale * max(1, |z|)
  double tol = 1e-12;
  int max_iterations = 40;
};

// Newton iteration z <- z - f/f' with f' from centered differences.
inline Complex polish_root(const AnalyticFn& f, Complex z, const PolishOptions& opt = {}) {
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double h = opt.step_scale * std::max(1.0, std::abs(z));
    const Complex fp = (f(z + h) - f(z - h)) / (2 * h);
    if (fp == Complex(0.0, 0.0))
      throw SolverError("polish_root: vanishing derivative estimate");
    const Complex step = f(z) / fp;
    z -= step;
    if (std::abs(step) <= opt.tol * std::max(1.0, std::abs(z))) return z;
  }
  return z;  // best effort; caller validates via |f|
}

struct LocalizeOptions {
  WindingOptions winding{};
  PolishOptions polish{};
  double cell_tol_rel = 1e-3;   // stop subdividing at diameter < rel * radius
  int max_cells = 4096;
  double dedupe_rel = 1e-6;
};

// All zeros of f in the disk |z - center| < radius by rectangle subdivision.
// Cells whose boundary passes too close to a root are retried with a nudged
// split; clustered roots that resist separation are reported as collisions.
struct LocalizedRoots {
  std::vector<Complex> roots;  // polished, one entry per root found
  int disk_count = 0;          // winding count over the enclosing circle
  bool collision = false;
};

inline LocalizedRoots localize_roots(const AnalyticFn& f, Complex center, double radius,
                                     const LocalizeOptions& opt = {}) {
  LocalizedRoots out;
  out.disk_count = count_roots(f, center, radius, opt.winding);
  if (out.disk_count == 0) return out;

  struct Cell {
    Complex lo, hi;
    int count;
  };

  std::vector<Cell> active;
  {
    const Complex corner(radius, radius);
    const int c = count_roots_rectangle(f, center - corner, center + corner, opt.winding);
    active.push_back({center - corner, center + corner, c});
  }
  std::vector<Complex> seeds;
  int processed = 0;
  const double min_diam = opt.cell_tol_rel * radius;
  while (!active.empty()) {
    if (++processed > opt.max_cells)
      throw SolverError("localize_roots: subdivision budget exhausted");
    Cell cell = active.back();
    active.pop_back();
    if (cell.count == 0) continue;
    if (std::abs(cell.hi - cell.lo) < min_diam) {
      seeds.push_back(0.5 * (cell.lo + cell.hi));
      if (cell.count > 1) out.collision = true;
      continue;
    }
    // Split into four disjoint children; if a root sits on the cross hairs,
    // retry with a deterministically nudged split point.
    bool done = false;
    for (int attempt = 0; attempt < 8 && !done; ++attempt) {
      const double t = 0.5 + 0.041 * attempt;
      const Complex mid = cell.lo + t * (cell.hi - cell.lo);
      const Complex children[4][2] = {
          {cell.lo, mid},
          {Complex(mid.real(), cell.lo.imag()), Complex(cell.hi.real(), mid.imag())},
          {Complex(cell.lo.real(), mid.imag()), Complex(mid.real(), cell.hi.imag())},
          {mid, cell.hi}};
      try {
        int found = 0;
        std::vector<Cell> fresh;
        for (const auto& ch : children) {
          const int c = count_roots_rectangle(f, ch[0], ch[1], opt.winding);
          if (c > 0) fresh.push_back({ch[0], ch[1], c});
          found += c;
        }
        if (found != cell.count)
          throw SolverError("localize_roots: subdivision miscount");
        for (auto& c : fresh) active.push_back(std::move(c));
        done = true;
      } catch (const SolverError&) {
        if (attempt + 1 == 8)
          throw SolverError("localize_roots: could not isolate roots from cell boundaries");
      }
    }
  }

  for (Complex seed : seeds) {
    Complex z = polish_root(f, seed, opt.polish);
    bool dup = false;
    for (Complex r : out.roots) dup |= std::abs(r - z) < opt.dedupe_rel * radius;
    if (!dup) out.roots.push_back(z);
  }
  if (static_cast<int>(out.roots.size()) != out.disk_count) out.collision = true;
  return out;
}

struct TrackOptions {
  LocalizeOptions localize{};
  PolishOptions polish{};
  WindingOptions winding{};
  bool verify_counts = true;
};

// Branches lambda_hat_j(rho) of the rescaled family rho |-> roots of
// lambda_hat -> F(rho, rho * lambda_hat) inside a fixed ball.  The grid must
// be decreasing; branches are continued by warm-started Newton.
struct TrackedBranches {
  std::vector<double> rho;
  std::vector<std::vector<Complex>> branches;  // branches[j][k] at rho[k]
  bool collision = false;
};

inline TrackedBranches track_roots(
    const std::function<Complex(double, Complex)>& scaled_fn,
    const std::vector<double>& rho_grid, double ball_radius,
    const TrackOptions& opt = {}) {
  if (rho_grid.empty()) throw ConfigError("track_roots: empty rho grid");
  for (std::size_t i = 1; i < rho_grid.size(); ++i)
    if (rho_grid[i] >= rho_grid[i - 1])
      throw ConfigError("track_roots: rho grid must decrease");

  TrackedBranches out;
  out.rho = rho_grid;
  auto at_rho = [&scaled_fn](double rho) {
    return AnalyticFn([&scaled_fn, rho](Complex z) { return scaled_fn(rho, z); });
  };

  const auto first = localize_roots(at_rho(rho_grid[0]), Complex(0, 0), ball_radius,
                                    opt.localize);
  out.collision = first.collision;
  out.branches.assign(first.roots.size(), {});
  for (std::size_t j = 0; j < first.roots.size(); ++j)
    out.branches[j].push_back(first.roots[j]);

  for (std::size_t k = 1; k < rho_grid.size(); ++k) {
    const AnalyticFn f = at_rho(rho_grid[k]);
    std::vector<Complex> next(out.branches.size());
    for (std::size_t j = 0; j < out.branches.size(); ++j)
      next[j] = polish_root(f, out.branches[j].back(), opt.polish);
    for (std::size_t i = 0; i < next.size(); ++i)
      for (std::size_t j = i + 1; j < next.size(); ++j)
        if (std::abs(next[i] - next[j]) < 1e-9 * ball_radius) out.collision = true;
    if (opt.verify_counts) {
      const int c = count_roots(f, Complex(0, 0), ball_radius, opt.winding);
      if (c != static_cast<int>(out.branches.size()))
        throw SolverError("track_roots: branch count changed along the rho grid");
    }
    for (std::size_t j = 0; j < out.branches.size(); ++j)
      out.branches[j].push_back(next[j]);
  }
  return out;
}

// rho -> 0 limit of each branch by linear extrapolation from the two
// smallest grid levels.
inline std::vector<Complex> branch_limits(const TrackedBranches& tb) {
  std::vector<Complex> out;
  out.reserve(tb.branches.size());
  const std::size_t k = tb.rho.size();
  for (const auto& br : tb.branches) {
    if (k >= 2) {
      const double r0 = tb.rho[k - 2], r1 = tb.rho[k - 1];
      // value at 0 of the line through (r0, z0), (r1, z1)
      out.push_back(br[k - 1] + (br[k - 1] - br[k - 2]) * (r1 / (r0 - r1)));
    } else {
      out.push_back(br.back());
    }
  }
  return out;
}

}  // namespace perwave

#endif
