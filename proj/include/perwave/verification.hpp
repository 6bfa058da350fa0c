#ifndef PERWAVE_VERIFICATION_HPP
#define PERWAVE_VERIFICATION_HPP

// Numerical checks of the low-frequency structure of the Evans function:
// extraction of its leading homogeneous part along product-sphere
// directions, the fit of the single constant Gamma_0 with
// D = Gamma_0 Delta + O(|xi, lambda|^{n+2}), and the comparison of tracked
// root branches with the constrained characteristics.

#include <algorithm>

#include "perwave/dispersion.hpp"
#include "perwave/roots.hpp"
#include "perwave/sampling.hpp"

namespace perwave {

// Evaluator of an analytic frequency function (xi, lambda) -> C, e.g. the
// Evans function of a fixed profile.
using FrequencyFn = std::function<Complex(const Vec& xi, Complex lambda)>;

struct LeadingFit {
  double order = 0.0;        // limiting log2 slope of |D| along the ray
  Complex coefficient{0, 0}; // extrapolated D(rho .) / rho^{degree}
  std::vector<double> rho;
  std::vector<Complex> values;
  std::vector<double> slopes;
  bool converged = false;
  std::string diagnostic;
};

// Geometric ray fit: rho_k = rho0 * 2^{-k}, k = 0..levels-1.
inline LeadingFit fit_leading_part(const FrequencyFn& fn, const FrequencyDirection& dir,
                                   double rho0, int levels, int degree) {
  if (levels < 3) throw ConfigError("fit_leading_part: need at least 3 levels");
  LeadingFit fit;
  fit.rho.resize(static_cast<std::size_t>(levels));
  fit.values.resize(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) {
    const double rho = rho0 * std::pow(2.0, -k);
    fit.rho[static_cast<std::size_t>(k)] = rho;
    fit.values[static_cast<std::size_t>(k)] = fn(rho * dir.xi, rho * dir.lambda);
  }
  for (int k = 1; k < levels; ++k) {
    const double num = std::abs(fit.values[static_cast<std::size_t>(k - 1)]);
    const double den = std::abs(fit.values[static_cast<std::size_t>(k)]);
    if (den == 0.0 || num == 0.0) {
      fit.diagnostic = "vanishing value on the ray";
      return fit;
    }
    fit.slopes.push_back(std::log2(num / den));
  }
  fit.order = fit.slopes.back();
  const double prev = fit.slopes[fit.slopes.size() - 2];
  fit.converged = std::abs(fit.order - prev) < 0.1;
  if (!fit.converged)
    fit.diagnostic = "slope not settled between the last two levels";

  auto scaled = [&](int k) {
    return fit.values[static_cast<std::size_t>(k)] /
           std::pow(fit.rho[static_cast<std::size_t>(k)], degree);
  };
  // One Richardson step removes the O(rho) contamination from the
  // next-order term.
  fit.coefficient = 2.0 * scaled(levels - 1) - scaled(levels - 2);
  return fit;
}

struct TheoremDirectionResult {
  FrequencyDirection dir;
  Complex coefficient{0, 0};
  Complex delta_value{0, 0};
  Complex ratio{0, 0};
  double order = 0.0;
  double remainder_slope = 0.0;   // least-squares slope over the last 3 levels
  std::vector<double> remainder;  // |D - Gamma_0 Delta| per level
  Complex delta1_ratio{0, 0};     // variational cross-check when available
};

struct TheoremOneReport {
  std::vector<TheoremDirectionResult> directions;
  Complex gamma0{0, 0};
  double ratio_spread = 0.0;          // std / |mean| over directions
  double remainder_slope_min = 0.0;
  double remainder_slope_median = 0.0;
  double order_min = 0.0, order_max = 0.0;
  bool pass = false;
  double spread_tol = 1e-2;
  double slope_threshold = 0.0;
};

struct TheoremOneOptions {
  int direction_count = 10;
  double rho0 = 1e-2;
  int levels = 5;               // rho0 * 2^{-k}, k < levels (1e-2 .. 1.25e-3 wide)
  double lambda_floor = 0.3;
  double delta_floor_rel = 1e-3;  // resample directions with |Delta| below this * max
  int max_resample = 200;
  std::uint64_t seed = 12345;
  double spread_tol = 1e-2;
  double slope_margin = 0.2;    // require slope >= n + 2 - margin
};

// Optional variational comparison: Delta_1(xi, lambda) evaluator.
inline TheoremOneReport verify_theorem1(const FrequencyFn& evans_fn,
                                        const HomogenizedJacobians& h,
                                        const TheoremOneOptions& opt = {},
                                        const FrequencyFn* delta1_fn = nullptr) {
  const NondegeneracyCheck nd = nondegeneracy(h);
  if (!nd.ok)
    throw SolverError("verify_theorem1: nondegeneracy gate failed (det P ~ 0)");
  const int n = h.n;
  const int degree = n + 1;

  // Directions on the product sphere avoiding the zero set of Delta.
  std::vector<FrequencyDirection> dirs;
  {
    auto pool = product_sphere_directions(h.d, opt.direction_count + opt.max_resample,
                                          opt.lambda_floor, opt.seed);
    std::vector<double> mags;
    for (const auto& dir : pool) mags.push_back(std::abs(delta(h, dir.xi, dir.lambda)));
    const double dmax = *std::max_element(mags.begin(), mags.end());
    for (std::size_t i = 0; i < pool.size() && static_cast<int>(dirs.size()) < opt.direction_count; ++i)
      if (mags[i] >= opt.delta_floor_rel * dmax) dirs.push_back(pool[i]);
    if (static_cast<int>(dirs.size()) < opt.direction_count)
      throw SolverError("verify_theorem1: could not sample directions clear of the zero set of Delta");
  }

  TheoremOneReport rep;
  rep.spread_tol = opt.spread_tol;
  rep.slope_threshold = n + 2 - opt.slope_margin;
  Complex ratio_sum{0, 0};
  std::vector<LeadingFit> fits;
  for (const auto& dir : dirs) {
    TheoremDirectionResult res;
    res.dir = dir;
    fits.push_back(fit_leading_part(evans_fn, dir, opt.rho0, opt.levels, degree));
    const LeadingFit& fit = fits.back();
    res.coefficient = fit.coefficient;
    res.order = fit.order;
    res.delta_value = delta(h, dir.xi, dir.lambda);
    res.ratio = res.coefficient / res.delta_value;
    if (delta1_fn)
      res.delta1_ratio = (*delta1_fn)(dir.xi, dir.lambda) / res.delta_value;
    ratio_sum += res.ratio;
    rep.directions.push_back(std::move(res));
  }
  rep.gamma0 = ratio_sum / static_cast<double>(rep.directions.size());

  double var = 0.0;
  rep.order_min = rep.directions.front().order;
  rep.order_max = rep.order_min;
  for (auto& res : rep.directions) {
    var += std::norm(res.ratio - rep.gamma0);
    rep.order_min = std::min(rep.order_min, res.order);
    rep.order_max = std::max(rep.order_max, res.order);
  }
  rep.ratio_spread = std::sqrt(var / static_cast<double>(rep.directions.size())) /
                     std::abs(rep.gamma0);

  // Remainder |D - Gamma_0 Delta| along each ray; least-squares log2 slope
  // through the last three levels.
  std::vector<double> slopes;
  for (std::size_t di = 0; di < rep.directions.size(); ++di) {
    TheoremDirectionResult& res = rep.directions[di];
    const LeadingFit& fit = fits[di];
    res.remainder.resize(fit.rho.size());
    for (std::size_t k = 0; k < fit.rho.size(); ++k) {
      const Complex lead = rep.gamma0 * res.delta_value *
                           std::pow(fit.rho[k], degree);
      res.remainder[k] = std::abs(fit.values[k] - lead);
    }
    const std::size_t kk = fit.rho.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = kk - 3; k < kk; ++k) {
      const double x = std::log2(fit.rho[k]);
      const double y = std::log2(std::max(res.remainder[k], 1e-300));
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    res.remainder_slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    slopes.push_back(res.remainder_slope);
  }
  std::sort(slopes.begin(), slopes.end());
  rep.remainder_slope_min = slopes.front();
  rep.remainder_slope_median = slopes[slopes.size() / 2];
  rep.pass = rep.ratio_spread <= rep.spread_tol &&
             rep.remainder_slope_min >= rep.slope_threshold;
  return rep;
}

// Max deviation between branch limits and -i a_j under the best assignment
// (brute-force over permutations; the sets here have <= 6 elements).
inline double optimal_assignment_deviation(std::vector<Complex> lhs, std::vector<Complex> rhs) {
  if (lhs.size() != rhs.size())
    throw SolverError("verify_corollary1: branch count mismatch");
  std::vector<std::size_t> perm(lhs.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i)
      worst = std::max(worst, std::abs(lhs[i] - rhs[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

struct CorollaryDirectionResult {
  Vec xi_hat;
  std::vector<Complex> branch_limits;
  std::vector<Complex> characteristics;  // -i a_j targets
  double deviation = 0.0;
};

struct CorollaryOneReport {
  std::vector<CorollaryDirectionResult> directions;
  double max_deviation = 0.0;
  bool pass = false;
  double tolerance = 0.0;
};

inline CorollaryOneReport verify_corollary1(
    const std::vector<CorollaryDirectionResult>& matched, double tolerance) {
  CorollaryOneReport rep;
  rep.tolerance = tolerance;
  rep.directions = matched;
  for (auto& dir : rep.directions) {
    dir.deviation = optimal_assignment_deviation(dir.branch_limits, dir.characteristics);
    rep.max_deviation = std::max(rep.max_deviation, dir.deviation);
  }
  rep.pass = rep.max_deviation <= tolerance;
  return rep;
}

}  // namespace perwave

#endif
