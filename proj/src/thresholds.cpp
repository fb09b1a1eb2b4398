#include "superbroadcast/thresholds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "superbroadcast/analysis.hpp"

namespace superbroadcast {

ThresholdResult threshold_of(const OptimalScaling& scaling, double tol) {
  if (!(tol >= 1e-10)) throw std::domain_error("threshold tolerance must be >= 1e-10");
  ThresholdResult out;
  out.exhaustive = scaling.exhaustive();

  std::vector<double> excess(kThresholdGridSteps + 1, 0.0);
  for (int k = 1; k <= kThresholdGridSteps; ++k)
    excess[k] = scaling.p(static_cast<double>(k) / kThresholdGridSteps) - 1.0;

  int bracket = 0;
  for (int k = 1; k < kThresholdGridSteps; ++k)
    if (excess[k] >= 0.0 && excess[k + 1] < 0.0) bracket = k;
  if (bracket == 0) return out;

  double lo = static_cast<double>(bracket) / kThresholdGridSteps;
  double hi = static_cast<double>(bracket + 1) / kThresholdGridSteps;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (scaling.p(mid) >= 1.0 ? lo : hi) = mid;
  }
  out.lower = lo;
  out.upper = hi;
  out.bracket_width = hi - lo;
  out.r_star = 0.5 * (lo + hi);
  return out;
}

ThresholdResult r_star(int n_in, int m_out, const ThresholdOptions& options) {
  if (n_in < 1 || m_out <= n_in)
    throw std::domain_error("r_star needs M > N >= 1, got N=" + std::to_string(n_in) +
                            ", M=" + std::to_string(m_out));
  auto out = threshold_of(OptimalScaling::build(n_in, m_out, options.exhaustive_limit), options.tol);
  out.n_in = n_in;
  out.m_out = m_out;
  return out;
}

ThresholdResult r_star_limit(int n_in, double tol) {
  if (n_in < 1) throw std::domain_error("r_star_limit needs N >= 1");
  auto out = threshold_of(OptimalScaling::limit(n_in), tol);
  out.n_in = n_in;
  out.m_out = 0;
  return out;
}

MStarResult m_star(int n_in, int cap, const ThresholdOptions& options) {
  if (n_in < 1 || cap <= n_in)
    throw std::domain_error("m_star needs N >= 1 and cap > N, got N=" + std::to_string(n_in) +
                            ", cap=" + std::to_string(cap));
  MStarResult out;
  out.n_in = n_in;
  out.cap = cap;
  for (int m = n_in + 1; m <= cap; ++m) {
    out.cells.push_back(r_star(n_in, m, options));
    if (!out.cells.back().r_star) {
      if (m > n_in + 1) out.m_star = m - 1;
      return out;
    }
  }
  out.m_star = cap;
  out.at_least_cap = true;
  return out;
}

PowerLawFit asymptotic_fit(std::span<const int> n_values, FitCurve curve,
                           const FitOptions& options) {
  if (n_values.size() < 2) throw std::domain_error("a power-law fit needs at least two N values");
  for (int n : n_values)
    if (n < 10)
      throw std::domain_error("asymptotic fit needs N >= 10, got N=" + std::to_string(n));

  PowerLawFit fit;
  const ThresholdOptions threshold_options{options.tol, ThresholdOptions{}.exhaustive_limit};
  for (int n : n_values) {
    ThresholdResult t;
    if (curve == FitCurve::adjacent) {
      t = r_star(n, n + 1, threshold_options);
    } else {
      const auto ms = m_star(n, options.cap, threshold_options);
      if (ms.at_least_cap)
        t = r_star_limit(n, options.tol);
      else if (ms.m_star)
        t = r_star(n, *ms.m_star, threshold_options);
    }
    if (!t.r_star) throw std::runtime_error("no superbroadcasting threshold at N=" + std::to_string(n));
    fit.n_values.push_back(n);
    fit.gaps.push_back(1.0 - *t.r_star);
  }

  const double count = static_cast<double>(fit.n_values.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < fit.n_values.size(); ++i) {
    const double x = std::log(static_cast<double>(fit.n_values[i]));
    const double y = std::log(fit.gaps[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  fit.prefactor = std::exp((sy - fit.slope * sx) / count);
  return fit;
}

}  // namespace superbroadcast
