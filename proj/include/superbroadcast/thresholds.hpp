#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace superbroadcast {

class OptimalScaling;

/// Grid resolution of the sign-change scan of p(r) - 1.
inline constexpr int kThresholdGridSteps = 512;
inline constexpr int kDefaultMStarCap = 200;

struct ThresholdOptions {
  /// Bisection stops once the bracket is this narrow; must be >= 1e-10.
  double tol = 1e-6;
  /// Exhaustive maximum over extremal maps up to this many maps, otherwise
  /// the conjectured optimal map.
  std::uint64_t exhaustive_limit = 5000;
};

/// Largest input purity with p(r) >= 1. m_out == 0 marks the M -> infinity limit.
struct ThresholdResult {
  int n_in = 0;
  int m_out = 0;
  std::optional<double> r_star;
  /// Final bracket [lower, upper] with p(lower) >= 1 > p(upper).
  double lower = 0.0;
  double upper = 0.0;
  double bracket_width = 0.0;
  bool exhaustive = false;
};

/// Scans p(r) - 1 on r = k/512, k = 1..512, takes the largest bracket where it
/// drops from >= 0 to < 0, and bisects it down to tol. Absent when p < 1 on
/// every grid point. Throws std::domain_error unless M > N >= 1 and tol >= 1e-10.
ThresholdResult r_star(int n_in, int m_out, const ThresholdOptions& options = {});

/// Same scan on the M -> infinity limit of the conjectured optimal map.
ThresholdResult r_star_limit(int n_in, double tol = 1e-6);

/// Same scan on an arbitrary scaling curve.
ThresholdResult threshold_of(const OptimalScaling& scaling, double tol);

struct MStarResult {
  int n_in = 0;
  /// Largest M with superbroadcasting; empty when M = N+1 already fails.
  std::optional<int> m_star;
  /// Superbroadcasting held for every M up to the cap.
  bool at_least_cap = false;
  int cap = kDefaultMStarCap;
  /// One entry per examined M, ascending from N+1.
  std::vector<ThresholdResult> cells;
};

/// Walks M = N+1, N+2, ... and stops at the first M without superbroadcasting.
/// Throws std::domain_error unless N >= 1 and cap > N.
MStarResult m_star(int n_in, int cap = kDefaultMStarCap, const ThresholdOptions& options = {});

enum class FitCurve {
  /// 1 - r*(N, N+1)
  adjacent,
  /// 1 - r*(N, M*(N)), using the M -> infinity limit when M* reaches the cap
  maximal,
};

struct PowerLawFit {
  /// log(1 - r*) = slope * log N + log(prefactor)
  double slope = 0.0;
  double prefactor = 0.0;
  std::vector<int> n_values;
  std::vector<double> gaps;  // 1 - r* per N
};

struct FitOptions {
  double tol = 1e-10;
  int cap = kDefaultMStarCap;
};

/// Least-squares power law. Throws std::domain_error for fewer than two
/// values or any N < 10, and std::runtime_error naming the first N without a
/// threshold.
PowerLawFit asymptotic_fit(std::span<const int> n_values, FitCurve curve,
                           const FitOptions& options = {});

}  // namespace superbroadcast
