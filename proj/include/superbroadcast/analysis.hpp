#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "superbroadcast/channels.hpp"
#include "superbroadcast/su2.hpp"

namespace superbroadcast {

/// How the per-sector sums over output projections m are evaluated.
enum class MomentRoute {
  /// Explicit sums of exact squared Clebsch-Gordan coefficients.
  clebsch_gordan,
  /// Projection-theorem reduction: sum_m CG^2 = (2J+1)/(2l+1) and
  /// sum_m m CG^2 = n (2J+1)[J(J+1) - j(j+1) - l(l+1)] / (2 l(l+1)(2l+1)).
  /// Exact, independent of the projection count, used for large M.
  projection,
};

/// Exact sums over the output projection m for one coupling (j, l, J) of
/// M output qubits, indexed by input projection n = -l + k:
///   mass[k]   = sum_m <J m+n | j m, l n>^2
///   moment[k] = sum_m <J m+n | j m, l n>^2 * 2m/M
struct CouplingMoments {
  int m_out = 0;
  CouplingTriple triple;
  std::vector<Rational> mass;
  std::vector<Rational> moment;

  /// True when every moment vanishes, as for l = 0.
  bool moment_is_zero() const;
};

CouplingMoments coupling_moments(int m_out, const CouplingTriple& triple,
                                 MomentRoute route = MomentRoute::clebsch_gordan);

/// Eigenvalue weights of the conjugated input rho~^{(x)N}, one vector per
/// input spin l (index k <-> n = -l + k):
///   w(l, n) = r+^(N/2 - n) * r-^(N/2 + n),  r+- = (1 +- r)/2.
struct InputWeights {
  int n_in = 0;
  double r = 0.0;
  std::vector<std::vector<double>> w;

  double at(HalfInt l, HalfInt n) const;
};

/// Throws std::domain_error unless 0 <= r <= 1.
InputWeights input_weights(int n_in, double r);

struct BlochReport {
  double r = 0.0;
  /// Signed length of the output Bloch vector along the input axis.
  double r_prime = 0.0;
  /// r_prime / r, or its r -> 0 limit when r == 0.
  double p = 0.0;
  bool p_is_limit = false;
};

/// The single-copy output as a linear functional of the input weights:
///   r'(r) = sum_{l,n} slope[l][n] w(l, n),  Tr rho' = sum_{l,n} trace[l][n] w(l, n).
/// w(l, n) depends on n only, so the tables are stored summed over l.
class BlochCurve {
public:
  static BlochCurve for_map(const ExtremalMap& map,
                            MomentRoute route = MomentRoute::clebsch_gordan);
  static BlochCurve for_channel(const ChannelCoeffs& c,
                                MomentRoute route = MomentRoute::clebsch_gordan);
  /// M -> infinity limit of the conjectured optimal map of N inputs.
  static BlochCurve conjectured_limit(int n_in);

  int n_in() const { return n_in_; }
  double r_prime(double r) const;
  double trace(double r) const;
  /// Exact r -> 0 limit of r'/r from the first-order expansion of w.
  double p_at_zero() const;
  BlochReport report(double r) const;

private:
  explicit BlochCurve(int n_in);
  std::size_t slot(HalfInt n) const { return static_cast<std::size_t>((n.doubled() + n_in_) / 2); }

  int n_in_ = 0;
  // indexed by n = -N/2 + k
  std::vector<double> slope_;
  std::vector<double> trace_;
};

/// Throws std::domain_error for r outside [0, 1] or an invalid map.
BlochReport single_copy_bloch(const ExtremalMap& map, double r,
                              MomentRoute route = MomentRoute::clebsch_gordan);
BlochReport single_copy_convex(const ChannelCoeffs& c, double r,
                               MomentRoute route = MomentRoute::clebsch_gordan);
/// Trace of the single-copy output operator; 1 for every channel.
double single_copy_trace(const ExtremalMap& map, double r,
                         MomentRoute route = MomentRoute::clebsch_gordan);

struct OptimalResult {
  ExtremalMap map;
  BlochReport report;
  /// False when the enumeration cap forced evaluation of the conjecture only.
  bool exhaustive = true;
  std::uint64_t maps_evaluated = 0;
  /// The conjectured map attains the maximum in every input sector and is the
  /// unique argmax in every sector whose contribution is not identically zero.
  /// Empty when the search fell back to the conjecture.
  std::optional<bool> matches_conjecture;
  ExtremalMap conjecture;
  BlochReport conjecture_report;
  std::string note;
};

struct OptimalOptions {
  std::uint64_t cap = kDefaultEnumerationCap;
};

/// Exhaustive argmax of r' over enumerate_extremal(N, M); ties go to the
/// earliest map in enumeration order. Falls back to the conjectured map when
/// the enumeration exceeds the cap. Throws std::domain_error unless 0 < r <= 1.
OptimalResult optimal_map(int n_in, int m_out, double r, const OptimalOptions& options = {});

/// Reusable exhaustive search: moment tables are built once per (N, M).
class ExhaustiveSearch {
public:
  ExhaustiveSearch(int n_in, int m_out, std::uint64_t cap = kDefaultEnumerationCap);

  int n_in() const { return n_in_; }
  int m_out() const { return m_out_; }
  std::uint64_t count() const { return count_; }

  /// Best r' and its choice indices (see for_each_extremal_index).
  struct Best {
    double r_prime = 0.0;
    std::vector<std::size_t> choice;
  };
  Best best(double r) const;
  /// Max over maps of the r -> 0 limit of r'/r.
  double best_p_at_zero() const;

  ExtremalMap map_for(const std::vector<std::size_t>& choice) const;
  /// Contribution of each sector choice to r' at r: [sector][choice].
  std::vector<std::vector<double>> sector_values(double r) const;
  /// Whether sector i contributes zero to r' for every choice, decided exactly.
  bool sector_degenerate(std::size_t sector) const { return degenerate_[sector]; }
  std::size_t conjecture_choice(std::size_t sector) const { return conjecture_[sector]; }

private:
  int n_in_;
  int m_out_;
  std::uint64_t count_;
  std::uint64_t cap_;
  std::vector<HalfInt> spins_;
  std::vector<std::vector<SectorChoice>> choices_;
  // [sector][choice][n] prefactor-weighted moments
  std::vector<std::vector<std::vector<double>>> slope_;
  std::vector<bool> degenerate_;
  std::vector<std::size_t> conjecture_;
};

/// p_opt(r) for fixed (N, M): exhaustive maximum over extremal maps when the
/// enumeration is small enough, otherwise the conjectured map on the
/// projection route (no enumeration).
class OptimalScaling {
public:
  static OptimalScaling build(int n_in, int m_out, std::uint64_t exhaustive_limit);
  /// M -> infinity limit of the conjectured map.
  static OptimalScaling limit(int n_in);

  bool exhaustive() const { return search_.has_value(); }
  double r_prime(double r) const;
  /// r'/r for r > 0, the analytic limit at r = 0.
  double p(double r) const;

private:
  std::optional<ExhaustiveSearch> search_;
  std::optional<BlochCurve> curve_;
};

/// phi(l) = M/2, Phi(l) = l + M/2: output Bloch vector antiparallel to the input.
ExtremalMap anti_aligned_map(int n_in, int m_out);

/// Convex mixture of the optimal map and the anti-aligned map with p(r) = 1,
/// or nullopt when p_opt(r) < 1. Throws std::domain_error unless 0 < r < 1.
std::optional<ChannelCoeffs> perfect_broadcast_channel(int n_in, int m_out, double r,
                                                       const OptimalOptions& options = {});

}  // namespace superbroadcast
