#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "superbroadcast/half_int.hpp"
#include "superbroadcast/su2.hpp"

namespace superbroadcast {

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Raised when an enumeration would exceed its cap. Never truncates silently.
class SearchSpaceTooLarge : public std::runtime_error {
public:
  SearchSpaceTooLarge(int n_in, int m_out, const BigInt& count, std::uint64_t cap);
  const std::string& count() const { return count_; }

private:
  std::string count_;
};

/// Extreme point (phi, Phi) of the covariant N -> M broadcasting channels.
///
/// phi[i] and big_phi[i] are the output spin j and the coupled spin J chosen
/// for the i-th input spin of spin_range(n_in).
struct ExtremalMap {
  int n_in = 0;
  int m_out = 0;
  std::vector<HalfInt> phi;
  std::vector<HalfInt> big_phi;

  std::vector<HalfInt> input_spins() const { return spin_range(n_in); }
  bool operator==(const ExtremalMap&) const = default;
  std::string str() const;
};

/// Throws std::domain_error if phi(l) is not an output spin or Phi(l) is not
/// in coupled_range(phi(l), l).
void validate(const ExtremalMap& map);

/// phi(l) = M/2, Phi(l) = |l - M/2|.
ExtremalMap conjectured_optimal_map(int n_in, int m_out);

/// One sector's admissible (j, J) pairs, ordered by j then J.
struct SectorChoice {
  HalfInt j;
  HalfInt J;
  bool operator==(const SectorChoice&) const = default;
};
std::vector<SectorChoice> sector_choices(int m_out, HalfInt l);

/// Product over input spins of the number of sector choices.
BigInt extremal_count(int n_in, int m_out);

/// Visits every extremal map as its per-sector choice indices into
/// sector_choices(m_out, l), in the same order as for_each_extremal.
void for_each_extremal_index(int n_in, int m_out,
                             const std::function<void(std::span<const std::size_t>)>& visit,
                             std::uint64_t cap = kDefaultEnumerationCap);

/// Visits every extremal map in lexicographic order (ascending l, then j,
/// then J), with the lowest input spin as the most significant digit.
/// Throws SearchSpaceTooLarge before visiting anything if the count exceeds cap.
void for_each_extremal(int n_in, int m_out, const std::function<void(const ExtremalMap&)>& visit,
                       std::uint64_t cap = kDefaultEnumerationCap);

std::vector<ExtremalMap> enumerate_extremal(int n_in, int m_out,
                                            std::uint64_t cap = kDefaultEnumerationCap);

struct CouplingTriple {
  HalfInt j;  // output spin
  HalfInt l;  // input spin
  HalfInt J;  // coupled spin
  auto operator<=>(const CouplingTriple&) const = default;
};

/// Coefficients s(j, l, J) of a covariant permutation-invariant channel.
/// Entries cover every valid triple, ordered by l, then j, then J.
class ChannelCoeffs {
public:
  struct Entry {
    CouplingTriple triple;
    double value = 0.0;
  };

  static ChannelCoeffs zero(int n_in, int m_out);

  int n_in() const { return n_in_; }
  int m_out() const { return m_out_; }

  /// Throws std::out_of_range for triples outside the channel's index set.
  double& at(HalfInt j, HalfInt l, HalfInt J);
  double at(HalfInt j, HalfInt l, HalfInt J) const;

  std::span<const Entry> entries() const { return entries_; }
  std::span<Entry> entries() { return entries_; }

private:
  std::size_t index_of(const CouplingTriple& t) const;

  int n_in_ = 0;
  int m_out_ = 0;
  std::vector<Entry> entries_;
};

/// s(j,l,J) = (2l+1) / ((2J+1) d_j) on the map's triples, zero elsewhere.
ChannelCoeffs coefficients_for(const ExtremalMap& map);

struct ExactCoefficient {
  CouplingTriple triple;
  Rational value;
};

/// Non-zero coefficients of an extremal map in exact arithmetic.
std::vector<ExactCoefficient> exact_coefficients(const ExtremalMap& map);

/// Per input spin, sum_j sum_J d_j s (2J+1)/(2l+1), exactly.
std::vector<Rational> exact_trace_sums(int n_in, int m_out,
                                       std::span<const ExactCoefficient> coeffs);

/// weight * a + (1 - weight) * b. Throws std::domain_error on mismatched
/// (N, M) or weight outside [0, 1].
ChannelCoeffs mix(const ChannelCoeffs& a, const ChannelCoeffs& b, double weight);

inline constexpr double kTraceTolerance = 1e-12;

struct TraceReport {
  struct Residual {
    HalfInt l;
    double residual = 0.0;
  };
  std::vector<Residual> residuals;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Residual |sum - 1| for each input spin, plus a violation for every
/// residual >= 1e-12 and every negative coefficient. Does not throw.
TraceReport validate_trace_preserving(const ChannelCoeffs& c);

}  // namespace superbroadcast
