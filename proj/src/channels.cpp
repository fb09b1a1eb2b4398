#include "superbroadcast/channels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace superbroadcast {

SearchSpaceTooLarge::SearchSpaceTooLarge(int n_in, int m_out, const BigInt& count,
                                         std::uint64_t cap)
    : std::runtime_error("search space too large: " + count.get_str() + " extremal maps for N=" +
                         std::to_string(n_in) + ", M=" + std::to_string(m_out) + " (cap " +
                         std::to_string(cap) + ")"),
      count_(count.get_str()) {}

std::string ExtremalMap::str() const {
  std::ostringstream os;
  os << "N=" << n_in << " M=" << m_out << " {";
  const auto spins = input_spins();
  for (std::size_t i = 0; i < spins.size(); ++i) {
    if (i) os << ", ";
    os << "l=" << spins[i] << ": (j=" << phi.at(i) << ", J=" << big_phi.at(i) << ")";
  }
  os << "}";
  return os.str();
}

void validate(const ExtremalMap& map) {
  if (map.n_in < 1 || map.m_out < 1)
    throw std::domain_error("extremal map needs N >= 1 and M >= 1");
  const auto spins = map.input_spins();
  if (map.phi.size() != spins.size() || map.big_phi.size() != spins.size())
    throw std::domain_error("extremal map must assign (j, J) to each of the " +
                            std::to_string(spins.size()) + " input spins");
  const auto outputs = spin_range(map.m_out);
  for (std::size_t i = 0; i < spins.size(); ++i) {
    const HalfInt j = map.phi[i];
    const HalfInt J = map.big_phi[i];
    if (std::find(outputs.begin(), outputs.end(), j) == outputs.end())
      throw std::domain_error("phi(" + spins[i].str() + ") = " + j.str() +
                              " is not an output spin of " + std::to_string(map.m_out) +
                              " qubits");
    const auto coupled = coupled_range(j, spins[i]);
    if (std::find(coupled.begin(), coupled.end(), J) == coupled.end())
      throw std::domain_error("Phi(" + spins[i].str() + ") = " + J.str() +
                              " does not couple from " + j.str() + " and " + spins[i].str());
  }
}

ExtremalMap conjectured_optimal_map(int n_in, int m_out) {
  ExtremalMap map{n_in, m_out, {}, {}};
  const HalfInt top = HalfInt::from_doubled(m_out);
  for (HalfInt l : spin_range(n_in)) {
    map.phi.push_back(top);
    map.big_phi.push_back((l - top).abs());
  }
  return map;
}

std::vector<SectorChoice> sector_choices(int m_out, HalfInt l) {
  std::vector<SectorChoice> out;
  for (HalfInt j : spin_range(m_out))
    for (HalfInt J : coupled_range(j, l)) out.push_back({j, J});
  return out;
}

BigInt extremal_count(int n_in, int m_out) {
  BigInt count(1);
  for (HalfInt l : spin_range(n_in))
    count *= static_cast<unsigned long>(sector_choices(m_out, l).size());
  return count;
}

void for_each_extremal_index(int n_in, int m_out,
                             const std::function<void(std::span<const std::size_t>)>& visit,
                             std::uint64_t cap) {
  const BigInt count = extremal_count(n_in, m_out);
  if (count > BigInt(std::to_string(cap))) throw SearchSpaceTooLarge(n_in, m_out, count, cap);

  std::vector<std::size_t> radix;
  for (HalfInt l : spin_range(n_in)) radix.push_back(sector_choices(m_out, l).size());

  std::vector<std::size_t> digit(radix.size(), 0);
  for (;;) {
    visit(digit);
    // odometer, highest input spin fastest
    std::size_t pos = radix.size();
    while (pos > 0) {
      --pos;
      if (++digit[pos] < radix[pos]) break;
      digit[pos] = 0;
      if (pos == 0) return;
    }
  }
}

void for_each_extremal(int n_in, int m_out, const std::function<void(const ExtremalMap&)>& visit,
                       std::uint64_t cap) {
  const auto spins = spin_range(n_in);
  std::vector<std::vector<SectorChoice>> choices;
  for (HalfInt l : spins) choices.push_back(sector_choices(m_out, l));

  ExtremalMap map{n_in, m_out, std::vector<HalfInt>(spins.size()),
                  std::vector<HalfInt>(spins.size())};
  for_each_extremal_index(
      n_in, m_out,
      [&](std::span<const std::size_t> digit) {
        for (std::size_t i = 0; i < spins.size(); ++i) {
          map.phi[i] = choices[i][digit[i]].j;
          map.big_phi[i] = choices[i][digit[i]].J;
        }
        visit(map);
      },
      cap);
}

std::vector<ExtremalMap> enumerate_extremal(int n_in, int m_out, std::uint64_t cap) {
  std::vector<ExtremalMap> maps;
  for_each_extremal(n_in, m_out, [&](const ExtremalMap& m) { maps.push_back(m); }, cap);
  return maps;
}

ChannelCoeffs ChannelCoeffs::zero(int n_in, int m_out) {
  ChannelCoeffs c;
  c.n_in_ = n_in;
  c.m_out_ = m_out;
  for (HalfInt l : spin_range(n_in))
    for (const auto& choice : sector_choices(m_out, l))
      c.entries_.push_back({{choice.j, l, choice.J}, 0.0});
  return c;
}

std::size_t ChannelCoeffs::index_of(const CouplingTriple& t) const {
  // entries_ is sorted by (l, j, J)
  const auto key = [](const CouplingTriple& x) { return std::tuple(x.l, x.j, x.J); };
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key(t),
                             [&](const Entry& e, const auto& k) { return key(e.triple) < k; });
  if (it == entries_.end() || it->triple != t)
    throw std::out_of_range("no coefficient (j=" + t.j.str() + ", l=" + t.l.str() +
                            ", J=" + t.J.str() + ") for N=" + std::to_string(n_in_) +
                            ", M=" + std::to_string(m_out_));
  return static_cast<std::size_t>(it - entries_.begin());
}

double& ChannelCoeffs::at(HalfInt j, HalfInt l, HalfInt J) {
  return entries_[index_of({j, l, J})].value;
}

double ChannelCoeffs::at(HalfInt j, HalfInt l, HalfInt J) const {
  return entries_[index_of({j, l, J})].value;
}

std::vector<ExactCoefficient> exact_coefficients(const ExtremalMap& map) {
  validate(map);
  std::vector<ExactCoefficient> out;
  const auto spins = map.input_spins();
  for (std::size_t i = 0; i < spins.size(); ++i) {
    const HalfInt l = spins[i], j = map.phi[i], J = map.big_phi[i];
    out.push_back({{j, l, J}, make_rational(BigInt(l.dimension()),
                                            BigInt(J.dimension()) * multiplicity(map.m_out, j))});
  }
  return out;
}

std::vector<Rational> exact_trace_sums(int n_in, int m_out,
                                       std::span<const ExactCoefficient> coeffs) {
  const auto spins = spin_range(n_in);
  std::vector<Rational> sums(spins.size(), Rational(0));
  for (const auto& c : coeffs) {
    const auto it = std::find(spins.begin(), spins.end(), c.triple.l);
    if (it == spins.end())
      throw std::domain_error("input spin " + c.triple.l.str() + " not in spin_range(" +
                              std::to_string(n_in) + ")");
    Rational term = c.value * Rational(multiplicity(m_out, c.triple.j)) *
                    make_rational(BigInt(c.triple.J.dimension()), BigInt(c.triple.l.dimension()));
    sums[static_cast<std::size_t>(it - spins.begin())] += term;
  }
  return sums;
}

ChannelCoeffs coefficients_for(const ExtremalMap& map) {
  ChannelCoeffs c = ChannelCoeffs::zero(map.n_in, map.m_out);
  for (const auto& e : exact_coefficients(map))
    c.at(e.triple.j, e.triple.l, e.triple.J) = to_double(e.value);
  return c;
}

ChannelCoeffs mix(const ChannelCoeffs& a, const ChannelCoeffs& b, double weight) {
  if (a.n_in() != b.n_in() || a.m_out() != b.m_out())
    throw std::domain_error("cannot mix channels with different (N, M)");
  if (!(weight >= 0.0 && weight <= 1.0))
    throw std::domain_error("mixing weight must lie in [0, 1]");
  ChannelCoeffs out = a;
  auto dst = out.entries();
  auto src = b.entries();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    // exact at the endpoints
    if (weight == 1.0) continue;
    if (weight == 0.0) {
      dst[i].value = src[i].value;
      continue;
    }
    dst[i].value = weight * dst[i].value + (1.0 - weight) * src[i].value;
  }
  return out;
}

TraceReport validate_trace_preserving(const ChannelCoeffs& c) {
  TraceReport report;
  const auto spins = spin_range(c.n_in());
  std::vector<double> sums(spins.size(), 0.0);
  for (const auto& e : c.entries()) {
    const auto& t = e.triple;
    if (e.value < 0.0)
      report.violations.push_back("negative coefficient s(" + t.j.str() + "," + t.l.str() + "," +
                                  t.J.str() + ")");
    const auto i = static_cast<std::size_t>(
        std::find(spins.begin(), spins.end(), t.l) - spins.begin());
    sums[i] += to_double(multiplicity(c.m_out(), t.j)) * e.value * t.J.dimension() /
               t.l.dimension();
  }
  for (std::size_t i = 0; i < spins.size(); ++i) {
    const double residual = std::abs(sums[i] - 1.0);
    report.residuals.push_back({spins[i], residual});
    if (!(residual < kTraceTolerance)) {
      std::ostringstream os;
      os << "trace-preservation residual " << residual << " at l=" << spins[i];
      report.violations.push_back(os.str());
    }
  }
  return report;
}

}  // namespace superbroadcast
