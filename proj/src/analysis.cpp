#include "superbroadcast/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace superbroadcast {

namespace {

void check_purity(double r) {
  if (!(r >= 0.0 && r <= 1.0))
    throw std::domain_error("input purity r must lie in [0, 1], got " + std::to_string(r));
}

std::size_t spin_index(int n_qubits, HalfInt l) {
  return static_cast<std::size_t>((l.doubled() - n_qubits % 2) / 2);
}

// Route used when only one map is evaluated: CG sums while they stay cheap.
MomentRoute preferred_route(int n_in, int m_out) {
  long long cg_terms = 0;
  for (HalfInt l : spin_range(n_in)) cg_terms += static_cast<long long>(l.dimension()) * (m_out + 1);
  return cg_terms <= 20000 ? MomentRoute::clebsch_gordan : MomentRoute::projection;
}

// (2l+1)/(2J+1) * d_l, the extremal-map weight of one input sector.
Rational extremal_prefactor(int n_in, HalfInt l, HalfInt J) {
  return make_rational(BigInt(l.dimension()) * multiplicity(n_in, l), BigInt(J.dimension()));
}

}  // namespace

bool CouplingMoments::moment_is_zero() const {
  return std::all_of(moment.begin(), moment.end(), [](const Rational& q) { return sgn(q) == 0; });
}

CouplingMoments coupling_moments(int m_out, const CouplingTriple& t, MomentRoute route) {
  const auto [j, l, J] = t;
  CouplingMoments out{m_out, t, {}, {}};
  for (HalfInt n : projections(l)) {
    Rational mass(0), moment(0);
    if (route == MomentRoute::clebsch_gordan) {
      for (HalfInt m : projections(j)) {
        if ((m + n).abs() > J) continue;
        const Rational c2 = cg_square(j, m, l, n, J, m + n);
        mass += c2;
        moment += c2 * make_rational(BigInt(m.doubled()), BigInt(m_out));
      }
    } else {
      mass = make_rational(BigInt(J.dimension()), BigInt(l.dimension()));
      if (l.doubled() > 0) {
        const long x = J.doubled(), y = j.doubled(), z = l.doubled();
        const BigInt casimir_gap(x * (x + 2) - y * (y + 2) - z * (z + 2));
        moment = make_rational(BigInt(x + 1) * casimir_gap * n.doubled(),
                               BigInt(2 * z * (z + 2) * (z + 1)) * m_out);
      }
    }
    out.mass.push_back(mass);
    out.moment.push_back(moment);
  }
  return out;
}

double InputWeights::at(HalfInt l, HalfInt n) const {
  return w.at(spin_index(n_in, l)).at(static_cast<std::size_t>((n + l).doubled() / 2));
}

InputWeights input_weights(int n_in, double r) {
  check_purity(r);
  const double plus = 0.5 * (1.0 + r);
  const double minus = 0.5 * (1.0 - r);
  InputWeights out{n_in, r, {}};
  for (HalfInt l : spin_range(n_in)) {
    std::vector<double> row;
    row.reserve(l.dimension());
    // product form: no 0/0 at r = 1
    for (HalfInt n : projections(l))
      row.push_back(std::pow(plus, (n_in - n.doubled()) / 2) *
                    std::pow(minus, (n_in + n.doubled()) / 2));
    out.w.push_back(std::move(row));
  }
  return out;
}

BlochCurve::BlochCurve(int n_in)
    : n_in_(n_in), slope_(static_cast<std::size_t>(n_in) + 1, 0.0),
      trace_(static_cast<std::size_t>(n_in) + 1, 0.0) {}

BlochCurve BlochCurve::for_map(const ExtremalMap& map, MomentRoute route) {
  validate(map);
  BlochCurve curve(map.n_in);
  const auto spins = map.input_spins();
  for (std::size_t i = 0; i < spins.size(); ++i) {
    const CouplingTriple t{map.phi[i], spins[i], map.big_phi[i]};
    const auto moments = coupling_moments(map.m_out, t, route);
    const Rational pref = extremal_prefactor(map.n_in, t.l, t.J);
    const auto ns = projections(t.l);
    for (std::size_t k = 0; k < ns.size(); ++k) {
      curve.slope_[curve.slot(ns[k])] += to_double(Rational(pref * moments.moment[k]));
      curve.trace_[curve.slot(ns[k])] += to_double(Rational(pref * moments.mass[k]));
    }
  }
  return curve;
}

BlochCurve BlochCurve::for_channel(const ChannelCoeffs& c, MomentRoute route) {
  BlochCurve curve(c.n_in());
  for (const auto& e : c.entries()) {
    if (e.value == 0.0) continue;
    const auto& t = e.triple;
    const auto moments = coupling_moments(c.m_out(), t, route);
    const double factor =
        e.value * to_double(multiplicity(c.m_out(), t.j)) * to_double(multiplicity(c.n_in(), t.l));
    const auto ns = projections(t.l);
    for (std::size_t k = 0; k < ns.size(); ++k) {
      curve.slope_[curve.slot(ns[k])] += factor * to_double(moments.moment[k]);
      curve.trace_[curve.slot(ns[k])] += factor * to_double(moments.mass[k]);
    }
  }
  return curve;
}

BlochCurve BlochCurve::conjectured_limit(int n_in) {
  BlochCurve curve(n_in);
  for (HalfInt l : spin_range(n_in)) {
    const double d = to_double(multiplicity(n_in, l));
    // -(M+2)/M * d_l n/(l+1) at M -> infinity
    for (HalfInt n : projections(l)) {
      curve.slope_[curve.slot(n)] += -d * n.doubled() / (l.doubled() + 2);
      curve.trace_[curve.slot(n)] += d;
    }
  }
  return curve;
}

namespace {

double pair_with_weights(const std::vector<double>& table, int n_in, double r) {
  check_purity(r);
  const double plus = 0.5 * (1.0 + r);
  const double minus = 0.5 * (1.0 - r);
  double total = 0.0;
  for (int k = 0; k <= n_in; ++k) {
    if (table[static_cast<std::size_t>(k)] == 0.0) continue;
    // n = k - N/2: w = r+^(N - k) r-^k
    total += table[static_cast<std::size_t>(k)] * std::pow(plus, n_in - k) * std::pow(minus, k);
  }
  return total;
}

}  // namespace

double BlochCurve::r_prime(double r) const {
  // the maximally mixed input has no axis to follow
  if (r == 0.0) return 0.0;
  return pair_with_weights(slope_, n_in_, r);
}

double BlochCurve::trace(double r) const { return pair_with_weights(trace_, n_in_, r); }

double BlochCurve::p_at_zero() const {
  // d/dr w(l, n) at r = 0 is -2n / 2^N
  double total = 0.0;
  for (int k = 0; k <= n_in_; ++k) total += slope_[static_cast<std::size_t>(k)] * (n_in_ - 2 * k);
  return std::ldexp(total, -n_in_);
}

BlochReport BlochCurve::report(double r) const {
  check_purity(r);
  BlochReport out{r, r_prime(r), 0.0, false};
  if (r > 0.0) {
    out.p = out.r_prime / r;
  } else {
    out.p = p_at_zero();
    out.p_is_limit = true;
  }
  return out;
}

BlochReport single_copy_bloch(const ExtremalMap& map, double r, MomentRoute route) {
  check_purity(r);
  return BlochCurve::for_map(map, route).report(r);
}

BlochReport single_copy_convex(const ChannelCoeffs& c, double r, MomentRoute route) {
  check_purity(r);
  return BlochCurve::for_channel(c, route).report(r);
}

double single_copy_trace(const ExtremalMap& map, double r, MomentRoute route) {
  check_purity(r);
  return BlochCurve::for_map(map, route).trace(r);
}

ExhaustiveSearch::ExhaustiveSearch(int n_in, int m_out, std::uint64_t cap)
    : n_in_(n_in), m_out_(m_out), count_(0), cap_(cap), spins_(spin_range(n_in)) {
  const BigInt count = extremal_count(n_in, m_out);
  if (count > BigInt(std::to_string(cap))) throw SearchSpaceTooLarge(n_in, m_out, count, cap);
  count_ = count.get_ui();

  const ExtremalMap conjecture = conjectured_optimal_map(n_in, m_out);
  for (std::size_t i = 0; i < spins_.size(); ++i) {
    const HalfInt l = spins_[i];
    choices_.push_back(sector_choices(m_out, l));
    std::vector<std::vector<double>> sector;
    bool degenerate = true;
    for (const auto& choice : choices_.back()) {
      const auto moments = coupling_moments(m_out, {choice.j, l, choice.J});
      degenerate = degenerate && moments.moment_is_zero();
      const Rational pref = extremal_prefactor(n_in, l, choice.J);
      std::vector<double> slope;
      for (const auto& q : moments.moment) slope.push_back(to_double(Rational(pref * q)));
      sector.push_back(std::move(slope));
    }
    slope_.push_back(std::move(sector));
    degenerate_.push_back(degenerate);
    const SectorChoice target{conjecture.phi[i], conjecture.big_phi[i]};
    conjecture_.push_back(static_cast<std::size_t>(
        std::find(choices_[i].begin(), choices_[i].end(), target) - choices_[i].begin()));
  }
}

std::vector<std::vector<double>> ExhaustiveSearch::sector_values(double r) const {
  const InputWeights w = input_weights(n_in_, r);
  std::vector<std::vector<double>> values;
  for (std::size_t i = 0; i < slope_.size(); ++i) {
    std::vector<double> row;
    for (const auto& slope : slope_[i]) {
      double v = 0.0;
      for (std::size_t k = 0; k < slope.size(); ++k) v += slope[k] * w.w[i][k];
      row.push_back(v);
    }
    values.push_back(std::move(row));
  }
  return values;
}

namespace {

ExhaustiveSearch::Best argmax(int n_in, int m_out, std::uint64_t cap,
                              const std::vector<std::vector<double>>& values) {
  ExhaustiveSearch::Best best;
  bool first = true;
  for_each_extremal_index(
      n_in, m_out,
      [&](std::span<const std::size_t> digit) {
        double total = 0.0;
        for (std::size_t i = 0; i < digit.size(); ++i) total += values[i][digit[i]];
        // strict improvement only: earliest map wins ties
        if (first || total > best.r_prime + 1e-14) {
          best.r_prime = total;
          best.choice.assign(digit.begin(), digit.end());
          first = false;
        }
      },
      cap);
  return best;
}

}  // namespace

ExhaustiveSearch::Best ExhaustiveSearch::best(double r) const {
  check_purity(r);
  return argmax(n_in_, m_out_, cap_, sector_values(r));
}

double ExhaustiveSearch::best_p_at_zero() const {
  std::vector<std::vector<double>> values;
  for (std::size_t i = 0; i < slope_.size(); ++i) {
    const auto ns = projections(spins_[i]);
    std::vector<double> row;
    for (const auto& slope : slope_[i]) {
      double v = 0.0;
      for (std::size_t k = 0; k < slope.size(); ++k) v += slope[k] * -ns[k].doubled();
      row.push_back(std::ldexp(v, -n_in_));
    }
    values.push_back(std::move(row));
  }
  return argmax(n_in_, m_out_, cap_, values).r_prime;
}

ExtremalMap ExhaustiveSearch::map_for(const std::vector<std::size_t>& choice) const {
  ExtremalMap map{n_in_, m_out_, {}, {}};
  for (std::size_t i = 0; i < choice.size(); ++i) {
    map.phi.push_back(choices_.at(i).at(choice[i]).j);
    map.big_phi.push_back(choices_.at(i).at(choice[i]).J);
  }
  return map;
}

OptimalResult optimal_map(int n_in, int m_out, double r, const OptimalOptions& options) {
  if (!(r > 0.0 && r <= 1.0))
    throw std::domain_error("optimal_map needs 0 < r <= 1, got " + std::to_string(r));
  OptimalResult out;
  out.conjecture = conjectured_optimal_map(n_in, m_out);

  std::optional<ExhaustiveSearch> search;
  try {
    search.emplace(n_in, m_out, options.cap);
  } catch (const SearchSpaceTooLarge& e) {
    const auto route = preferred_route(n_in, m_out);
    out.map = out.conjecture;
    out.report = single_copy_bloch(out.conjecture, r, route);
    out.conjecture_report = out.report;
    out.exhaustive = false;
    out.maps_evaluated = 1;
    out.note = std::string(e.what()) + "; evaluated the conjectured map only";
    return out;
  }

  const auto best = search->best(r);
  out.map = search->map_for(best.choice);
  out.report = {r, best.r_prime, best.r_prime / r, false};
  out.maps_evaluated = search->count();
  out.conjecture_report = single_copy_bloch(out.conjecture, r);

  const auto values = search->sector_values(r);
  bool agree = true;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double top = *std::max_element(values[i].begin(), values[i].end());
    const std::size_t c = search->conjecture_choice(i);
    if (values[i][c] < top - 1e-14 * std::max(1.0, std::abs(top))) agree = false;
    if (!search->sector_degenerate(i) && best.choice[i] != c) agree = false;
  }
  out.matches_conjecture = agree;
  return out;
}

OptimalScaling OptimalScaling::build(int n_in, int m_out, std::uint64_t exhaustive_limit) {
  OptimalScaling s;
  if (extremal_count(n_in, m_out) <= BigInt(std::to_string(exhaustive_limit)))
    s.search_.emplace(n_in, m_out, exhaustive_limit);
  else
    s.curve_ = BlochCurve::for_map(conjectured_optimal_map(n_in, m_out), MomentRoute::projection);
  return s;
}

OptimalScaling OptimalScaling::limit(int n_in) {
  OptimalScaling s;
  s.curve_ = BlochCurve::conjectured_limit(n_in);
  return s;
}

double OptimalScaling::r_prime(double r) const {
  if (r == 0.0) return 0.0;
  return search_ ? search_->best(r).r_prime : curve_->r_prime(r);
}

double OptimalScaling::p(double r) const {
  check_purity(r);
  if (r > 0.0) return r_prime(r) / r;
  return search_ ? search_->best_p_at_zero() : curve_->p_at_zero();
}

ExtremalMap anti_aligned_map(int n_in, int m_out) {
  ExtremalMap map{n_in, m_out, {}, {}};
  const HalfInt top = HalfInt::from_doubled(m_out);
  for (HalfInt l : spin_range(n_in)) {
    map.phi.push_back(top);
    map.big_phi.push_back(l + top);
  }
  return map;
}

std::optional<ChannelCoeffs> perfect_broadcast_channel(int n_in, int m_out, double r,
                                                       const OptimalOptions& options) {
  if (!(r > 0.0 && r < 1.0))
    throw std::domain_error("perfect broadcasting needs 0 < r < 1, got " + std::to_string(r));
  const OptimalResult best = optimal_map(n_in, m_out, r, options);
  if (best.report.p < 1.0) return std::nullopt;

  const ExtremalMap partner = anti_aligned_map(n_in, m_out);
  const double partner_r = single_copy_bloch(partner, r, preferred_route(n_in, m_out)).r_prime;
  // r' is linear in the channel: solve t r'_opt + (1 - t) r'_partner = r
  const double weight = std::clamp((r - partner_r) / (best.report.r_prime - partner_r), 0.0, 1.0);
  return mix(coefficients_for(best.map), coefficients_for(partner), weight);
}

}  // namespace superbroadcast
