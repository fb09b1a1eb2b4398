#include "superbroadcast/su2.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>

namespace superbroadcast {

namespace {

class FactorialTable {
public:
  const BigInt& get(int n) {
    if (n < 0) throw std::domain_error("factorial of negative integer " + std::to_string(n));
    {
      std::shared_lock lock(mutex_);
      if (static_cast<std::size_t>(n) < table_.size()) return table_[n];
    }
    std::unique_lock lock(mutex_);
    // deque keeps references stable while growing
    while (static_cast<std::size_t>(n) >= table_.size()) {
      const auto k = table_.size();
      table_.push_back(table_.back() * static_cast<unsigned long>(k));
    }
    return table_[n];
  }

private:
  std::shared_mutex mutex_;
  std::deque<BigInt> table_{BigInt(1)};
};

FactorialTable& factorials() {
  static FactorialTable table;
  return table;
}

void check_magnitude(HalfInt j, const char* name) {
  if (j.doubled() < 0)
    throw std::domain_error(std::string("negative spin magnitude ") + name + " = " + j.str());
}

void check_projection(HalfInt j, HalfInt m, const char* name) {
  if (m.abs() > j || !same_parity(j, m))
    throw std::domain_error(std::string("invalid projection ") + name + " = " + m.str() +
                            " for spin " + j.str());
}

// <J M | j1 m1, j2 m2> = sqrt(prefactor) * alternating_sum
struct RacahParts {
  Rational prefactor;
  Rational alternating_sum;
};

// Arguments are valid and the coefficient is not trivially zero.
RacahParts racah(int j1, int m1, int j2, int m2, int J, int M) {
  // all in doubled units; every combination below is even
  const int a = (j1 + j2 - J) / 2;
  const int b = (j1 - j2 + J) / 2;
  const int c = (-j1 + j2 + J) / 2;
  const int total = (j1 + j2 + J) / 2 + 1;

  Rational pre = make_rational(BigInt(J + 1) * factorial(a) * factorial(b) * factorial(c),
                               factorial(total));
  pre *= Rational(factorial((J + M) / 2) * factorial((J - M) / 2) * factorial((j1 - m1) / 2) *
                  factorial((j1 + m1) / 2) * factorial((j2 - m2) / 2) * factorial((j2 + m2) / 2));

  const int j1_minus = (j1 - m1) / 2;
  const int j2_plus = (j2 + m2) / 2;
  const int shift1 = (J - j2 + m1) / 2;
  const int shift2 = (J - j1 - m2) / 2;
  const int k_min = std::max({0, -shift1, -shift2});
  const int k_max = std::min({a, j1_minus, j2_plus});

  Rational sum(0);
  for (int k = k_min; k <= k_max; ++k) {
    BigInt denom = factorial(k) * factorial(a - k) * factorial(j1_minus - k) *
                   factorial(j2_plus - k) * factorial(shift1 + k) * factorial(shift2 + k);
    sum += make_rational(k % 2 == 0 ? BigInt(1) : BigInt(-1), denom);
  }
  return {pre, sum};
}

// Shared validation; returns false when the coefficient vanishes by selection rules.
bool validate_cg(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
  check_magnitude(j1, "j1");
  check_magnitude(j2, "j2");
  check_magnitude(J, "J");
  check_projection(j1, m1, "m1");
  check_projection(j2, m2, "m2");
  check_projection(J, M, "M");
  if (!same_parity(j1 + j2, J))
    throw std::domain_error("spin " + J.str() + " cannot couple from " + j1.str() + " and " +
                            j2.str());
  if (m1 + m2 != M) return false;
  return J >= (j1 - j2).abs() && J <= j1 + j2;
}

}  // namespace

const BigInt& factorial(int n) { return factorials().get(n); }

std::vector<HalfInt> spin_range(int n_qubits) {
  if (n_qubits < 1)
    throw std::domain_error("spin_range needs at least one qubit, got " + std::to_string(n_qubits));
  std::vector<HalfInt> out;
  for (int d = n_qubits % 2; d <= n_qubits; d += 2) out.push_back(HalfInt::from_doubled(d));
  return out;
}

std::vector<HalfInt> coupled_range(HalfInt j, HalfInt l) {
  std::vector<HalfInt> out;
  for (HalfInt J = (j - l).abs(); J <= j + l; J += HalfInt::from_int(1)) out.push_back(J);
  return out;
}

std::vector<HalfInt> projections(HalfInt j) {
  std::vector<HalfInt> out;
  out.reserve(j.dimension());
  for (HalfInt m = -j; m <= j; m += HalfInt::from_int(1)) out.push_back(m);
  return out;
}

BigInt multiplicity(int n_qubits, HalfInt j) {
  if (n_qubits < 1)
    throw std::domain_error("multiplicity needs at least one qubit, got " +
                            std::to_string(n_qubits));
  if (j.doubled() < n_qubits % 2 || j.doubled() > n_qubits || !same_parity(j, lowest_spin(n_qubits)))
    throw std::domain_error("spin " + j.str() + " does not occur in " + std::to_string(n_qubits) +
                            " qubits");
  const unsigned long upper = static_cast<unsigned long>((n_qubits + j.doubled()) / 2);
  BigInt binom;
  mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(n_qubits), upper);
  BigInt d = binom * static_cast<unsigned long>(j.dimension());
  // exact: (2j+1) C(L, k) is divisible by k+1
  mpz_divexact_ui(d.get_mpz_t(), d.get_mpz_t(), upper + 1);
  return d;
}

Rational cg_square(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
  if (!validate_cg(j1, m1, j2, m2, J, M)) return Rational(0);
  auto [pre, sum] =
      racah(j1.doubled(), m1.doubled(), j2.doubled(), m2.doubled(), J.doubled(), M.doubled());
  return pre * sum * sum;
}

double cg(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
  if (!validate_cg(j1, m1, j2, m2, J, M)) return 0.0;
  auto [pre, sum] =
      racah(j1.doubled(), m1.doubled(), j2.doubled(), m2.doubled(), J.doubled(), M.doubled());
  const double magnitude = std::sqrt(to_double(Rational(pre * sum * sum)));
  return sgn(sum) < 0 ? -magnitude : magnitude;
}

}  // namespace superbroadcast
