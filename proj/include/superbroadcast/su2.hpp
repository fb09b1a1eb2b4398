#pragma once

#include <gmpxx.h>

#include <vector>

#include "superbroadcast/half_int.hpp"

namespace superbroadcast {

using BigInt = mpz_class;
using Rational = mpq_class;  // always canonical: reduced, positive denominator

/// num/den reduced to canonical form.
inline Rational make_rational(const BigInt& num, const BigInt& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(const BigInt& z) { return z.get_d(); }

/// Fractional part of L/2: 0 for even L, 1/2 for odd L.
constexpr HalfInt lowest_spin(int n_qubits) { return HalfInt::from_doubled(n_qubits % 2); }

/// Spins carried by L qubits, ascending: <<L/2>>, <<L/2>>+1, ..., L/2.
/// Throws std::domain_error for L < 1.
std::vector<HalfInt> spin_range(int n_qubits);

/// |j-l|, |j-l|+1, ..., j+l.
std::vector<HalfInt> coupled_range(HalfInt j, HalfInt l);

/// Projections -j, -j+1, ..., j.
std::vector<HalfInt> projections(HalfInt j);

/// Multiplicity d_j of spin j inside L qubits,
/// d_j = (2j+1)/(L/2+j+1) * binom(L, L/2+j).
/// Throws std::domain_error unless j is in spin_range(L).
BigInt multiplicity(int n_qubits, HalfInt j);

/// n! from a shared memo table. Safe to call concurrently.
const BigInt& factorial(int n);

/// Exact <J M | j1 m1, j2 m2>^2.
///
/// Zero when m1 + m2 != M or J is outside coupled_range(j1, j2). Throws
/// std::domain_error on negative magnitudes, |m| > j, or a projection or
/// triangle parity that no coupling can produce.
Rational cg_square(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);

/// Signed <J M | j1 m1, j2 m2> in the Condon-Shortley convention.
double cg(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);

}  // namespace superbroadcast
