#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <thread>

#include "oracles.hpp"
#include "superbroadcast/su2.hpp"

using namespace superbroadcast;
using namespace superbroadcast::literals;

TEST_CASE("half-integers keep doubled values") {
  CHECK(HalfInt::from_doubled(3).value() == doctest::Approx(1.5));
  CHECK((3_h2).str() == "3/2");
  CHECK((4_h2).str() == "2");
  CHECK((3_h2 + 1_h2) == 4_h2);
  CHECK((1_h2 - 3_h2).doubled() == -2);
  CHECK((-(3_h2)).abs() == 3_h2);
  CHECK((3_h2).dimension() == 4);
  CHECK(0_h2 < 1_h2);
  CHECK(HalfInt::from_int(2).is_integer());
}

TEST_CASE("spin_range lists spins by parity of L") {
  CHECK(spin_range(1) == std::vector<HalfInt>{1_h2});
  CHECK(spin_range(2) == std::vector<HalfInt>{0_h2, 2_h2});
  CHECK(spin_range(5) == std::vector<HalfInt>{1_h2, 3_h2, 5_h2});
  CHECK_THROWS_AS(spin_range(0), std::domain_error);
}

TEST_CASE("coupled_range") {
  CHECK(coupled_range(1_h2, 1_h2) == std::vector<HalfInt>{0_h2, 2_h2});
  CHECK(coupled_range(4_h2, 2_h2) == std::vector<HalfInt>{2_h2, 4_h2, 6_h2});
  CHECK(coupled_range(5_h2, 0_h2) == std::vector<HalfInt>{5_h2});
}

TEST_CASE("multiplicity examples") {
  CHECK(multiplicity(1, 1_h2) == 1);
  CHECK(multiplicity(4, 2_h2) == 3);
  CHECK(multiplicity(4, 0_h2) == 2);
  CHECK_THROWS_AS(multiplicity(4, 1_h2), std::domain_error);
  CHECK_THROWS_AS(multiplicity(4, 6_h2), std::domain_error);
  CHECK_THROWS_AS(multiplicity(3, 5_h2), std::domain_error);
}

TEST_CASE("multiplicities match path counts and fill 2^L") {
  for (int L = 1; L <= 12; ++L) {
    BigInt total = 0;
    for (HalfInt j : spin_range(L)) {
      const BigInt d = multiplicity(L, j);
      CHECK(d == BigInt(std::to_string(oracle_ref::path_count(L, j.doubled()))));
      total += j.dimension() * d;
    }
    CHECK(total == BigInt(1) << L);
  }
  // d_0 at L = 200 is the Catalan number C_100
  CHECK(multiplicity(200, 0_h2) == BigInt("896519947090131496687170070074100632420837521538745909320"));
}

TEST_CASE("cg examples") {
  CHECK(cg(1_h2, 1_h2, 1_h2, 1_h2, 2_h2, 2_h2) == doctest::Approx(1.0));
  CHECK(cg_square(1_h2, 1_h2, 1_h2, -(1_h2), 0_h2, 0_h2) == Rational(1, 2));
  CHECK(cg(1_h2, 1_h2, 1_h2, 1_h2, 2_h2, 0_h2) == 0.0);
  CHECK(cg(1_h2, 1_h2, 1_h2, -(1_h2), 0_h2, 0_h2) > 0.0);
  CHECK(cg(1_h2, -(1_h2), 1_h2, 1_h2, 0_h2, 0_h2) < 0.0);
  // J outside the coupled range
  CHECK(cg_square(1_h2, 1_h2, 1_h2, -(1_h2), 4_h2, 0_h2) == 0);
}

TEST_CASE("cg rejects impossible labels") {
  CHECK_THROWS_AS(cg_square(1_h2, 3_h2, 1_h2, 1_h2, 2_h2, 4_h2), std::domain_error);   // |m| > j
  CHECK_THROWS_AS(cg_square(2_h2, 1_h2, 1_h2, 1_h2, 1_h2, 2_h2), std::domain_error);   // m parity
  CHECK_THROWS_AS(cg_square(1_h2, 1_h2, 1_h2, 1_h2, 1_h2, 1_h2), std::domain_error);   // J parity
  CHECK_THROWS_AS(cg_square(-(1_h2), 1_h2, 1_h2, 1_h2, 0_h2, 2_h2), std::domain_error);
}

TEST_CASE("cg agrees with the lowering-operator construction") {
  double worst = 0.0;
  for (int j1 = 0; j1 <= 6; ++j1)
    for (int j2 = 0; j2 <= 6; ++j2) {
      const oracle_ref::LoweringTable ref(j1, j2);
      const HalfInt a = HalfInt::from_doubled(j1), b = HalfInt::from_doubled(j2);
      for (HalfInt J : coupled_range(a, b))
        for (HalfInt m1 : projections(a))
          for (HalfInt m2 : projections(b)) {
            const HalfInt M = m1 + m2;
            if (M.abs() > J) continue;
            const double got = cg(a, m1, b, m2, J, M);
            const double want = ref(m1.doubled(), m2.doubled(), J.doubled(), M.doubled());
            worst = std::max(worst, std::abs(got - want));
            CHECK(std::abs(to_double(cg_square(a, m1, b, m2, J, M)) - want * want) < 1e-12);
          }
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("cg completeness is exact") {
  for (int j1 = 0; j1 <= 8; ++j1)
    for (int j2 = 0; j2 <= 8; ++j2) {
      const HalfInt a = HalfInt::from_doubled(j1), b = HalfInt::from_doubled(j2);
      for (HalfInt m1 : projections(a))
        for (HalfInt m2 : projections(b)) {
          Rational sum = 0;
          for (HalfInt J : coupled_range(a, b))
            if ((m1 + m2).abs() <= J) sum += cg_square(a, m1, b, m2, J, m1 + m2);
          CHECK(sum == 1);
        }
    }
}

TEST_CASE("cg orthogonality") {
  double worst = 0.0;
  for (int j1 = 0; j1 <= 7; ++j1)
    for (int j2 = 0; j2 <= 7; ++j2) {
      const HalfInt a = HalfInt::from_doubled(j1), b = HalfInt::from_doubled(j2);
      const auto Js = coupled_range(a, b);
      for (HalfInt J : Js)
        for (HalfInt Jp : Js)
          for (HalfInt M : projections(std::min(J, Jp))) {
            double dot = 0.0;
            for (HalfInt m1 : projections(a)) {
              const HalfInt m2 = M - m1;
              if (m2.abs() > b) continue;
              dot += cg(a, m1, b, m2, J, M) * cg(a, m1, b, m2, Jp, M);
            }
            worst = std::max(worst, std::abs(dot - (J == Jp ? 1.0 : 0.0)));
          }
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("projector trace identity holds exactly for j, l <= 4") {
  for (int jd = 0; jd <= 8; ++jd)
    for (int ld = 0; ld <= 8; ++ld) {
      const HalfInt j = HalfInt::from_doubled(jd), l = HalfInt::from_doubled(ld);
      for (HalfInt J : coupled_range(j, l)) {
        const Rational expect = make_rational(J.dimension(), l.dimension());
        for (HalfInt n : projections(l)) {
          Rational sum = 0;
          for (HalfInt m : projections(j))
            if ((m + n).abs() <= J) sum += cg_square(j, m, l, n, J, m + n);
          CHECK(sum == expect);
        }
      }
    }
}

TEST_CASE("factorials are shared safely across threads") {
  std::vector<std::thread> pool;
  std::vector<BigInt> got(8);
  for (int t = 0; t < 8; ++t)
    pool.emplace_back([&, t] {
      for (int k = 0; k <= 120; ++k) factorial(k + t);
      got[t] = factorial(100 + t);
    });
  for (auto& th : pool) th.join();
  BigInt expect = 1;
  for (int k = 2; k <= 100; ++k) expect *= k;
  CHECK(got[0] == expect);
  CHECK(got[3] == expect * 101 * 102 * 103);
}
