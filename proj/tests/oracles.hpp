#pragma once

// Reference computations used only by the tests. None of them call the
// library's Clebsch-Gordan or multiplicity routines.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "superbroadcast/channels.hpp"

namespace oracle_ref {

using superbroadcast::HalfInt;

/// d_j counted as coupling paths: d(L+1, j) = d(L, j-1/2) + d(L, j+1/2).
inline std::uint64_t path_count(int n_qubits, int doubled_j) {
  std::vector<std::uint64_t> d(static_cast<std::size_t>(n_qubits) + 2, 0);
  d[1] = 1;  // one qubit: spin 1/2
  for (int L = 2; L <= n_qubits; ++L) {
    std::vector<std::uint64_t> next(d.size(), 0);
    for (int jd = 0; jd <= L; ++jd) {
      if ((jd + L) % 2) continue;
      std::uint64_t v = 0;
      if (jd >= 1) v += d[static_cast<std::size_t>(jd - 1)];
      if (jd + 1 <= L - 1) v += d[static_cast<std::size_t>(jd + 1)];
      next[static_cast<std::size_t>(jd)] = v;
    }
    d = next;
  }
  if (doubled_j < 0 || doubled_j > n_qubits) return 0;
  return d[static_cast<std::size_t>(doubled_j)];
}

/// Clebsch-Gordan table for fixed (j1, j2) from J^2 and the lowering operator.
/// Key (m1, m2, J, M) in doubled units. Condon-Shortley: <j1 j1, j2 J-j1 | J J> > 0.
class LoweringTable {
public:
  LoweringTable(int j1d, int j2d) : j1d_(j1d), j2d_(j2d) {
    const int n1 = j1d + 1, n2 = j2d + 1;
    const int dim = n1 * n2;
    auto index = [&](int m1d, int m2d) { return ((m1d + j1d) / 2) * n2 + (m2d + j2d) / 2; };
    // J- on one spin: J-|j m> = sqrt((j+m)(j-m+1)) |j m-1>
    auto lower = [](int jd, int md) { return 0.5 * std::sqrt(double(jd + md) * double(jd - md + 2)); };
    auto raise = [](int jd, int md) { return 0.5 * std::sqrt(double(jd - md) * double(jd + md + 2)); };

    Eigen::MatrixXd jminus = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd jplus = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd jz = Eigen::MatrixXd::Zero(dim, dim);
    for (int m1 = -j1d; m1 <= j1d; m1 += 2)
      for (int m2 = -j2d; m2 <= j2d; m2 += 2) {
        const int i = index(m1, m2);
        jz(i, i) = 0.5 * (m1 + m2);
        if (m1 > -j1d) jminus(index(m1 - 2, m2), i) += lower(j1d, m1);
        if (m2 > -j2d) jminus(index(m1, m2 - 2), i) += lower(j2d, m2);
        if (m1 < j1d) jplus(index(m1 + 2, m2), i) += raise(j1d, m1);
        if (m2 < j2d) jplus(index(m1, m2 + 2), i) += raise(j2d, m2);
      }
    const Eigen::MatrixXd j2 = jminus * jplus + jz * jz + jz;

    for (int Jd = std::abs(j1d - j2d); Jd <= j1d + j2d; Jd += 2) {
      // highest weight: J^2 eigenvector with eigenvalue J(J+1) inside M = J
      std::vector<int> slots;
      for (int m1 = -j1d; m1 <= j1d; m1 += 2) {
        const int m2 = Jd - m1;
        if (std::abs(m2) <= j2d && (m2 + j2d) % 2 == 0) slots.push_back(index(m1, m2));
      }
      Eigen::MatrixXd sub(slots.size(), slots.size());
      for (std::size_t a = 0; a < slots.size(); ++a)
        for (std::size_t b = 0; b < slots.size(); ++b) sub(a, b) = j2(slots[a], slots[b]);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
      const double target = 0.25 * Jd * (Jd + 2);
      int pick = 0;
      for (int k = 1; k < es.eigenvalues().size(); ++k)
        if (std::abs(es.eigenvalues()(k) - target) < std::abs(es.eigenvalues()(pick) - target)) pick = k;
      Eigen::VectorXd state = Eigen::VectorXd::Zero(dim);
      for (std::size_t a = 0; a < slots.size(); ++a) state(slots[a]) = es.eigenvectors()(static_cast<long>(a), pick);
      if (state(index(j1d, Jd - j1d)) < 0) state = -state;

      for (int Md = Jd; Md >= -Jd; Md -= 2) {
        for (int m1 = -j1d; m1 <= j1d; m1 += 2)
          for (int m2 = -j2d; m2 <= j2d; m2 += 2)
            if (m1 + m2 == Md) table_[{m1, m2, Jd, Md}] = state(index(m1, m2));
        if (Md > -Jd) {
          state = jminus * state;
          state.normalize();
        }
      }
    }
  }

  /// Zero for any label outside the table.
  double operator()(int m1d, int m2d, int Jd, int Md) const {
    const auto it = table_.find({m1d, m2d, Jd, Md});
    return it == table_.end() ? 0.0 : it->second;
  }

private:
  int j1d_, j2d_;
  std::map<std::tuple<int, int, int, int>, double> table_;
};

inline double cloning_factor(int n, int m) { return double(n) * (m + 2) / (double(m) * (n + 2)); }

/// r' in the ratio form (r+ r-)^(N/2) (r-/r+)^n with path-count multiplicities
/// and lowering-operator Clebsch-Gordan coefficients. Valid for 0 < r < 1.
inline double ratio_form_r_prime(const superbroadcast::ExtremalMap& map, double r) {
  const double rp = 0.5 * (1 + r), rm = 0.5 * (1 - r);
  const int N = map.n_in, M = map.m_out;
  double total = 0.0;
  for (std::size_t i = 0; i < map.phi.size(); ++i) {
    const int ld = N % 2 + 2 * static_cast<int>(i);
    const int jd = map.phi[i].doubled(), Jd = map.big_phi[i].doubled();
    const LoweringTable cg(jd, ld);
    const double pref = double(ld + 1) / (Jd + 1) * static_cast<double>(path_count(N, ld));
    for (int md = -jd; md <= jd; md += 2)
      for (int nd = -ld; nd <= ld; nd += 2) {
        const double c = cg(md, nd, Jd, md + nd);
        total += pref * std::pow(rm / rp, 0.5 * nd) * c * c * (double(md) / M);
      }
  }
  return std::pow(rp * rm, 0.5 * N) * total;
}

}  // namespace oracle_ref
