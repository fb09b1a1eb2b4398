#pragma once

// Dense-matrix reference implementation. Every operator is an explicit
// 2^L x 2^L matrix on the qubit register, with qubit 0 the most significant
// bit of the index and |0> the spin-up state.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "superbroadcast/channels.hpp"

namespace superbroadcast {

using DenseOperator = Eigen::MatrixXcd;
using Axis = std::array<double, 3>;

inline constexpr int kOracleQubitCap = 12;
inline constexpr double kPsdTolerance = 1e-10;

/// A dense object would exceed the configured qubit cap.
class ResourceLimit : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// States |j m, path> for one Bratteli path; column k holds m = -j + k.
struct SchurSector {
  HalfInt j;
  /// Intermediate total spins after each qubit, ending in j.
  std::vector<HalfInt> path;
  Eigen::MatrixXd states;
};

class SchurIsometry {
public:
  int n_qubits() const { return n_qubits_; }
  /// Sorted by (j, path).
  const std::vector<SchurSector>& sectors() const { return sectors_; }
  std::vector<const SchurSector*> sectors_for(HalfInt j) const;
  std::size_t path_count(HalfInt j) const;
  /// All columns side by side, in sector order: a 2^L x 2^L orthogonal matrix.
  Eigen::MatrixXd matrix() const;

private:
  friend SchurIsometry schur_isometry(int, int);
  int n_qubits_ = 0;
  std::vector<SchurSector> sectors_;
};

/// Couples one qubit at a time with Clebsch-Gordan coefficients.
/// Throws std::domain_error for L < 1 and ResourceLimit for L > cap.
SchurIsometry schur_isometry(int n_qubits, int cap = kOracleQubitCap);

/// Orthonormal states |J M_J> inside out (x) in, column k <-> M_J = -J + k,
/// on C^{2^M} (x) C^{2^N} with index out * 2^N + in.
Eigen::MatrixXd coupled_states(const SchurSector& out, const SchurSector& in, HalfInt J);

/// Rank 2J+1 projector onto spin J inside one pair of multiplicity copies.
/// Throws std::domain_error when J is outside coupled_range(out.j, in.j).
DenseOperator projector_J(const SchurSector& out, const SchurSector& in, HalfInt J);

/// Coupled states of every (j, l, J) for a fixed (N, M), summed over all
/// path pairs; built once and reused for every channel of that shape.
class CoupledBasis {
public:
  CoupledBasis(int n_in, int m_out, int cap = kOracleQubitCap);

  int n_in() const { return n_in_; }
  int m_out() const { return m_out_; }
  long dim_in() const { return 1L << n_in_; }
  long dim_out() const { return 1L << m_out_; }
  const SchurIsometry& input_basis() const { return in_; }
  const SchurIsometry& output_basis() const { return out_; }

  /// d_j * d_l * (2J+1) orthonormal columns spanning the (j, l, J) block.
  const Eigen::MatrixXd& block(const CouplingTriple& t) const;
  const std::map<CouplingTriple, Eigen::MatrixXd>& blocks() const { return blocks_; }

  /// S = sum s(j,l,J) * block * block^T.
  Eigen::MatrixXd choi_real(const ChannelCoeffs& c) const;
  DenseOperator choi(const ChannelCoeffs& c) const;

private:
  int n_in_;
  int m_out_;
  SchurIsometry in_;
  SchurIsometry out_;
  std::map<CouplingTriple, Eigen::MatrixXd> blocks_;
};

/// Choi operator on C^{2^M} (x) C^{2^N}. Throws ResourceLimit when N + M > cap.
DenseOperator build_choi(const ChannelCoeffs& c, int cap = kOracleQubitCap);

/// B(Q) = Tr_in[(I_out (x) Q~) S] with Q~ = C Q^T C^dagger, C = (i sigma_y)^{(x)N}.
/// Throws std::domain_error when the dimensions do not fit together.
DenseOperator apply_channel(const DenseOperator& choi, const DenseOperator& rho_in);

/// Partial trace onto qubit `which` (0-based). Throws std::domain_error on a bad index.
DenseOperator single_copy_marginal(const DenseOperator& rho, int which);

/// Tr_out of an operator on C^{dim_out} (x) C^{dim_in}.
DenseOperator trace_out(const DenseOperator& op, long dim_in);

// -- small helpers ----------------------------------------------------------

int qubit_count(long dim);  // throws std::domain_error unless dim is a power of two
DenseOperator pauli(int axis);  // 0, 1, 2 -> x, y, z
DenseOperator qubit_state(const Axis& bloch);
DenseOperator tensor_power(const DenseOperator& a, int n);
Axis bloch_vector(const DenseOperator& qubit);
double max_abs(const DenseOperator& a);
double hermiticity_defect(const DenseOperator& a);
double min_eigenvalue(const DenseOperator& a);
/// Exchange of qubits a and b on an L-qubit register, as a permutation matrix.
DenseOperator swap_qubits(int n_qubits, int a, int b);

Axis random_axis(std::mt19937_64& rng);
/// Haar-distributed SU(2) element.
DenseOperator random_su2(std::mt19937_64& rng);
/// Random full-rank density operator on L qubits.
DenseOperator random_density(int n_qubits, std::mt19937_64& rng);

// -- verification -----------------------------------------------------------

struct ClosedFormReport {
  int n_in = 0;
  int m_out = 0;
  /// max |closed-form r' - dense marginal Bloch component along the axis|
  double max_deviation = 0.0;
  /// Largest marginal Bloch component orthogonal to the input axis.
  double max_perpendicular = 0.0;
  /// Spread of r' across the axes at fixed r.
  double axis_spread = 0.0;
  /// max |B(U^N rho U^N+) - U^M B(rho) U^M+| over the sampled unitaries.
  double covariance_deviation = 0.0;
  /// Largest change of the output under a qubit exchange, and largest
  /// difference between single-qubit marginals.
  double permutation_deviation = 0.0;
  /// max |Tr_out S - I|
  double trace_deviation = 0.0;
  double min_eigenvalue = 0.0;
  /// max |Tr B(rho) - 1| over all dense outputs.
  double output_trace_deviation = 0.0;

  bool ok(double tol = 1e-9) const;
};

struct VerifyOptions {
  std::vector<double> r_values{0.0, 0.3, 0.7, 1.0};
  /// Input axes; z when empty.
  std::vector<Axis> axes;
  std::uint64_t seed = 0;
  int unitaries = 3;
  int cap = kOracleQubitCap;
};

/// Compares analysis.single_copy_bloch with the dense channel for one map.
ClosedFormReport verify_closed_form(const ExtremalMap& map, const VerifyOptions& options = {});
/// Same against an already built basis, for sweeps over many maps.
ClosedFormReport verify_closed_form(const CoupledBasis& basis, const ExtremalMap& map,
                                    const VerifyOptions& options);

/// max over j <= j_max (doubled <= 2 j_max), all m, of
/// |Tr_{2j-1}[|jm><jm|] - (I/2 + m/(2j) sigma_z)| on the symmetric Schur columns.
double partial_trace_identity_deviation(int doubled_j_max);

/// max over sectors of |(d_j / M!) sum_pi pi X pi^+ - sum_path |jm,path><jm,path||
/// with X a single Schur column projector, for an M-qubit register.
double permutation_trace_identity_deviation(int m_qubits);

}  // namespace superbroadcast
