#include "superbroadcast/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "superbroadcast/analysis.hpp"
#include "superbroadcast/su2.hpp"

namespace superbroadcast {

namespace {

using cd = std::complex<double>;

std::size_t projection_index(HalfInt j, HalfInt m) {
  return static_cast<std::size_t>((m.doubled() + j.doubled()) / 2);
}

bool path_less(const SchurSector& a, const SchurSector& b) {
  if (a.j != b.j) return a.j < b.j;
  return a.path < b.path;
}

double factorial_double(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

// -- Schur basis ------------------------------------------------------------

std::vector<const SchurSector*> SchurIsometry::sectors_for(HalfInt j) const {
  std::vector<const SchurSector*> out;
  for (const auto& s : sectors_)
    if (s.j == j) out.push_back(&s);
  return out;
}

std::size_t SchurIsometry::path_count(HalfInt j) const {
  return static_cast<std::size_t>(
      std::count_if(sectors_.begin(), sectors_.end(), [&](const SchurSector& s) { return s.j == j; }));
}

Eigen::MatrixXd SchurIsometry::matrix() const {
  const long dim = 1L << n_qubits_;
  Eigen::MatrixXd u(dim, dim);
  long col = 0;
  for (const auto& s : sectors_) {
    u.middleCols(col, s.states.cols()) = s.states;
    col += s.states.cols();
  }
  return u;
}

SchurIsometry schur_isometry(int n_qubits, int cap) {
  if (n_qubits < 1) throw std::domain_error("schur_isometry needs at least one qubit");
  if (n_qubits > cap)
    throw ResourceLimit("schur_isometry: " + std::to_string(n_qubits) + " qubits exceeds the cap of " +
                        std::to_string(cap));

  const HalfInt half = HalfInt::from_doubled(1);
  std::vector<SchurSector> level;
  {
    SchurSector q{half, {half}, Eigen::MatrixXd::Zero(2, 2)};
    q.states(1, 0) = 1.0;  // m = -1/2 is |1>
    q.states(0, 1) = 1.0;  // m = +1/2 is |0>
    level.push_back(std::move(q));
  }

  for (int L = 2; L <= n_qubits; ++L) {
    std::vector<SchurSector> next;
    for (const auto& parent : level) {
      const long parent_dim = parent.states.rows();
      for (int step : {-1, 1}) {
        const HalfInt j = HalfInt::from_doubled(parent.j.doubled() + step);
        if (j.doubled() < 0) continue;
        SchurSector child{j, parent.path, Eigen::MatrixXd::Zero(2 * parent_dim, j.dimension())};
        child.path.push_back(j);
        for (HalfInt m : projections(j)) {
          const std::size_t k = projection_index(j, m);
          for (int bit : {0, 1}) {
            const HalfInt s = HalfInt::from_doubled(bit == 0 ? 1 : -1);
            const HalfInt mp = m - s;
            if (mp.abs() > parent.j) continue;
            const double c = cg(parent.j, mp, half, s, j, m);
            if (c == 0.0) continue;
            const auto pcol = parent.states.col(static_cast<long>(projection_index(parent.j, mp)));
            for (long o = 0; o < parent_dim; ++o)
              if (pcol(o) != 0.0) child.states(2 * o + bit, static_cast<long>(k)) += c * pcol(o);
          }
        }
        next.push_back(std::move(child));
      }
    }
    level = std::move(next);
  }

  std::sort(level.begin(), level.end(), path_less);
  SchurIsometry iso;
  iso.n_qubits_ = n_qubits;
  iso.sectors_ = std::move(level);
  return iso;
}

Eigen::MatrixXd coupled_states(const SchurSector& out, const SchurSector& in, HalfInt J) {
  const HalfInt j = out.j, l = in.j;
  const auto allowed = coupled_range(j, l);
  if (std::find(allowed.begin(), allowed.end(), J) == allowed.end())
    throw std::domain_error("coupled spin " + J.str() + " is not reachable from " + j.str() + " and " +
                            l.str());
  const long din = in.states.rows();
  const long dout = out.states.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(dout * din, J.dimension());
  for (HalfInt mj : projections(J)) {
    const long k = static_cast<long>(projection_index(J, mj));
    for (HalfInt m : projections(j)) {
      const HalfInt n = mj - m;
      if (n.abs() > l) continue;
      const double c = cg(j, m, l, n, J, mj);
      if (c == 0.0) continue;
      const auto a = out.states.col(static_cast<long>(projection_index(j, m)));
      const auto b = in.states.col(static_cast<long>(projection_index(l, n)));
      for (long o = 0; o < dout; ++o) {
        if (a(o) == 0.0) continue;
        v.col(k).segment(o * din, din) += (c * a(o)) * b;
      }
    }
  }
  return v;
}

DenseOperator projector_J(const SchurSector& out, const SchurSector& in, HalfInt J) {
  const Eigen::MatrixXd v = coupled_states(out, in, J);
  return (v * v.transpose()).cast<cd>();
}

// -- Choi operators -----------------------------------------------------------

CoupledBasis::CoupledBasis(int n_in, int m_out, int cap)
    : n_in_(n_in), m_out_(m_out), in_(), out_() {
  if (n_in < 1 || m_out < 1) throw std::domain_error("CoupledBasis needs N, M >= 1");
  if (n_in + m_out > cap)
    throw ResourceLimit("Choi operator on " + std::to_string(n_in + m_out) +
                        " qubits exceeds the cap of " + std::to_string(cap));
  in_ = schur_isometry(n_in, cap);
  out_ = schur_isometry(m_out, cap);
  for (HalfInt l : spin_range(n_in)) {
    const auto in_sectors = in_.sectors_for(l);
    for (HalfInt j : spin_range(m_out)) {
      const auto out_sectors = out_.sectors_for(j);
      for (HalfInt J : coupled_range(j, l)) {
        const long width = J.dimension();
        Eigen::MatrixXd cols(dim_out() * dim_in(),
                             static_cast<long>(in_sectors.size() * out_sectors.size()) * width);
        long at = 0;
        for (const auto* a : out_sectors)
          for (const auto* b : in_sectors) {
            cols.middleCols(at, width) = coupled_states(*a, *b, J);
            at += width;
          }
        blocks_.emplace(CouplingTriple{j, l, J}, std::move(cols));
      }
    }
  }
}

const Eigen::MatrixXd& CoupledBasis::block(const CouplingTriple& t) const {
  const auto it = blocks_.find(t);
  if (it == blocks_.end())
    throw std::out_of_range("no coupling (" + t.j.str() + ", " + t.l.str() + ", " + t.J.str() + ")");
  return it->second;
}

Eigen::MatrixXd CoupledBasis::choi_real(const ChannelCoeffs& c) const {
  if (c.n_in() != n_in_ || c.m_out() != m_out_)
    throw std::domain_error("channel shape does not match the coupled basis");
  const long dim = dim_out() * dim_in();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& e : c.entries()) {
    if (e.value == 0.0) continue;
    const auto& b = block(e.triple);
    s.noalias() += e.value * (b * b.transpose());
  }
  return s;
}

DenseOperator CoupledBasis::choi(const ChannelCoeffs& c) const { return choi_real(c).cast<cd>(); }

DenseOperator build_choi(const ChannelCoeffs& c, int cap) {
  return CoupledBasis(c.n_in(), c.m_out(), cap).choi(c);
}

DenseOperator apply_channel(const DenseOperator& choi, const DenseOperator& rho_in) {
  if (rho_in.rows() != rho_in.cols() || choi.rows() != choi.cols())
    throw std::domain_error("apply_channel needs square operators");
  const long din = rho_in.rows();
  const int n_in = qubit_count(din);
  if (din == 0 || choi.rows() % din != 0)
    throw std::domain_error("input dimension does not divide the Choi dimension");
  const long dout = choi.rows() / din;
  qubit_count(dout);

  DenseOperator c = tensor_power(DenseOperator{{cd(0, 0), cd(1, 0)}, {cd(-1, 0), cd(0, 0)}}, n_in);
  const DenseOperator q = c * rho_in.transpose() * c.adjoint();

  using Strided = Eigen::Map<const DenseOperator, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
  DenseOperator out = DenseOperator::Zero(dout, dout);
  const long rows = choi.rows();
  for (long b = 0; b < din; ++b)
    for (long bp = 0; bp < din; ++bp) {
      const cd w = q(bp, b);
      if (w == cd(0, 0)) continue;
      Strided block(choi.data() + b + bp * rows, dout, dout,
                    Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(din * rows, din));
      out += w * block;
    }
  return out;
}

DenseOperator trace_out(const DenseOperator& op, long dim_in) {
  if (dim_in <= 0 || op.rows() % dim_in != 0) throw std::domain_error("trace_out: bad input dimension");
  const long dout = op.rows() / dim_in;
  DenseOperator t = DenseOperator::Zero(dim_in, dim_in);
  for (long o = 0; o < dout; ++o) t += op.block(o * dim_in, o * dim_in, dim_in, dim_in);
  return t;
}

DenseOperator single_copy_marginal(const DenseOperator& rho, int which) {
  const int n = qubit_count(rho.rows());
  if (which < 0 || which >= n)
    throw std::domain_error("qubit index " + std::to_string(which) + " outside 0.." + std::to_string(n - 1));
  const long bit = 1L << (n - 1 - which);
  DenseOperator m = DenseOperator::Zero(2, 2);
  for (long i = 0; i < rho.rows(); ++i) {
    if (i & bit) continue;
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) m(s, t) += rho(i | (s ? bit : 0), i | (t ? bit : 0));
  }
  return m;
}

// -- helpers ------------------------------------------------------------------

int qubit_count(long dim) {
  if (dim < 1 || (dim & (dim - 1)) != 0)
    throw std::domain_error("dimension " + std::to_string(dim) + " is not a power of two");
  int n = 0;
  while ((1L << n) < dim) ++n;
  return n;
}

DenseOperator pauli(int axis) {
  switch (axis) {
    case 0: return DenseOperator{{cd(0, 0), cd(1, 0)}, {cd(1, 0), cd(0, 0)}};
    case 1: return DenseOperator{{cd(0, 0), cd(0, -1)}, {cd(0, 1), cd(0, 0)}};
    case 2: return DenseOperator{{cd(1, 0), cd(0, 0)}, {cd(0, 0), cd(-1, 0)}};
    default: throw std::domain_error("pauli axis must be 0, 1 or 2");
  }
}

DenseOperator qubit_state(const Axis& bloch) {
  DenseOperator rho = DenseOperator::Identity(2, 2);
  for (int a = 0; a < 3; ++a) rho += bloch[a] * pauli(a);
  return 0.5 * rho;
}

DenseOperator tensor_power(const DenseOperator& a, int n) {
  DenseOperator out = DenseOperator::Identity(1, 1);
  for (int k = 0; k < n; ++k) {
    DenseOperator next(out.rows() * a.rows(), out.cols() * a.cols());
    for (long i = 0; i < out.rows(); ++i)
      for (long j = 0; j < out.cols(); ++j)
        next.block(i * a.rows(), j * a.cols(), a.rows(), a.cols()) = out(i, j) * a;
    out = std::move(next);
  }
  return out;
}

Axis bloch_vector(const DenseOperator& q) {
  if (q.rows() != 2 || q.cols() != 2) throw std::domain_error("bloch_vector needs a 2x2 operator");
  return {2.0 * q(0, 1).real(), -2.0 * q(0, 1).imag(), (q(0, 0) - q(1, 1)).real()};
}

double max_abs(const DenseOperator& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double hermiticity_defect(const DenseOperator& a) { return max_abs(a - a.adjoint()); }

double min_eigenvalue(const DenseOperator& a) {
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DenseOperator swap_qubits(int n_qubits, int a, int b) {
  const long dim = 1L << n_qubits;
  const long ba = 1L << (n_qubits - 1 - a), bb = 1L << (n_qubits - 1 - b);
  DenseOperator p = DenseOperator::Zero(dim, dim);
  for (long i = 0; i < dim; ++i) {
    long k = i & ~(ba | bb);
    if (i & ba) k |= bb;
    if (i & bb) k |= ba;
    p(k, i) = 1.0;
  }
  return p;
}

Axis random_axis(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  for (;;) {
    Axis v{g(rng), g(rng), g(rng)};
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n < 1e-8) continue;
    for (double& x : v) x /= n;
    return v;
  }
}

DenseOperator random_su2(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double q[4];
  double n = 0.0;
  do {
    n = 0.0;
    for (double& x : q) {
      x = g(rng);
      n += x * x;
    }
  } while (n < 1e-16);
  n = std::sqrt(n);
  const cd a(q[0] / n, q[1] / n), b(q[2] / n, q[3] / n);
  return DenseOperator{{a, b}, {-std::conj(b), std::conj(a)}};
}

DenseOperator random_density(int n_qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const long dim = 1L << n_qubits;
  DenseOperator a(dim, dim);
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j) a(i, j) = cd(g(rng), g(rng));
  DenseOperator rho = a * a.adjoint();
  return rho / rho.trace();
}

// -- verification -------------------------------------------------------------

bool ClosedFormReport::ok(double tol) const {
  return max_deviation < tol && max_perpendicular < tol && axis_spread < tol &&
         covariance_deviation < tol && permutation_deviation < tol && output_trace_deviation < tol &&
         trace_deviation < kPsdTolerance && min_eigenvalue >= -kPsdTolerance;
}

ClosedFormReport verify_closed_form(const ExtremalMap& map, const VerifyOptions& options) {
  return verify_closed_form(CoupledBasis(map.n_in, map.m_out, options.cap), map, options);
}

ClosedFormReport verify_closed_form(const CoupledBasis& basis, const ExtremalMap& map,
                                    const VerifyOptions& options) {
  const int n = map.n_in, m = map.m_out;
  ClosedFormReport rep;
  rep.n_in = n;
  rep.m_out = m;

  const Eigen::MatrixXd s_real = basis.choi_real(coefficients_for(map));
  const DenseOperator s = s_real.cast<cd>();
  rep.trace_deviation = max_abs(trace_out(s, basis.dim_in()) - DenseOperator::Identity(basis.dim_in(), basis.dim_in()));
  rep.min_eigenvalue =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s_real, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();

  const std::vector<Axis> axes = options.axes.empty() ? std::vector<Axis>{{0.0, 0.0, 1.0}} : options.axes;
  const auto curve = BlochCurve::for_map(map);

  for (double r : options.r_values) {
    const double closed = curve.r_prime(r);
    double lo = 0.0, hi = 0.0;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const Axis& k = axes[a];
      const DenseOperator out = apply_channel(s, tensor_power(qubit_state({r * k[0], r * k[1], r * k[2]}), n));
      rep.output_trace_deviation = std::max(rep.output_trace_deviation, std::abs(out.trace() - cd(1, 0)));
      const DenseOperator first = single_copy_marginal(out, 0);
      for (int q = 0; q < m; ++q) {
        const DenseOperator marginal = q == 0 ? first : single_copy_marginal(out, q);
        rep.permutation_deviation = std::max(rep.permutation_deviation, max_abs(marginal - first));
        const Axis b = bloch_vector(marginal);
        const double along = b[0] * k[0] + b[1] * k[1] + b[2] * k[2];
        double perp = 0.0;
        for (int c = 0; c < 3; ++c) perp += (b[c] - along * k[c]) * (b[c] - along * k[c]);
        rep.max_perpendicular = std::max(rep.max_perpendicular, std::sqrt(perp));
        rep.max_deviation = std::max(rep.max_deviation, std::abs(along - closed));
        if (a == 0 && q == 0) lo = hi = along;
        lo = std::min(lo, along);
        hi = std::max(hi, along);
      }
      if (m >= 2 && a == 0) {
        for (int q = 0; q + 1 < m; ++q) {
          const DenseOperator p = swap_qubits(m, q, q + 1);
          rep.permutation_deviation = std::max(rep.permutation_deviation, max_abs(p * out * p.adjoint() - out));
        }
      }
    }
    rep.axis_spread = std::max(rep.axis_spread, hi - lo);
  }

  std::mt19937_64 rng(options.seed);
  for (int u = 0; u < options.unitaries; ++u) {
    const DenseOperator g = random_su2(rng);
    const DenseOperator gin = tensor_power(g, n), gout = tensor_power(g, m);
    const DenseOperator rho = random_density(n, rng);
    const DenseOperator lhs = apply_channel(s, gin * rho * gin.adjoint());
    const DenseOperator rhs = gout * apply_channel(s, rho) * gout.adjoint();
    rep.covariance_deviation = std::max(rep.covariance_deviation, max_abs(lhs - rhs));
    rep.output_trace_deviation = std::max(rep.output_trace_deviation, std::abs(lhs.trace() - cd(1, 0)));
  }
  return rep;
}

double partial_trace_identity_deviation(int doubled_j_max) {
  double worst = 0.0;
  for (int jd = 1; jd <= doubled_j_max; ++jd) {
    const auto iso = schur_isometry(jd);
    const HalfInt j = HalfInt::from_doubled(jd);
    const auto sym = iso.sectors_for(j);
    if (sym.size() != 1) throw std::logic_error("symmetric sector is not unique");
    for (HalfInt m : projections(j)) {
      const Eigen::VectorXd v = sym.front()->states.col(static_cast<long>(projection_index(j, m)));
      const DenseOperator rho = (v * v.transpose()).cast<cd>();
      const DenseOperator expect =
          0.5 * DenseOperator::Identity(2, 2) + (m.value() / (2.0 * j.value())) * pauli(2);
      for (int q = 0; q < jd; ++q)
        worst = std::max(worst, max_abs(single_copy_marginal(rho, q) - expect));
    }
  }
  return worst;
}

double permutation_trace_identity_deviation(int m_qubits) {
  const auto iso = schur_isometry(m_qubits);
  const long dim = 1L << m_qubits;

  std::vector<std::vector<long>> perms;
  std::vector<int> order(static_cast<std::size_t>(m_qubits));
  std::iota(order.begin(), order.end(), 0);
  do {
    std::vector<long> image(static_cast<std::size_t>(dim));
    for (long i = 0; i < dim; ++i) {
      long k = 0;
      for (int q = 0; q < m_qubits; ++q)
        if (i & (1L << (m_qubits - 1 - q))) k |= 1L << (m_qubits - 1 - order[static_cast<std::size_t>(q)]);
      image[static_cast<std::size_t>(i)] = k;
    }
    perms.push_back(std::move(image));
  } while (std::next_permutation(order.begin(), order.end()));

  const double norm = factorial_double(m_qubits);
  double worst = 0.0;
  for (HalfInt j : spin_range(m_qubits)) {
    const auto sectors = iso.sectors_for(j);
    const double d = to_double(multiplicity(m_qubits, j));
    for (HalfInt m : projections(j)) {
      const long k = static_cast<long>(projection_index(j, m));
      Eigen::MatrixXd target = Eigen::MatrixXd::Zero(dim, dim);
      for (const auto* s : sectors) target += s->states.col(k) * s->states.col(k).transpose();

      const Eigen::VectorXd v = sectors.front()->states.col(k);
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim, dim);
      Eigen::VectorXd w(dim);
      for (const auto& p : perms) {
        for (long i = 0; i < dim; ++i) w(p[static_cast<std::size_t>(i)]) = v(i);
        sum.noalias() += w * w.transpose();
      }
      worst = std::max(worst, ((d / norm) * sum - target).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace superbroadcast
