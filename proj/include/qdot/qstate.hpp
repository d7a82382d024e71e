#pragma once

// Exact simulation of small qubit registers.
//
// Conventions used throughout the library:
//  * qubit 0 is the most significant bit of a basis-state index, so for
//    n qubits, qubit q lives at bit position (n - 1 - q);
//  * |0> is the spin-up ground state;
//  * states are rays: equality and fidelity ignore a global phase.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qdot/constants.hpp"
#include "qdot/rng.hpp"

namespace qdot {

template <typename Real>
using Complex = std::complex<Real>;
template <typename Real>
using StateVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using DensityMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using Operator = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

enum class Representation { vector, matrix };

struct StateLimits {
  int max_vector_qubits = 12;
  int max_matrix_qubits = 8;
};

/// Invalid register geometry, index or representation.
class StateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kStateTolerance = 1e-10;

// ---------------------------------------------------------------------------
// Gates

enum class GateKind { X, Y, Z, H, S, T, Rot, CNOT, SWAP, SqrtSWAP, ExchangeEvolve };

struct Gate {
  GateKind kind = GateKind::X;
  std::vector<int> targets;
  std::array<double, 3> axis{0.0, 0.0, 1.0};  // Rot only
  double angle = 0.0;  // Rot angle, or exchange theta = J t / hbar
};

inline int gate_arity(GateKind kind) {
  switch (kind) {
    case GateKind::CNOT:
    case GateKind::SWAP:
    case GateKind::SqrtSWAP:
    case GateKind::ExchangeEvolve:
      return 2;
    default:
      return 1;
  }
}

inline std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::T: return "T";
    case GateKind::Rot: return "Rot";
    case GateKind::CNOT: return "CNOT";
    case GateKind::SWAP: return "SWAP";
    case GateKind::SqrtSWAP: return "SqrtSWAP";
    case GateKind::ExchangeEvolve: return "ExchangeEvolve";
  }
  return "?";
}

inline std::optional<GateKind> gate_kind_from_string(std::string_view name) {
  constexpr std::array kinds{GateKind::X,    GateKind::Y,       GateKind::Z,
                             GateKind::H,    GateKind::S,       GateKind::T,
                             GateKind::Rot,  GateKind::CNOT,    GateKind::SWAP,
                             GateKind::SqrtSWAP, GateKind::ExchangeEvolve};
  for (auto k : kinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

namespace gates {

inline Gate x(int q) { return {GateKind::X, {q}}; }
inline Gate y(int q) { return {GateKind::Y, {q}}; }
inline Gate z(int q) { return {GateKind::Z, {q}}; }
inline Gate h(int q) { return {GateKind::H, {q}}; }
inline Gate s(int q) { return {GateKind::S, {q}}; }
inline Gate t(int q) { return {GateKind::T, {q}}; }
inline Gate rot(int q, std::array<double, 3> axis, double angle) {
  return {GateKind::Rot, {q}, axis, angle};
}
inline Gate rz(int q, double angle) { return rot(q, {0.0, 0.0, 1.0}, angle); }
inline Gate cnot(int control, int target) { return {GateKind::CNOT, {control, target}}; }
inline Gate swap(int a, int b) { return {GateKind::SWAP, {a, b}}; }
inline Gate sqrt_swap(int a, int b) { return {GateKind::SqrtSWAP, {a, b}}; }
inline Gate exchange(int a, int b, double theta) {
  return {GateKind::ExchangeEvolve, {a, b}, {0.0, 0.0, 1.0}, theta};
}

}  // namespace gates

/// U = exp(-i theta S1.S2) with dimensionless spin-1/2 operators.
///
/// S1.S2 = SWAP/2 - I/4, so U = e^{i theta/4} (cos(theta/2) I - i sin(theta/2) SWAP).
/// theta = pi gives SWAP and theta = pi/2 gives sqrt(SWAP), both up to a global phase.
template <typename Real = double>
Operator<Real> exchange_matrix(Real theta) {
  using C = Complex<Real>;
  const C phase = std::exp(C(0, theta / 4));
  const C diag = phase * C(std::cos(theta / 2), 0);
  const C off = phase * C(0, -std::sin(theta / 2));
  Operator<Real> u = Operator<Real>::Zero(4, 4);
  u(0, 0) = diag + off;
  u(3, 3) = diag + off;
  u(1, 1) = diag;
  u(2, 2) = diag;
  u(1, 2) = off;
  u(2, 1) = off;
  return u;
}

template <typename Real = double>
Operator<Real> gate_matrix(const Gate& gate) {
  using C = Complex<Real>;
  const Real r2 = Real(1) / std::sqrt(Real(2));
  Operator<Real> m;
  switch (gate.kind) {
    case GateKind::X:
      m.resize(2, 2);
      m << C(0), C(1), C(1), C(0);
      return m;
    case GateKind::Y:
      m.resize(2, 2);
      m << C(0), C(0, -1), C(0, 1), C(0);
      return m;
    case GateKind::Z:
      m.resize(2, 2);
      m << C(1), C(0), C(0), C(-1);
      return m;
    case GateKind::H:
      m.resize(2, 2);
      m << C(r2), C(r2), C(r2), C(-r2);
      return m;
    case GateKind::S:
      m.resize(2, 2);
      m << C(1), C(0), C(0), C(0, 1);
      return m;
    case GateKind::T:
      m.resize(2, 2);
      m << C(1), C(0), C(0), C(r2, r2);
      return m;
    case GateKind::Rot: {
      const auto& a = gate.axis;
      const Real norm = std::sqrt(Real(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]));
      if (!(norm > 0)) throw StateError("rotation axis must be non-zero");
      const Real nx = Real(a[0]) / norm, ny = Real(a[1]) / norm, nz = Real(a[2]) / norm;
      const Real c = std::cos(Real(gate.angle) / 2), s = std::sin(Real(gate.angle) / 2);
      // exp(-i angle/2 n.sigma)
      m.resize(2, 2);
      m << C(c, -s * nz), C(-s * ny, -s * nx), C(s * ny, -s * nx), C(c, s * nz);
      return m;
    }
    case GateKind::CNOT:
      m = Operator<Real>::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = C(1);
      return m;
    case GateKind::SWAP:
      m = Operator<Real>::Zero(4, 4);
      m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = C(1);
      return m;
    case GateKind::SqrtSWAP:
      m = Operator<Real>::Zero(4, 4);
      m(0, 0) = m(3, 3) = C(1);
      m(1, 1) = m(2, 2) = C(0.5, 0.5);
      m(1, 2) = m(2, 1) = C(0.5, -0.5);
      return m;
    case GateKind::ExchangeEvolve:
      return exchange_matrix<Real>(Real(gate.angle));
  }
  throw StateError("unknown gate kind");
}

/// Max elementwise |a - e^{i phi} b| with phi chosen from the largest entry of b.
template <typename Derived1, typename Derived2>
double max_deviation_up_to_phase(const Eigen::MatrixBase<Derived1>& a,
                                 const Eigen::MatrixBase<Derived2>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw StateError("shape mismatch");
  Eigen::Index r = 0, c = 0;
  b.cwiseAbs().maxCoeff(&r, &c);
  auto phase = a(r, c) / b(r, c);
  if (std::abs(phase) == 0) return (a - b).cwiseAbs().maxCoeff();
  phase /= std::abs(phase);
  return static_cast<double>((a - phase * b).cwiseAbs().maxCoeff());
}

// ---------------------------------------------------------------------------
// QuantumState

template <typename Real = double>
class QuantumState {
 public:
  using Scalar = Complex<Real>;
  using Vector = StateVector<Real>;
  using Matrix = DensityMatrix<Real>;

  /// |0...0> on n qubits.
  static QuantumState zero(int n_qubits, Representation rep = Representation::vector,
                           StateLimits limits = {}) {
    return basis(n_qubits, 0, rep, limits);
  }

  static QuantumState basis(int n_qubits, std::uint64_t index,
                            Representation rep = Representation::vector,
                            StateLimits limits = {}) {
    check_size(n_qubits, rep, limits);
    const Eigen::Index d = Eigen::Index(1) << n_qubits;
    if (index >= static_cast<std::uint64_t>(d)) throw StateError("basis index out of range");
    if (rep == Representation::vector) {
      Vector v = Vector::Zero(d);
      v(static_cast<Eigen::Index>(index)) = Scalar(1);
      return QuantumState(n_qubits, limits, std::move(v));
    }
    Matrix m = Matrix::Zero(d, d);
    m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = Scalar(1);
    return QuantumState(n_qubits, limits, std::move(m));
  }

  static QuantumState from_vector(Vector amplitudes, StateLimits limits = {}) {
    const int n = qubits_for_dim(amplitudes.size());
    check_size(n, Representation::vector, limits);
    if (std::abs(double(amplitudes.squaredNorm()) - 1.0) > kStateTolerance)
      throw StateError("amplitude vector is not normalized");
    return QuantumState(n, limits, std::move(amplitudes));
  }

  static QuantumState from_density(Matrix rho, StateLimits limits = {}) {
    if (rho.rows() != rho.cols()) throw StateError("density matrix must be square");
    const int n = qubits_for_dim(rho.rows());
    check_size(n, Representation::matrix, limits);
    QuantumState s(n, limits, std::move(rho));
    if (s.invariant_error() > kStateTolerance) throw StateError("density matrix is not a valid state");
    return s;
  }

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return Eigen::Index(1) << n_qubits_; }
  const StateLimits& limits() const { return limits_; }
  Representation representation() const {
    return std::holds_alternative<Vector>(data_) ? Representation::vector : Representation::matrix;
  }
  bool is_vector() const { return representation() == Representation::vector; }

  const Vector& amplitudes() const {
    if (!is_vector()) throw StateError("state is in density-matrix form");
    return std::get<Vector>(data_);
  }
  const Matrix& density_matrix() const {
    if (is_vector()) throw StateError("state is in amplitude-vector form");
    return std::get<Matrix>(data_);
  }

  /// rho for either representation (|psi><psi| for vectors).
  Matrix density() const {
    if (is_vector()) {
      const auto& v = std::get<Vector>(data_);
      return v * v.adjoint();
    }
    return std::get<Matrix>(data_);
  }

  QuantumState to_matrix() const {
    check_size(n_qubits_, Representation::matrix, limits_);
    return QuantumState(n_qubits_, limits_, density());
  }

  /// this (x) other; the new qubits are appended after the existing ones.
  QuantumState tensor(const QuantumState& other) const {
    const int n = n_qubits_ + other.n_qubits_;
    if (is_vector() && other.is_vector()) {
      check_size(n, Representation::vector, limits_);
      const auto& a = amplitudes();
      const auto& b = other.amplitudes();
      Vector v(a.size() * b.size());
      for (Eigen::Index i = 0; i < a.size(); ++i) v.segment(i * b.size(), b.size()) = a(i) * b;
      return QuantumState(n, limits_, std::move(v));
    }
    check_size(n, Representation::matrix, limits_);
    const Matrix a = density();
    const Matrix b = other.density();
    Matrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        m.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return QuantumState(n, limits_, std::move(m));
  }

  /// In place: psi -> U psi, rho -> U rho U^dagger. `op` acts on `targets`
  /// with targets[0] as its most significant local bit. `op` need not be unitary.
  void apply_operator(const Operator<Real>& op, std::span<const int> targets) {
    check_targets(targets);
    const Eigen::Index local = Eigen::Index(1) << targets.size();
    if (op.rows() != local || op.cols() != local) throw StateError("operator size does not match targets");
    if (is_vector()) {
      apply_local(std::get<Vector>(data_), op, targets);
      return;
    }
    auto& rho = std::get<Matrix>(data_);
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
      Vector col = rho.col(c);
      apply_local(col, op, targets);
      rho.col(c) = col;
    }
    const Operator<Real> conj = op.conjugate();
    for (Eigen::Index r = 0; r < rho.rows(); ++r) {
      Vector row = rho.row(r).transpose();
      apply_local(row, conj, targets);
      rho.row(r) = row.transpose();
    }
  }

  void apply(const Gate& gate) {
    if (static_cast<int>(gate.targets.size()) != gate_arity(gate.kind))
      throw StateError("gate " + std::string(to_string(gate.kind)) + " expects " +
                       std::to_string(gate_arity(gate.kind)) + " target(s)");
    apply_operator(gate_matrix<Real>(gate), gate.targets);
  }

  /// rho -> sum_k K rho K^dagger for single-qubit Kraus operators (matrix form only).
  void apply_channel(std::span<const Operator<Real>> kraus, int qubit) {
    if (is_vector()) throw StateError("channels require the density-matrix representation");
    const std::array<int, 1> t{qubit};
    check_targets(t);
    const Matrix rho = std::get<Matrix>(data_);
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& k : kraus) {
      QuantumState term(n_qubits_, limits_, rho);
      term.apply_operator(k, t);
      out += std::get<Matrix>(term.data_);
    }
    std::get<Matrix>(data_) = std::move(out);
  }

  /// Divides by the norm (vector) or trace (matrix); returns the pre-normalization weight.
  Real renormalize() {
    if (is_vector()) {
      auto& v = std::get<Vector>(data_);
      const Real w = v.squaredNorm();
      if (w > 0) v /= std::sqrt(w);
      return w;
    }
    auto& m = std::get<Matrix>(data_);
    const Real w = m.trace().real();
    if (w > 0) m /= w;
    return w;
  }

  /// Largest violation of the representation's invariants.
  double invariant_error() const {
    if (is_vector()) return std::abs(double(amplitudes().squaredNorm()) - 1.0);
    const auto& m = density_matrix();
    double err = std::abs(double(m.trace().real()) - 1.0);
    err = std::max(err, std::abs(double(m.trace().imag())));
    err = std::max(err, double((m - m.adjoint()).cwiseAbs().maxCoeff()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    err = std::max(err, -double(es.eigenvalues().minCoeff()));
    return err;
  }

  void check_qubit(int q) const {
    if (q < 0 || q >= n_qubits_)
      throw StateError("qubit index " + std::to_string(q) + " out of range for " +
                       std::to_string(n_qubits_) + "-qubit register");
  }

 private:
  QuantumState(int n, StateLimits limits, Vector v) : n_qubits_(n), limits_(limits), data_(std::move(v)) {}
  QuantumState(int n, StateLimits limits, Matrix m) : n_qubits_(n), limits_(limits), data_(std::move(m)) {}

  static int qubits_for_dim(Eigen::Index d) {
    int n = 0;
    while ((Eigen::Index(1) << n) < d) ++n;
    if ((Eigen::Index(1) << n) != d || d < 2) throw StateError("dimension is not a power of two >= 2");
    return n;
  }

  static void check_size(int n, Representation rep, const StateLimits& limits) {
    if (n < 1) throw StateError("register needs at least one qubit");
    const int cap = rep == Representation::vector ? limits.max_vector_qubits : limits.max_matrix_qubits;
    if (n > cap)
      throw StateError(std::to_string(n) + " qubits exceeds the " +
                       (rep == Representation::vector ? "vector" : "matrix") + " cap of " +
                       std::to_string(cap));
  }

  void check_targets(std::span<const int> targets) const {
    for (std::size_t i = 0; i < targets.size(); ++i) {
      check_qubit(targets[i]);
      for (std::size_t j = 0; j < i; ++j)
        if (targets[i] == targets[j]) throw StateError("duplicate gate targets");
    }
  }

  void apply_local(Vector& v, const Operator<Real>& op, std::span<const int> targets) const {
    const int k = static_cast<int>(targets.size());
    const Eigen::Index local = Eigen::Index(1) << k;
    std::vector<Eigen::Index> offset(static_cast<std::size_t>(local), 0);
    Eigen::Index mask = 0;
    for (Eigen::Index l = 0; l < local; ++l) {
      for (int j = 0; j < k; ++j) {
        if ((l >> (k - 1 - j)) & 1) offset[l] |= Eigen::Index(1) << (n_qubits_ - 1 - targets[j]);
      }
    }
    for (int j = 0; j < k; ++j) mask |= Eigen::Index(1) << (n_qubits_ - 1 - targets[j]);
    Vector in(local);
    for (Eigen::Index base = 0; base < v.size(); ++base) {
      if (base & mask) continue;
      for (Eigen::Index l = 0; l < local; ++l) in(l) = v(base + offset[l]);
      const Vector out = op * in;
      for (Eigen::Index l = 0; l < local; ++l) v(base + offset[l]) = out(l);
    }
  }

  int n_qubits_;
  StateLimits limits_;
  std::variant<Vector, Matrix> data_;
};

// ---------------------------------------------------------------------------
// Free functions

template <typename Real>
QuantumState<Real> apply_gate(QuantumState<Real> state, const Gate& gate) {
  state.apply(gate);
  return state;
}

/// U = exp(-i (J t / hbar) S1.S2) on `pair`. J in eV, t in seconds.
template <typename Real>
QuantumState<Real> exchange_evolution(QuantumState<Real> state, std::pair<int, int> pair, double J,
                                      double t) {
  if (J < 0 || t < 0) throw StateError("exchange needs J >= 0 and t >= 0");
  state.apply(gates::exchange(pair.first, pair.second, J * t / constants::hbar));
  return state;
}

enum class Basis { Z, X };

template <typename Real>
struct Projection {
  Real probability;
  QuantumState<Real> state;  // renormalized; meaningless when probability == 0
};

template <typename Real>
Real outcome_probability(const QuantumState<Real>& state, int qubit, Basis basis, int outcome) {
  state.check_qubit(qubit);
  QuantumState<Real> s = state;
  if (basis == Basis::X) s.apply(gates::h(qubit));
  const int shift = s.n_qubits() - 1 - qubit;
  Real p = 0;
  if (s.is_vector()) {
    const auto& v = s.amplitudes();
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (((i >> shift) & 1) == outcome) p += std::norm(v(i));
  } else {
    const auto& m = s.density_matrix();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (((i >> shift) & 1) == outcome) p += m(i, i).real();
  }
  return std::clamp(p, Real(0), Real(1));
}

/// Projects `qubit` onto `outcome` of `basis` and renormalizes.
template <typename Real>
Projection<Real> project(const QuantumState<Real>& state, int qubit, Basis basis, int outcome) {
  state.check_qubit(qubit);
  if (outcome != 0 && outcome != 1) throw StateError("outcome must be 0 or 1");
  QuantumState<Real> s = state;
  if (basis == Basis::X) s.apply(gates::h(qubit));
  Operator<Real> p = Operator<Real>::Zero(2, 2);
  p(outcome, outcome) = Complex<Real>(1);
  const std::array<int, 1> t{qubit};
  s.apply_operator(p, t);
  const Real prob = s.renormalize();
  if (basis == Basis::X) s.apply(gates::h(qubit));
  return {std::clamp(prob, Real(0), Real(1)), std::move(s)};
}

template <typename Real>
struct Measurement {
  int outcome;
  QuantumState<Real> state;
};

/// Born-rule sample of `qubit` in `basis`; outcome 0 is |0> (Z) or |+> (X).
template <typename Real>
Measurement<Real> measure(const QuantumState<Real>& state, int qubit, Basis basis, Rng& rng) {
  const Real p1 = outcome_probability(state, qubit, basis, 1);
  const int outcome = rng.uniform() < double(p1) ? 1 : 0;
  auto projected = project(state, qubit, basis, outcome);
  return {outcome, std::move(projected.state)};
}

template <typename Real>
Measurement<Real> measure(const QuantumState<Real>& state, int qubit, Basis basis,
                          std::uint64_t seed) {
  Rng rng(seed);
  return measure(state, qubit, basis, rng);
}

/// Reduced density matrix of `keep` (in the given order) after tracing out the rest.
template <typename Real>
DensityMatrix<Real> reduced_density(const QuantumState<Real>& state, std::span<const int> keep) {
  const int n = state.n_qubits();
  for (std::size_t i = 0; i < keep.size(); ++i) {
    state.check_qubit(keep[i]);
    for (std::size_t j = 0; j < i; ++j)
      if (keep[i] == keep[j]) throw StateError("duplicate qubit in partial trace");
  }
  const int k = static_cast<int>(keep.size());
  const Eigen::Index dk = Eigen::Index(1) << k;
  auto split = [&](Eigen::Index full) {
    Eigen::Index kept = 0, env = 0;
    int env_bit = 0;
    std::vector<bool> is_kept(static_cast<std::size_t>(n), false);
    for (int j = 0; j < k; ++j) {
      is_kept[keep[j]] = true;
      if ((full >> (n - 1 - keep[j])) & 1) kept |= Eigen::Index(1) << (k - 1 - j);
    }
    for (int q = n - 1; q >= 0; --q) {
      if (is_kept[q]) continue;
      if ((full >> (n - 1 - q)) & 1) env |= Eigen::Index(1) << env_bit;
      ++env_bit;
    }
    return std::pair{kept, env};
  };
  const Eigen::Index d = state.dim();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> parts(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) parts[i] = split(i);
  DensityMatrix<Real> out = DensityMatrix<Real>::Zero(dk, dk);
  if (state.is_vector()) {
    const auto& v = state.amplitudes();
    const Eigen::Index de = d / dk;
    Operator<Real> psi = Operator<Real>::Zero(dk, de);
    for (Eigen::Index i = 0; i < d; ++i) psi(parts[i].first, parts[i].second) = v(i);
    out = psi * psi.adjoint();
  } else {
    const auto& m = state.density_matrix();
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        if (parts[i].second == parts[j].second) out(parts[i].first, parts[j].first) += m(i, j);
  }
  return out;
}

namespace detail {

// Eigenvalues below round-off of the largest are zeroed so that the square
// root of a rank-deficient matrix does not pick up sqrt(1e-17) noise.
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, 1> clip_roundoff(const Eigen::Matrix<Real, Eigen::Dynamic, 1>& ev) {
  const Real cut = Real(64) * std::numeric_limits<Real>::epsilon() * std::max(Real(1), ev.cwiseAbs().maxCoeff());
  return ev.unaryExpr([cut](Real x) { return x > cut ? x : Real(0); });
}

template <typename Real>
DensityMatrix<Real> psd_sqrt(const DensityMatrix<Real>& m) {
  Eigen::SelfAdjointEigenSolver<DensityMatrix<Real>> es(m);
  const auto ev = clip_roundoff<Real>(es.eigenvalues()).cwiseSqrt().eval();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Uhlmann fidelity between density matrices, (tr sqrt(sqrt(a) b sqrt(a)))^2.
template <typename Real>
Real matrix_fidelity(const DensityMatrix<Real>& a, const DensityMatrix<Real>& b) {
  if (a.rows() != b.rows()) throw StateError("dimension mismatch");
  const DensityMatrix<Real> sa = detail::psd_sqrt<Real>(a);
  const DensityMatrix<Real> inner = sa * b * sa;
  Eigen::SelfAdjointEigenSolver<DensityMatrix<Real>> es(Real(0.5) * (inner + inner.adjoint()),
                                                        Eigen::EigenvaluesOnly);
  const Real tr = detail::clip_roundoff<Real>(es.eigenvalues()).cwiseSqrt().sum();
  return std::clamp(tr * tr, Real(0), Real(1));
}

/// |<a|b>|^2 for pure states, <psi|rho|psi> for mixed/pure, Uhlmann for two mixed.
template <typename Real>
Real state_fidelity(const QuantumState<Real>& a, const QuantumState<Real>& b) {
  if (a.n_qubits() != b.n_qubits()) throw StateError("fidelity of registers of different size");
  Real f;
  if (a.is_vector() && b.is_vector()) {
    f = std::norm(a.amplitudes().dot(b.amplitudes()));
  } else if (a.is_vector()) {
    f = (a.amplitudes().adjoint() * b.density_matrix() * a.amplitudes())(0, 0).real();
  } else if (b.is_vector()) {
    f = (b.amplitudes().adjoint() * a.density_matrix() * b.amplitudes())(0, 0).real();
  } else {
    f = matrix_fidelity<Real>(a.density_matrix(), b.density_matrix());
  }
  return std::clamp(f, Real(0), Real(1));
}

/// Haar-random pure state on n qubits.
template <typename Real = double>
QuantumState<Real> haar_random_state(int n_qubits, Rng& rng, StateLimits limits = {}) {
  StateVector<Real> v(Eigen::Index(1) << n_qubits);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex<Real>(Real(rng.normal()), Real(rng.normal()));
  v.normalize();
  return QuantumState<Real>::from_vector(std::move(v), limits);
}

using State = QuantumState<double>;

}  // namespace qdot
