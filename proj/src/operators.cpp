#include "paramsim/operators.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "paramsim/errors.hpp"

namespace paramsim {

HilbertSpace::HilbertSpace(std::vector<Subsystem> subsystems)
    : subsystems_(std::move(subsystems)) {
  total_dim_ = 1;
  for (const auto& s : subsystems_) {
    if (s.dim < 2) throw ConfigError("subsystem '" + s.label + "' must have dim >= 2");
    total_dim_ *= s.dim;
  }
  for (std::size_t i = 0; i < subsystems_.size(); ++i)
    for (std::size_t j = i + 1; j < subsystems_.size(); ++j)
      if (subsystems_[i].label == subsystems_[j].label)
        throw ConfigError("duplicate subsystem label '" + subsystems_[i].label + "'");
}

int HilbertSpace::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < subsystems_.size(); ++i)
    if (subsystems_[i].label == label) return static_cast<int>(i);
  throw ConfigError("unknown subsystem label '" + label + "'");
}

bool HilbertSpace::has(const std::string& label) const {
  return std::any_of(subsystems_.begin(), subsystems_.end(),
                     [&](const Subsystem& s) { return s.label == label; });
}

int HilbertSpace::dim_of(const std::string& label) const {
  return subsystems_[static_cast<std::size_t>(index_of(label))].dim;
}

bool HilbertSpace::operator==(const HilbertSpace& other) const {
  if (subsystems_.size() != other.subsystems_.size()) return false;
  for (std::size_t i = 0; i < subsystems_.size(); ++i)
    if (subsystems_[i].label != other.subsystems_[i].label ||
        subsystems_[i].dim != other.subsystems_[i].dim)
      return false;
  return true;
}

double Operator::hermiticity_defect() const {
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() / scale;
}

QuantumState QuantumState::pure(HilbertSpace space, Vector psi) {
  if (psi.size() != space.total_dim())
    throw ConfigError("state vector dimension does not match space");
  QuantumState s;
  s.space_ = std::move(space);
  s.pure_ = true;
  s.psi_ = std::move(psi);
  return s;
}

QuantumState QuantumState::mixed(HilbertSpace space, Matrix rho) {
  if (rho.rows() != space.total_dim() || rho.cols() != space.total_dim())
    throw ConfigError("density matrix dimension does not match space");
  QuantumState s;
  s.space_ = std::move(space);
  s.pure_ = false;
  s.rho_ = std::move(rho);
  return s;
}

QuantumState QuantumState::basis_state(HilbertSpace space, const std::vector<int>& levels) {
  if (static_cast<int>(levels.size()) != space.size())
    throw ConfigError("level list size does not match subsystem count");
  int index = 0;
  for (int i = 0; i < space.size(); ++i) {
    const int d = space.at(i).dim;
    if (levels[static_cast<std::size_t>(i)] < 0 || levels[static_cast<std::size_t>(i)] >= d)
      throw ConfigError("basis level out of range for subsystem '" + space.at(i).label + "'");
    index = index * d + levels[static_cast<std::size_t>(i)];
  }
  Vector psi = Vector::Zero(space.total_dim());
  psi(index) = 1.0;
  return pure(std::move(space), std::move(psi));
}

const Vector& QuantumState::state_vector() const {
  if (!pure_) throw ConfigError("state is not pure");
  return psi_;
}

Matrix QuantumState::density_matrix() const {
  if (pure_) return psi_ * psi_.adjoint();
  return rho_;
}

double QuantumState::norm_defect() const {
  if (pure_) return std::abs(psi_.norm() - 1.0);
  return std::abs(rho_.trace().real() - 1.0) + std::abs(rho_.trace().imag());
}

void QuantumState::validate(double tol_norm, double tol_herm, double tol_positivity) const {
  if (norm_defect() > tol_norm)
    throw ConfigError("state normalization defect " + std::to_string(norm_defect()));
  if (!pure_) {
    const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol_herm)
      throw ConfigError("density matrix hermiticity defect " + std::to_string(herm));
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
    const double min_ev = es.eigenvalues().minCoeff();
    if (min_ev < -tol_positivity)
      throw ConfigError("density matrix eigenvalue " + std::to_string(min_ev));
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix identity_matrix(int dim) { return Matrix::Identity(dim, dim); }

Matrix lowering_operator(int dim) {
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix number_operator(int dim) {
  Matrix n = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Operator embed(const Matrix& local_op, const std::string& target_label,
               const HilbertSpace& space) {
  const int slot = space.index_of(target_label);
  const int d = space.at(slot).dim;
  if (local_op.rows() != d || local_op.cols() != d)
    throw ConfigError("local operator dimension " + std::to_string(local_op.rows()) +
                      " does not match subsystem '" + target_label + "' (dim " +
                      std::to_string(d) + ")");
  Matrix out = Matrix::Identity(1, 1);
  for (int i = 0; i < space.size(); ++i) {
    if (i == slot)
      out = kron(out, local_op);
    else
      out = kron(out, identity_matrix(space.at(i).dim));
  }
  return Operator{space, std::move(out)};
}

namespace {

// Row-major mixed-radix strides for the subsystem dims.
std::vector<int> strides_of(const HilbertSpace& space) {
  std::vector<int> strides(static_cast<std::size_t>(space.size()), 1);
  for (int i = space.size() - 2; i >= 0; --i)
    strides[static_cast<std::size_t>(i)] =
        strides[static_cast<std::size_t>(i + 1)] * space.at(i + 1).dim;
  return strides;
}

}  // namespace

QuantumState partial_trace(const QuantumState& state, const std::vector<std::string>& keep) {
  const HilbertSpace& space = state.space();
  if (keep.empty()) throw ConfigError("partial_trace: keep list is empty");
  std::vector<bool> kept(static_cast<std::size_t>(space.size()), false);
  for (const auto& label : keep) kept[static_cast<std::size_t>(space.index_of(label))] = true;

  std::vector<Subsystem> kept_subsystems;
  std::vector<int> kept_idx, traced_idx;
  for (int i = 0; i < space.size(); ++i) {
    if (kept[static_cast<std::size_t>(i)]) {
      kept_subsystems.push_back(space.at(i));
      kept_idx.push_back(i);
    } else {
      traced_idx.push_back(i);
    }
  }
  HilbertSpace reduced(kept_subsystems);

  const auto strides = strides_of(space);
  int traced_dim = 1;
  for (int i : traced_idx) traced_dim *= space.at(i).dim;

  // Offset of each (kept, traced) multi-index combination in the full space.
  const int kd = reduced.total_dim();
  std::vector<int> kept_offsets(static_cast<std::size_t>(kd), 0);
  for (int k = 0; k < kd; ++k) {
    int rem = k, off = 0;
    for (int pos = static_cast<int>(kept_idx.size()) - 1; pos >= 0; --pos) {
      const int i = kept_idx[static_cast<std::size_t>(pos)];
      const int d = space.at(i).dim;
      off += (rem % d) * strides[static_cast<std::size_t>(i)];
      rem /= d;
    }
    kept_offsets[static_cast<std::size_t>(k)] = off;
  }
  std::vector<int> traced_offsets(static_cast<std::size_t>(traced_dim), 0);
  for (int tIdx = 0; tIdx < traced_dim; ++tIdx) {
    int rem = tIdx, off = 0;
    for (int pos = static_cast<int>(traced_idx.size()) - 1; pos >= 0; --pos) {
      const int i = traced_idx[static_cast<std::size_t>(pos)];
      const int d = space.at(i).dim;
      off += (rem % d) * strides[static_cast<std::size_t>(i)];
      rem /= d;
    }
    traced_offsets[static_cast<std::size_t>(tIdx)] = off;
  }

  Matrix reduced_rho = Matrix::Zero(kd, kd);
  if (state.is_pure()) {
    const Vector& psi = state.state_vector();
    // rho_red(k,k') = sum_t psi(k,t) conj(psi(k',t))
    Matrix amp(kd, traced_dim);
    for (int k = 0; k < kd; ++k)
      for (int t = 0; t < traced_dim; ++t)
        amp(k, t) = psi(kept_offsets[static_cast<std::size_t>(k)] +
                        traced_offsets[static_cast<std::size_t>(t)]);
    reduced_rho = amp * amp.adjoint();
  } else {
    const Matrix rho = state.density_matrix();
    for (int k = 0; k < kd; ++k)
      for (int kp = 0; kp < kd; ++kp) {
        Complex sum = 0.0;
        for (int t = 0; t < traced_dim; ++t)
          sum += rho(kept_offsets[static_cast<std::size_t>(k)] +
                         traced_offsets[static_cast<std::size_t>(t)],
                     kept_offsets[static_cast<std::size_t>(kp)] +
                         traced_offsets[static_cast<std::size_t>(t)]);
        reduced_rho(k, kp) = sum;
      }
  }
  return QuantumState::mixed(std::move(reduced), std::move(reduced_rho));
}

ProjectionResult project_two_level(const QuantumState& state, double leakage_threshold) {
  const HilbertSpace& space = state.space();
  std::vector<Subsystem> truncated;
  for (const auto& s : space.subsystems()) truncated.push_back({s.label, 2});
  HilbertSpace qubit_space(truncated);

  const auto strides = strides_of(space);
  const int qd = qubit_space.total_dim();
  std::vector<int> offsets(static_cast<std::size_t>(qd), 0);
  for (int k = 0; k < qd; ++k) {
    int rem = k, off = 0;
    for (int i = space.size() - 1; i >= 0; --i) {
      off += (rem % 2) * strides[static_cast<std::size_t>(i)];
      rem /= 2;
    }
    offsets[static_cast<std::size_t>(k)] = off;
  }

  ProjectionResult result;
  if (state.is_pure()) {
    const Vector& psi = state.state_vector();
    Vector proj(qd);
    for (int k = 0; k < qd; ++k) proj(k) = psi(offsets[static_cast<std::size_t>(k)]);
    const double weight = proj.squaredNorm();
    result.leakage = 1.0 - weight;
    if (weight <= 1e-14)
      throw DegenerateProjectionError("two-level projection removed all state weight");
    proj /= std::sqrt(weight);
    result.state = QuantumState::pure(qubit_space, std::move(proj));
  } else {
    const Matrix rho = state.density_matrix();
    Matrix proj(qd, qd);
    for (int k = 0; k < qd; ++k)
      for (int kp = 0; kp < qd; ++kp)
        proj(k, kp) = rho(offsets[static_cast<std::size_t>(k)],
                          offsets[static_cast<std::size_t>(kp)]);
    const double weight = proj.trace().real();
    result.leakage = 1.0 - weight;
    if (weight <= 1e-14)
      throw DegenerateProjectionError("two-level projection removed all state weight");
    proj /= weight;
    result.state = QuantumState::mixed(qubit_space, std::move(proj));
  }
  result.leakage_warning = result.leakage > leakage_threshold;
  return result;
}

Vector frame_phases_diagonal(const HilbertSpace& space,
                             const std::map<std::string, double>& phases) {
  Vector diag = Vector::Ones(space.total_dim());
  const auto strides = strides_of(space);
  for (const auto& [label, theta] : phases) {
    const int slot = space.index_of(label);
    if (space.at(slot).dim != 2)
      throw ConfigError("frame phase on non-qubit subsystem '" + label + "'");
    const int stride = strides[static_cast<std::size_t>(slot)];
    const Complex up = std::exp(Complex(0, -theta / 2.0));    // level 0, sigma_z = +1
    const Complex down = std::exp(Complex(0, +theta / 2.0));  // level 1
    for (int idx = 0; idx < space.total_dim(); ++idx) {
      const int level = (idx / stride) % 2;
      diag(idx) *= (level == 0) ? up : down;
    }
  }
  return diag;
}

QuantumState apply_frame(const QuantumState& state,
                         const std::map<std::string, double>& phases) {
  const Vector diag = frame_phases_diagonal(state.space(), phases);
  if (state.is_pure()) {
    Vector psi = diag.asDiagonal() * state.state_vector();
    return QuantumState::pure(state.space(), std::move(psi));
  }
  Matrix rho = diag.asDiagonal() * state.density_matrix() * diag.conjugate().asDiagonal();
  return QuantumState::mixed(state.space(), std::move(rho));
}

Operator apply_frame(const Operator& op, const std::map<std::string, double>& phases) {
  const Vector diag = frame_phases_diagonal(op.space, phases);
  Matrix m = diag.asDiagonal() * op.matrix * diag.conjugate().asDiagonal();
  return Operator{op.space, std::move(m)};
}

double expectation_value(const QuantumState& state, const Matrix& op) {
  if (state.is_pure()) {
    const Vector& psi = state.state_vector();
    return (psi.adjoint() * op * psi)(0, 0).real();
  }
  return (op * state.density_matrix()).trace().real();
}

}  // namespace paramsim
