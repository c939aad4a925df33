// Tensor-product operator algebra over small labeled Hilbert spaces.
//
// Basis ordering convention: the subsystem list order defines the Kronecker
// order (first subsystem is the slowest index) and the level index within a
// subsystem is ascending, |0> first. sigma_z = diag(+1,-1), so sigma_z|0> =
// +|0> and |0> is the physical ground state of a qubit term -(w/2) sigma_z.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "paramsim/types.hpp"

namespace paramsim {

struct Subsystem {
  std::string label;
  int dim = 0;
};

class HilbertSpace {
 public:
  HilbertSpace() = default;
  explicit HilbertSpace(std::vector<Subsystem> subsystems);

  int total_dim() const { return total_dim_; }
  int size() const { return static_cast<int>(subsystems_.size()); }
  const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  const Subsystem& at(int i) const { return subsystems_.at(i); }

  // Throws ConfigError for unknown labels.
  int index_of(const std::string& label) const;
  bool has(const std::string& label) const;
  int dim_of(const std::string& label) const;

  bool operator==(const HilbertSpace& other) const;

 private:
  std::vector<Subsystem> subsystems_;
  int total_dim_ = 1;
};

struct Operator {
  HilbertSpace space;
  Matrix matrix;

  // max |M - M^dagger| over entries, relative to the largest entry.
  double hermiticity_defect() const;
};

class QuantumState {
 public:
  QuantumState() = default;  // empty placeholder; populate via pure/mixed
  static QuantumState pure(HilbertSpace space, Vector psi);
  static QuantumState mixed(HilbertSpace space, Matrix rho);
  // |n1 n2 ...> product basis state from per-subsystem level indices.
  static QuantumState basis_state(HilbertSpace space, const std::vector<int>& levels);

  bool is_pure() const { return pure_; }
  const HilbertSpace& space() const { return space_; }
  const Vector& state_vector() const;
  Matrix density_matrix() const;

  double norm_defect() const;   // pure: | ||psi|| - 1 |, mixed: |tr(rho) - 1|
  void validate(double tol_norm = 1e-9, double tol_herm = 1e-10,
                double tol_positivity = 1e-8) const;

 private:
  HilbertSpace space_;
  bool pure_ = true;
  Vector psi_;
  Matrix rho_;
};

// Dense Kronecker product, first factor slowest.
Matrix kron(const Matrix& a, const Matrix& b);

// Local operator matrices.
Matrix identity_matrix(int dim);
Matrix lowering_operator(int dim);             // a|n> = sqrt(n)|n-1>
Matrix number_operator(int dim);               // diag(0, 1, ..., dim-1)
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

// I x ... x local_op x ... x I with local_op at the labeled slot.
Operator embed(const Matrix& local_op, const std::string& target_label,
               const HilbertSpace& space);

// Reduced density matrix on the kept subsystems (order as listed in `keep`
// is ignored; the original subsystem order is preserved among kept labels).
QuantumState partial_trace(const QuantumState& state, const std::vector<std::string>& keep);

struct ProjectionResult {
  QuantumState state;          // renormalized state on the truncated space (all dims 2)
  double leakage = 0.0;        // 1 - tr(P rho P)
  bool leakage_warning = false;
};

// Projects onto levels {0,1} of every subsystem and renormalizes. Throws
// DegenerateProjectionError when the in-subspace weight vanishes.
ProjectionResult project_two_level(const QuantumState& state,
                                   double leakage_threshold = 0.05);

// Conjugation by exp(-i sum_j theta_j sigma^z_j / 2) on the labeled (2-level)
// subsystems. States transform as psi -> U psi, rho -> U rho U^dagger.
QuantumState apply_frame(const QuantumState& state, const std::map<std::string, double>& phases);
Operator apply_frame(const Operator& op, const std::map<std::string, double>& phases);

// Diagonal of the frame unitary on the given space.
Vector frame_phases_diagonal(const HilbertSpace& space,
                             const std::map<std::string, double>& phases);

double expectation_value(const QuantumState& state, const Matrix& op);

}  // namespace paramsim
