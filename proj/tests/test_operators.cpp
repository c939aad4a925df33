#include "paramsim/operators.hpp"

#include <doctest.h>

#include <random>

#include "paramsim/errors.hpp"
#include "test_util.hpp"

using namespace paramsim;

TEST_CASE("embed places sigma_z on the labeled qubit") {
  const HilbertSpace space({{"q1", 2}, {"q2", 2}});
  const auto op = embed(pauli_z(), "q1", space);
  const auto psi = QuantumState::basis_state(space, {0, 0});
  const Vector out = op.matrix * psi.state_vector();
  CHECK((out - psi.state_vector()).norm() == doctest::Approx(0.0));  // sigma_z|0> = +|0>
}

TEST_CASE("embedding the identity gives the identity on the total space") {
  const HilbertSpace space({{"q1", 2}, {"q2", 3}});
  const auto op = embed(identity_matrix(3), "q2", space);
  CHECK((op.matrix - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("embedded 3-level lowering operator has the Kronecker nonzero pattern") {
  const HilbertSpace space({{"q1", 2}, {"q2", 2}, {"c", 3}});
  const auto op = embed(lowering_operator(3), "c", space);
  // Independent count: a has 2 nonzeros (1 and sqrt 2); the identity factors
  // contribute dim(q1) * dim(q2) = 4 diagonal slots -> 8 nonzeros total.
  int nonzeros = 0;
  int value_one = 0, value_sqrt2 = 0;
  for (int i = 0; i < op.matrix.rows(); ++i)
    for (int j = 0; j < op.matrix.cols(); ++j) {
      const double a = std::abs(op.matrix(i, j));
      if (a == 0.0) continue;
      ++nonzeros;
      if (a == doctest::Approx(1.0)) ++value_one;
      if (a == doctest::Approx(std::sqrt(2.0))) ++value_sqrt2;
    }
  CHECK(nonzeros == 8);
  CHECK(value_one == 4);
  CHECK(value_sqrt2 == 4);
}

TEST_CASE("embed rejects unknown labels and dimension mismatches") {
  const HilbertSpace space({{"q1", 2}, {"c", 3}});
  CHECK_THROWS_AS(embed(pauli_x(), "q9", space), ConfigError);
  CHECK_THROWS_AS(embed(pauli_x(), "c", space), ConfigError);
}

TEST_CASE("partial trace of a product state returns the pure marginal") {
  const HilbertSpace space({{"q1", 2}, {"q2", 2}, {"c", 3}});
  std::mt19937 rng(7);
  const Vector qubit_part = testing::random_state_vector(4, rng);
  Vector coupler_part = Vector::Zero(3);
  coupler_part(0) = 1.0;
  Vector full(12);
  for (int q = 0; q < 4; ++q)
    for (int c = 0; c < 3; ++c) full(q * 3 + c) = qubit_part(q) * coupler_part(c);
  const auto reduced = partial_trace(QuantumState::pure(space, full), {"q1", "q2"});
  const Matrix expected = qubit_part * qubit_part.adjoint();
  CHECK((reduced.density_matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace of a Bell state is maximally mixed") {
  const HilbertSpace space({{"q1", 2}, {"q2", 2}});
  Vector bell = Vector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const auto reduced = partial_trace(QuantumState::pure(space, bell), {"q1"});
  CHECK((reduced.density_matrix() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("partial trace matches an explicit index-sum oracle") {
  const HilbertSpace space({{"a", 2}, {"b", 3}, {"c", 2}});
  std::mt19937 rng(11);
  const Vector psi = testing::random_state_vector(12, rng);

  // Oracle: rho_b(i,j) = sum_{a,c} psi(a,i,c) conj(psi(a,j,c)), flat index
  // (a * 3 + i) * 2 + c.
  Matrix oracle = Matrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c)
          oracle(i, j) += psi((a * 3 + i) * 2 + c) * std::conj(psi((a * 3 + j) * 2 + c));

  const auto reduced = partial_trace(QuantumState::pure(space, psi), {"b"});
  CHECK((reduced.density_matrix() - oracle).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(reduced.density_matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("partial trace over every label returns the state itself") {
  const HilbertSpace space({{"a", 2}, {"b", 2}});
  std::mt19937 rng(3);
  const Matrix rho = testing::random_density_matrix(4, rng);
  const auto full = partial_trace(QuantumState::mixed(space, rho), {"a", "b"});
  CHECK((full.density_matrix() - rho).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-level projection is the identity on confined states") {
  const HilbertSpace space({{"q1", 3}, {"q2", 3}});
  std::mt19937 rng(5);
  Vector psi = Vector::Zero(9);
  // Populate only levels {0,1} x {0,1}.
  const Vector amps = testing::random_state_vector(4, rng);
  psi(0 * 3 + 0) = amps(0);
  psi(0 * 3 + 1) = amps(1);
  psi(1 * 3 + 0) = amps(2);
  psi(1 * 3 + 1) = amps(3);
  const auto result = project_two_level(QuantumState::pure(space, psi));
  CHECK(result.leakage == doctest::Approx(0.0));
  CHECK_FALSE(result.leakage_warning);
  CHECK(std::abs(result.state.state_vector()(0) - amps(0)) < 1e-14);
  CHECK(std::abs(result.state.state_vector()(3) - amps(3)) < 1e-14);
}

TEST_CASE("projection of a pure |2> state is degenerate") {
  const HilbertSpace space({{"q1", 3}});
  Vector psi = Vector::Zero(3);
  psi(2) = 1.0;
  CHECK_THROWS_AS(project_two_level(QuantumState::pure(space, psi)),
                  DegenerateProjectionError);
}

TEST_CASE("projection leakage equals the out-of-subspace population sum") {
  const HilbertSpace space({{"q1", 3}, {"q2", 3}});
  std::mt19937 rng(17);
  const Vector psi = testing::random_state_vector(9, rng);

  double outside = 0.0;  // population-sum oracle
  for (int n1 = 0; n1 < 3; ++n1)
    for (int n2 = 0; n2 < 3; ++n2)
      if (n1 > 1 || n2 > 1) outside += std::norm(psi(n1 * 3 + n2));

  const auto result = project_two_level(QuantumState::pure(space, psi), 0.9);
  CHECK(result.leakage == doctest::Approx(outside).epsilon(1e-12));
}

TEST_CASE("frame with zero phases is the identity") {
  const HilbertSpace space({{"q1", 2}, {"q2", 2}});
  std::mt19937 rng(23);
  const Vector psi = testing::random_state_vector(4, rng);
  const auto mapped = apply_frame(QuantumState::pure(space, psi), {{"q1", 0.0}, {"q2", 0.0}});
  CHECK((mapped.state_vector() - psi).norm() < 1e-15);
}

TEST_CASE("frame phase 2 pi leaves a density matrix exactly invariant") {
  const HilbertSpace space({{"q1", 2}});
  std::mt19937 rng(29);
  const Matrix rho = testing::random_density_matrix(2, rng);
  const auto mapped = apply_frame(QuantumState::mixed(space, rho), {{"q1", two_pi}});
  CHECK((mapped.density_matrix() - rho).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("frame phase maps <sigma_x> onto the <sigma_y> axis") {
  const HilbertSpace space({{"q1", 2}});
  std::mt19937 rng(31);
  const Vector psi = testing::random_state_vector(2, rng);
  const auto original = QuantumState::pure(space, psi);

  // 2x2 oracle for the state map psi -> U psi with U = diag(e^{-i t/2},
  // e^{+i t/2}): measuring sigma_x afterwards equals measuring U^dag sigma_x U
  // beforehand; hand multiplication gives cos(t) sigma_x - sin(t) sigma_y.
  for (const double theta : {pi / 2, -pi / 2}) {
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = std::exp(Complex(0, -theta / 2));
    u(1, 1) = std::exp(Complex(0, theta / 2));
    const Matrix conjugated = u.adjoint() * pauli_x() * u;
    const Matrix expected = std::cos(theta) * pauli_x() - std::sin(theta) * pauli_y();
    CHECK((conjugated - expected).cwiseAbs().maxCoeff() < 1e-15);

    const auto mapped = apply_frame(original, {{"q1", theta}});
    const double mapped_x = expectation_value(mapped, pauli_x());
    CHECK(mapped_x ==
          doctest::Approx(expectation_value(original, conjugated)).epsilon(1e-12));
  }
  // At theta = -pi/2 the sigma_x expectation lands on +<sigma_y>.
  const auto mapped = apply_frame(original, {{"q1", -pi / 2}});
  CHECK(expectation_value(mapped, pauli_x()) ==
        doctest::Approx(expectation_value(original, pauli_y())).epsilon(1e-12));
}

TEST_CASE("operators on disjoint supports commute") {
  const HilbertSpace space({{"a", 2}, {"b", 3}, {"c", 2}});
  std::mt19937 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix op_a = testing::random_matrix(2, rng);
    const Matrix op_b = testing::random_matrix(3, rng);
    const Matrix lhs = embed(op_a, "a", space).matrix * embed(op_b, "b", space).matrix;
    const Matrix rhs = embed(op_b, "b", space).matrix * embed(op_a, "a", space).matrix;
    const double scale = std::max(1.0, lhs.cwiseAbs().maxCoeff());
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() / scale < 1e-12);
  }
}

TEST_CASE("partial trace preserves the trace") {
  const HilbertSpace space({{"a", 3}, {"b", 2}});
  std::mt19937 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix rho = testing::random_density_matrix(6, rng);
    const auto reduced = partial_trace(QuantumState::mixed(space, rho), {"b"});
    CHECK(reduced.density_matrix().trace().real() ==
          doctest::Approx(rho.trace().real()).epsilon(1e-12));
  }
}

TEST_CASE("frame application preserves the spectrum") {
  const HilbertSpace space({{"q1", 2}, {"q2", 2}});
  std::mt19937 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix rho = testing::random_density_matrix(4, rng);
    const auto mapped =
        apply_frame(QuantumState::mixed(space, rho), {{"q1", 0.7}, {"q2", -2.1}});
    Eigen::SelfAdjointEigenSolver<Matrix> before(rho);
    Eigen::SelfAdjointEigenSolver<Matrix> after(mapped.density_matrix());
    CHECK((before.eigenvalues() - after.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("state validation enforces the declared invariants") {
  const HilbertSpace space({{"q1", 2}});
  Vector bad(2);
  bad << 1.0, 0.5;  // unnormalized
  CHECK_THROWS_AS(QuantumState::pure(space, bad).validate(), ConfigError);
  Matrix negative(2, 2);
  negative << 1.5, 0.0, 0.0, -0.5;  // trace 1 but indefinite
  CHECK_THROWS_AS(QuantumState::mixed(space, negative).validate(), ConfigError);
  CHECK_THROWS_AS(HilbertSpace({{"a", 2}, {"a", 2}}), ConfigError);
  CHECK_THROWS_AS(HilbertSpace({{"a", 1}}), ConfigError);
}
