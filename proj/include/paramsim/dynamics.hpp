// Time propagation of closed and open systems under time-dependent
// Hamiltonians, plus the measurement utilities built on top of it.
//
// The stepper is a fourth-order commutator-free Magnus scheme: two matrix
// exponentials per step evaluated at the Gauss-Legendre nodes. Exponentials
// are applied to the state block by a shifted, scaled truncated Taylor
// expansion, which keeps the cost at a handful of matrix-vector products.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "paramsim/device.hpp"
#include "paramsim/operators.hpp"
#include "paramsim/types.hpp"

namespace paramsim {

// Assembles the ODE generator A(t) of psi' = A psi in place (for Schrodinger
// evolution A = -i H(t); for Lindblad the vectorized superoperator).
using GeneratorFn = std::function<void(double, Matrix&)>;
// Assembles H(t) in place.
using HamiltonianFn = std::function<void(double, Matrix&)>;

struct PropagationConfig {
  double t_final = 0.0;
  double step = 0.0;
  int sample_stride = 1;
  double norm_tol = 1e-8;
  bool check_hermiticity = true;
  // When set, enforces step <= (2 pi / max_frequency) / 20.
  std::optional<double> max_frequency;
  // Named operators whose expectation values are recorded at each sample.
  std::vector<std::pair<std::string, Matrix>> observables;

  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;        // pure path
  std::vector<Matrix> density;       // mixed path
  std::map<std::string, std::vector<double>> observables;
  bool pure = true;
  double max_norm_defect = 0.0;

  RealVector observable(const std::string& name) const;
  RealVector times_vector() const;
};

// Low-level commutator-free order-4 stepper working on a column block.
class Cf4Stepper {
 public:
  Cf4Stepper(GeneratorFn generator, int dim);
  void step(double t, double h, Matrix& block);

 private:
  void apply_exponential(Matrix& block);
  GeneratorFn generator_;
  int dim_;
  Matrix g1_, g2_, gen_;
  Matrix term_, next_;
};

// Per-sample callback; `block` holds the propagated columns at time t.
using BlockObserver = std::function<void(double, const Matrix&)>;

// Propagates a block of pure states; every column must stay normalized.
// The observer fires every `sample_stride` steps (and at t = 0 and t_final).
void propagate_block(const HamiltonianFn& h, Matrix& block, const PropagationConfig& cfg,
                     const BlockObserver& observer = nullptr);

Trajectory propagate_schrodinger(const HamiltonianFn& h, const QuantumState& psi0,
                                 const PropagationConfig& cfg);

struct SubsystemNoise {
  double t1 = 0.0;  // seconds; <= 0 means no relaxation channel
  double t2 = 0.0;  // seconds; <= 0 means no dephasing channel
};

struct LindbladSpec {
  std::map<std::string, SubsystemNoise> noise;  // keyed by subsystem label

  // Gamma^- = 1/T1, Gamma^z = (1/2)(1/T2 - 1/(2 T1)). Throws ConfigError
  // when T2 > 2 T1 (negative pure dephasing rate).
  double gamma_minus(const std::string& label) const;
  double gamma_z(const std::string& label) const;
  void validate() const;
  bool empty() const;
};

// Jump operators on the full space: sqrt(Gamma^-) a_s and 2 sqrt(Gamma^z)
// a_s^dag a_s per noisy subsystem. The dephasing scaling is fixed so that a
// {0,1} coherence decays at rate 2 Gamma^z, i.e. exactly 1/T2 once the
// relaxation contribution is added.
std::vector<Matrix> collapse_operators(const HilbertSpace& space, const LindbladSpec& spec);

// Vectorized Lindblad generator: L = -i(I (x) H - H^T (x) I) + sum_C
// [conj(C) (x) C - (I (x) C^dag C + (C^dag C)^T (x) I)/2], column-stacking.
Matrix lindblad_dissipator(const HilbertSpace& space, const LindbladSpec& spec);

Trajectory propagate_lindblad(const HamiltonianFn& h, const QuantumState& rho0,
                              const LindbladSpec& spec, const PropagationConfig& cfg,
                              double positivity_floor = 1e-7);

// Uhlmann fidelity Tr(sqrt(sqrt(rho) sigma sqrt(rho)))^2; reduces to
// |<psi|phi>|^2 for pure states.
double state_fidelity(const QuantumState& a, const QuantumState& b);

struct OscillationFit {
  double omega = 0.0;        // rad/s
  double amplitude = 0.0;    // cosine amplitude (half the peak-to-peak)
  double offset = 0.0;
  double residual_rms = 0.0;
};

// FFT peak followed by a local least-squares sinusoid refinement. Throws
// ExtractionError when no spectral peak stands above the noise floor or the
// series covers fewer than two periods.
OscillationFit extract_oscillation_frequency(const RealVector& t, const RealVector& y);

struct GateFidelityResult {
  std::vector<double> times;
  std::vector<double> fidelity;
  double max_fidelity = 0.0;
  double argmax_time = 0.0;
  double max_missing_weight = 0.0;  // leakage + coupler population, worst case
};

// State-averaged gate fidelity F(t) = (1/4) sum_i |<i| U_target v_i(t)|^2 for
// the four computational basis starts of a two-qubit-plus-coupler model. The
// evolved states are reduced to the coupler-ground two-level slice and mapped
// to the frame rotating at `frame_freqs` before the overlap.
GateFidelityResult average_gate_fidelity(const HamiltonianFn& h, const HilbertSpace& space,
                                         const Matrix& u_target,
                                         const std::array<double, 2>& frame_freqs,
                                         const PropagationConfig& cfg,
                                         double window_start = 0.0,
                                         double leakage_threshold = 0.05);

struct CalibrationResult {
  std::array<double, 2> omega_bar{};        // calibrated effective frequencies
  double difference_tone = 0.0;             // contrast-maximizing tone values
  double sum_tone = 0.0;
  double contrast_difference = 0.0;
  double contrast_sum = 0.0;
};

// Scans the two tone frequencies around the analytic predictions and returns
// the effective qubit frequencies from the contrast-maximizing transition
// frequencies (half sum / half difference).
CalibrationResult calibrate_effective_frequencies(const DeviceParams& params,
                                                  const FluxModulation& mod_final,
                                                  double search_halfwidth,
                                                  int grid_points = 7,
                                                  ModelKind kind = ModelKind::two_level);

// Quasi-energy transition frequencies of a periodically modulated model from
// the one-period monodromy operator, unwrapped near the static dressed
// values. `mod` must contain exactly one tone.
std::vector<double> floquet_dressed_frequencies(const DeviceParams& params,
                                                const FluxModulation& mod, ModelKind kind,
                                                int steps_per_period = 1024);

// Per-qubit modulation-induced frequency shifts of one tone at its working
// amplitude. A tone near the difference/sum resonance hybridizes the Floquet
// modes it is meant to characterize, so the shift is measured at two probe
// frequencies detuned symmetrically off `tone_freq` and averaged.
std::vector<double> floquet_modulation_shifts(const DeviceParams& params, ModelKind kind,
                                              double delta, double tone_freq,
                                              double probe_offset = 25.0 * MHz,
                                              int steps_per_period = 1024);

}  // namespace paramsim
