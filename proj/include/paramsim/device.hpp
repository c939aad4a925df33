// Device parameterization and lab-frame Hamiltonian construction.
//
// A device is N fixed-frequency transmons coupled to one flux-tunable
// coupler. The coupler frequency follows w_c(t) = w_c0 sqrt(|cos(pi Phi(t))|)
// with Phi the applied flux in units of the flux quantum. Qubit drives are
// described through phase accumulators theta_j(t) so that chirped protocols
// accumulate phase exactly.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "paramsim/operators.hpp"
#include "paramsim/types.hpp"

namespace paramsim {

struct QubitParams {
  double omega = 0.0;    // rad/s
  double anharm = 0.0;   // rad/s, typically negative
  double g = 0.0;        // qubit-coupler coupling, rad/s
  int dim = 3;           // transmon truncation
};

struct CouplerParams {
  double omega0 = 0.0;   // zero-flux frequency, rad/s
  double anharm = 0.0;   // rad/s
  int dim = 3;
};

struct DeviceParams {
  std::vector<QubitParams> qubits;
  CouplerParams coupler;
  double theta = 0.0;                  // dc flux bias, phi0 units
  double dispersive_min_ratio = 3.0;   // warn when |Delta_-|/g drops below

  int num_qubits() const { return static_cast<int>(qubits.size()); }
  // Labels q1, q2, ..., c. dim_override <= 0 keeps the configured dims.
  HilbertSpace space(int dim_override = 0) const;
  // Hard invariant violations (reject) / soft diagnostics (warn).
  std::vector<std::string> violations() const;
  std::vector<std::string> warnings() const;
};

struct Tone {
  double delta = 0.0;   // amplitude, phi0 units
  double omega = 0.0;   // rad/s
  double phase = 0.0;   // rad
};

struct FluxModulation {
  double theta = 0.0;   // phi0 units
  std::vector<Tone> tones;
  int expansion_order = 1;

  std::vector<std::string> violations() const;  // |theta| + sum|delta| < 0.5 etc.
};

// w_c0 sqrt(|cos(pi theta_eff)|). Throws ConfigError for |theta_eff| >= 0.5.
double coupler_frequency(double theta_eff, const DeviceParams& params);

// d w_c / d Phi and d^2 w_c / d Phi^2 at the given bias, |theta| < 0.5.
double coupler_frequency_derivative(double theta, const DeviceParams& params);
double coupler_frequency_derivative2(double theta, const DeviceParams& params);

// theta + sum_m delta_m cos(w_m t + phase_m)
double flux_waveform(double t, const FluxModulation& mod);

// One harmonic of a real signal written as sum_h amp_h exp(i freq_h t); each
// positive-frequency entry is paired with an implicit conjugate at -freq.
struct Harmonic {
  double frequency = 0.0;   // rad/s, > 0
  Complex amplitude{0.0, 0.0};
};

struct CouplerFrequencySeries {
  double static_part = 0.0;         // w_c^theta plus the order-2 static shift
  double derivative1 = 0.0;         // d_Phi w_c at theta
  double derivative2 = 0.0;         // d^2_Phi w_c at theta
  std::vector<Harmonic> harmonics;  // positive-frequency half of the table

  // Reconstructs the truncated w_c(t).
  double evaluate(double t) const;
};

// Taylor expansion of w_c(Phi(t)) around theta in the tone amplitudes.
// order 1: per-tone harmonics at w_m. order 2: adds the static shift, 2 w_m,
// and w_m +/- w_n mixing harmonics.
CouplerFrequencySeries coupler_frequency_series(const FluxModulation& mod,
                                                const DeviceParams& params, int order);

// One microwave drive line. amplitude in rad/s; phase(t) is the accumulated
// integral of the instantaneous drive frequency with phase(0) = 0.
struct DriveChannel {
  std::function<double(double)> amplitude;   // f_j(t)
  std::function<double(double)> phase;       // theta_j(t)
  double static_phase = 0.0;                 // varphi_j

  static DriveChannel off();
  static DriveChannel constant(double f, double omega_d, double static_phase = 0.0);
};

enum class DriveForm {
  paper,    // (f/2)(a^dag e^{-i(theta+phi)} + h.c.)
  cosine,   // f cos(theta+phi) (a + a^dag)
};

struct DriveSpec {
  std::vector<DriveChannel> channels;  // one per qubit; empty means all off
  DriveForm form = DriveForm::paper;

  static DriveSpec off(int num_qubits);
};

enum class ModelKind { full, two_level };

// Cached Hamiltonian assembler for time-propagation loops. The static part,
// the embedded coupler number operator and the drive operators are built
// once; operator()(t) only updates the time-dependent coefficients.
// `flux_override`, when given, replaces flux_waveform(t, mod); protocol
// schedules use it for amplitude-ramped, frequency-chirped tones.
class TransmonHamiltonian {
 public:
  TransmonHamiltonian(const DeviceParams& params, const FluxModulation& mod,
                      const DriveSpec& drive, ModelKind kind,
                      std::function<double(double)> flux_override = nullptr);

  const HilbertSpace& space() const { return space_; }
  Matrix operator()(double t) const;
  void assemble_into(double t, Matrix& out) const;

  // Coefficient of the coupler frequency term at time t (w_c for the full
  // model, -w_c/2 paired with sigma_z for the two-level model).
  double coupler_frequency_at(double t) const;

 private:
  HilbertSpace space_;
  DeviceParams params_;
  FluxModulation mod_;
  DriveSpec drive_;
  ModelKind kind_;
  std::function<double(double)> flux_override_;
  Matrix h_static_;                 // everything except w_c(t) and drives
  Matrix coupler_op_;               // n_c (full) or -sigma_z_c/2 (two-level)
  std::vector<Matrix> raise_ops_;   // embedded a_j^dag
};

// Eq.-level builders used by tests and one-off evaluations.
Operator build_full_hamiltonian(double t, const DeviceParams& params,
                                const FluxModulation& mod, const DriveSpec& drive,
                                const HilbertSpace& space);
Operator build_two_level_hamiltonian(double t, const DeviceParams& params,
                                     const FluxModulation& mod, const DriveSpec& drive,
                                     const HilbertSpace& space);

}  // namespace paramsim
