// Parametric-gate benchmark: resonant tone preparation, dynamic extraction of
// the XX coupling strength from exchange oscillations, and the XX-gate
// state-averaged fidelity. Drives stay off throughout.
#pragma once

#include <array>

#include "paramsim/device.hpp"
#include "paramsim/dynamics.hpp"
#include "paramsim/swt.hpp"

namespace paramsim {

// Amplitude of the sum tone that zeroes the second-order Omega_y at fixed
// delta1 (root of the harmonic-balance map; seeded by the first-order ratio).
double ising_delta2(const DeviceParams& params, double delta1);

struct GateModulation {
  FluxModulation mod;                 // tones at the model-matched resonance
  std::array<double, 2> omega_bar{};  // frame frequencies defining the tones
  std::array<double, 2> delta{};
  EffectiveParams first_order;
  EffectiveParams second_order;
};

// Tones at the dressed difference/sum frequencies of the requested model:
// exact static dressed transitions refined per tone by one-period Floquet
// quasi-energies at the working amplitudes.
GateModulation prepare_gate_modulation(const DeviceParams& params, double delta1,
                                       double delta2, ModelKind kind,
                                       bool floquet_refine = true);

struct CouplingExtraction {
  double omega_coupling = 0.0;  // detuning-corrected oscillation frequency
  double omega_raw = 0.0;       // raw fitted oscillation frequency
  double contrast = 0.0;        // peak-to-peak transfer
  OscillationFit fit;
};

// |10> -> |01> exchange oscillation at the prepared tones; the coupling is
// the oscillation frequency corrected by sqrt(contrast) for residual
// detuning.
CouplingExtraction extract_coupling(const DeviceParams& params, const GateModulation& gate,
                                    ModelKind kind, double step = 1.0 * ps,
                                    double periods = 2.2);

struct XxGateBenchmark {
  GateFidelityResult fidelity;
  double gate_time = 0.0;      // pi / Omega_pred
  double infidelity = 0.0;     // 1 - max_t F
};

// Four-basis-state XX-gate benchmark, F(t) sampled densely around the
// expected gate time.
XxGateBenchmark run_xx_gate(const DeviceParams& params, const GateModulation& gate,
                            ModelKind kind, double step = 1.0 * ps);

// Even/odd-parity channel contrasts from a single |10> start: peak-to-peak
// of the exchange population P01 versus the pair-channel weight P00 + P11.
struct ChannelContrasts {
  double exchange_contrast = 0.0;
  double pair_contrast = 0.0;
};
ChannelContrasts channel_contrasts(const DeviceParams& params, const GateModulation& gate,
                                   ModelKind kind, double step = 1.0 * ps,
                                   double periods = 1.1);

}  // namespace paramsim
