// Time-dependent Schrieffer-Wolff analytics.
//
// The coupler is eliminated through coefficients alpha_{j,+-}(t) obeying
//   i d/dt alpha + g_j - (w_j +- w_c(t)) alpha = 0.
// Two analytic routes are provided: a Bessel-series solution (first order in
// the modulation amplitudes, exact in lambda) and a harmonic-balance solve of
// the same ODE with the coupler frequency expanded to second order. Both feed
// the effective qubit-qubit coupling amplitudes and dispersive shifts.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "paramsim/device.hpp"
#include "paramsim/types.hpp"

namespace paramsim {

// Qubit-coupler detunings Delta^theta_{j,-} and Delta^theta_{j,+} at the dc
// bias. `qubit` is zero-based; sign is -1 or +1.
double detuning(const DeviceParams& params, int qubit, int sign);

// Effective modulation strength lambda_m = delta_m dPhi(w_c) / w_m per tone.
std::vector<double> modulation_strengths(const DeviceParams& params,
                                         const FluxModulation& mod);

// Fourier content of one alpha_{j,s}(t): static part plus per-tone harmonics
// alpha_bar(k, m), k in [-k_max, k_max] \ {0}.
struct AlphaComponents {
  int k_max = 3;
  Complex static_component{};
  Matrix harmonics;  // (tones) x (2 k_max + 1); column index k + k_max

  Complex harmonic(int k, int m) const { return harmonics(m, k + k_max); }
  // Reconstruction static + sum_{m,k} alpha_bar(k,m) e^{i k w_m t}.
  Complex evaluate(double t, const std::vector<double>& tone_freqs) const;
};

struct SwtTable {
  std::vector<double> lambda;
  std::vector<double> tone_freqs;
  // alpha[j][s] with s = 0 -> sign '-', s = 1 -> sign '+'
  std::vector<std::array<AlphaComponents, 2>> alpha;
  std::vector<std::array<double, 2>> detunings;  // (minus, plus) per qubit
  int k_max = 3;
  int bessel_order = 6;
  double truncation_tail_bound = 0.0;
  std::vector<std::string> warnings;
};

enum class SwtOrder {
  bessel_first,     // Bessel series, first order in delta_m
  harmonic_second,  // harmonic balance, coupler frequency to second order
};

inline constexpr double default_small_denominator_tol = 10.0 * MHz;

// Numerical solution of the alpha ODE on a uniform grid, using the exact
// w_c(t) (no Taylor truncation) and alpha(0) = g_j / Delta^theta_{j,s}.
std::vector<Complex> solve_alpha_ode(const DeviceParams& params, const FluxModulation& mod,
                                     int qubit, int sign, const RealVector& t_grid,
                                     double local_tol = 1e-10);

// Flat-top-windowed projection of uniformly sampled values onto
// e^{i k omega t}; the grid must cover an integer number of periods.
Complex windowed_fourier_component(const RealVector& t_grid,
                                   const std::vector<Complex>& values, int k, double omega);

// Bessel-series solution, bichromatic (M <= 2). Throws SmallDenominatorError
// when a retained denominator |q w1 + p w2 + Delta| drops below tol.
AlphaComponents alpha_series(const DeviceParams& params, const FluxModulation& mod,
                             int qubit, int sign, int k_max = 3, int bessel_order = 6,
                             double small_denominator_tol = default_small_denominator_tol,
                             std::vector<std::string>* warnings = nullptr);

// Closed forms in the limit lambda << 1: k = 0 static part, |k| = 1 per-tone
// fundamental. `tone` selects m for |k| = 1.
Complex weak_modulation_alpha(const DeviceParams& params, const FluxModulation& mod,
                              int qubit, int sign, int k, int tone = 0,
                              std::vector<std::string>* warnings = nullptr);

// Harmonic-balance solve over the lattice {q w1 + p w2 : |q|+|p| <= combo_order}.
AlphaComponents harmonic_balance_alpha(const DeviceParams& params, const FluxModulation& mod,
                                       int qubit, int sign, int k_max = 3,
                                       int combo_order = 4,
                                       double small_denominator_tol = default_small_denominator_tol);

SwtTable build_swt_table(const DeviceParams& params, const FluxModulation& mod,
                         SwtOrder order, int k_max = 3, int bessel_order = 6,
                         double small_denominator_tol = default_small_denominator_tol);

// Dispersively shifted qubit frequencies from the static components,
// w_bar_j = w_j + g_j sum_{s=+-} Re alpha_bar_{j,s}(0).
std::vector<double> dispersive_shifts(const SwtTable& table, const DeviceParams& params);
// Time-resolved variant from the full reconstructed alpha_{j,s}(t).
std::vector<double> dispersive_shifts_at(const SwtTable& table, const DeviceParams& params,
                                         double t);

struct OmegaAmplitudes {
  int k_max = 3;
  Complex static_plus{};   // k = 0 exchange amplitude from the static alphas
  Complex static_minus{};
  Matrix plus;   // Omega_bar^+(k, m), same layout as AlphaComponents::harmonics
  Matrix minus;  // Omega_bar^-(k, m)

  Complex plus_km(int k, int m) const { return plus(m, k + k_max); }
  Complex minus_km(int k, int m) const { return minus(m, k + k_max); }
};

// Omega_bar^{+-}_{ij}(k,m) = [g_i a_{j,-}(-+k,m) + g_j a_{i,-}(k,m)
//                             - g_i a_{j,+}(-+k,m) - g_j a_{i,+}(k,m)] / 2
OmegaAmplitudes coupling_amplitudes(const SwtTable& table, const DeviceParams& params,
                                    int qubit_i = 0, int qubit_j = 1);

struct EffectiveParams {
  std::array<double, 2> omega_bar{};   // rad/s
  std::array<double, 2> epsilon{};     // w^d_j - w_bar_j
  std::array<double, 2> drive_freq{};  // w^d_j used
  Complex omega_x_complex{};
  Complex omega_y_complex{};
  SwtTable table;
  OmegaAmplitudes amplitudes;

  double omega_x() const { return omega_x_complex.real(); }
  double omega_y() const { return omega_y_complex.real(); }
};

// Static two-qubit XX/YY couplings for tones at the drive difference and sum
// frequencies: Omega_x = O^+(-1,1) + O^-(-1,2), Omega_y = O^+(-1,1) - O^-(-1,2).
// Checks the tone/drive resonance condition within `resonance_tol`.
EffectiveParams effective_xy_couplings(const DeviceParams& params, const FluxModulation& mod,
                                       double drive_freq1, double drive_freq2, SwtOrder order,
                                       double resonance_tol = 10.0 * kHz);

// Convenience second-order path (harmonic balance).
EffectiveParams second_order_effective_params(const DeviceParams& params,
                                              const FluxModulation& mod, double drive_freq1,
                                              double drive_freq2);

// First-order Omega_y = 0 condition, Eq.-level closed form in the detunings.
double ising_ratio(const DeviceParams& params);

namespace detail {
double ising_ratio_from_detunings(double d1m, double d1p, double d2m, double d2p);
}

// Bichromatic modulation whose tones sit at the dispersively shifted
// difference/sum frequencies, solved self-consistently at the given
// amplitudes. Drive frequencies for resonant driving come out as
// w^d_j = w_bar_j.
struct ResonantModulation {
  FluxModulation mod;
  std::array<double, 2> omega_bar{};
  std::array<double, 2> drive_freq{};
  EffectiveParams eff;
};
ResonantModulation resonant_modulation(const DeviceParams& params, double delta1,
                                       double delta2, SwtOrder order,
                                       double theta_phase1 = 0.0, double theta_phase2 = 0.0);

struct InversionResult {
  std::array<double, 2> delta{};
  ResonantModulation resonant;   // modulation at the inverted amplitudes
  bool refined = false;
  int newton_iterations = 0;
};

// Modulation amplitudes producing target couplings (J_x, J_y); first-order
// closed form, optionally Newton-refined against the second-order map.
InversionResult invert_target_couplings(double j_x, double j_y, const DeviceParams& params,
                                        bool refine = true);

// Exact dressed frequencies of the static (delta = 0, f = 0) model from dense
// diagonalization: transition energies of the eigenstates with maximal
// overlap on |1_j, vac> relative to the dressed ground state.
std::vector<double> static_dressed_frequencies(const DeviceParams& params, ModelKind kind);

}  // namespace paramsim
