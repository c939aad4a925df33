#include "paramsim/swt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "paramsim/bessel.hpp"
#include "paramsim/errors.hpp"

namespace paramsim {

double detuning(const DeviceParams& params, int qubit, int sign) {
  const double wc = coupler_frequency(params.theta, params);
  return params.qubits.at(static_cast<std::size_t>(qubit)).omega + sign * wc;
}

std::vector<double> modulation_strengths(const DeviceParams& params,
                                         const FluxModulation& mod) {
  const double d1 = coupler_frequency_derivative(mod.theta, params);
  std::vector<double> lambda;
  for (const auto& tone : mod.tones) lambda.push_back(tone.delta * d1 / tone.omega);
  return lambda;
}

Complex AlphaComponents::evaluate(double t, const std::vector<double>& tone_freqs) const {
  Complex value = static_component;
  for (Eigen::Index m = 0; m < harmonics.rows(); ++m) {
    const double wm = tone_freqs.at(static_cast<std::size_t>(m));
    for (int k = -k_max; k <= k_max; ++k) {
      if (k == 0) continue;
      value += harmonics(m, k + k_max) * std::exp(Complex(0, k * wm * t));
    }
  }
  return value;
}

// ---------------------------------------------------------------------------
// alpha ODE, Dormand-Prince 5(4)
// ---------------------------------------------------------------------------

std::vector<Complex> solve_alpha_ode(const DeviceParams& params, const FluxModulation& mod,
                                     int qubit, int sign, const RealVector& t_grid,
                                     double local_tol) {
  if (t_grid.size() < 2) throw ConfigError("solve_alpha_ode: need at least two grid points");
  const double g = params.qubits.at(static_cast<std::size_t>(qubit)).g;
  const auto delta_t = [&](double t) {
    return params.qubits[static_cast<std::size_t>(qubit)].omega +
           sign * coupler_frequency(flux_waveform(t, mod), params);
  };
  const auto rhs = [&](double t, Complex a) {
    return Complex(0, -1) * (delta_t(t) * a - g);
  };

  // Dormand-Prince tableau.
  static const double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static const double a2[] = {1.0 / 5};
  static const double a3[] = {3.0 / 40, 9.0 / 40};
  static const double a4[] = {44.0 / 45, -56.0 / 15, 32.0 / 9};
  static const double a5[] = {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729};
  static const double a6[] = {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
                              -5103.0 / 18656};
  static const double b5[] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
                              11.0 / 84, 0.0};
  static const double b4[] = {5179.0 / 57600, 0.0,         7571.0 / 16695, 393.0 / 640,
                              -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

  std::vector<Complex> out(static_cast<std::size_t>(t_grid.size()));
  Complex y = g / detuning(params, qubit, sign);  // alpha(0) = g / Delta
  out[0] = y;
  double t = t_grid(0);
  double h = (two_pi / std::abs(delta_t(t))) / 50.0;

  for (Eigen::Index i = 1; i < t_grid.size(); ++i) {
    const double t_target = t_grid(i);
    int rejects = 0;
    while (t < t_target) {
      const bool clipped = (t + h >= t_target);
      const double step = clipped ? (t_target - t) : h;
      const Complex k1 = rhs(t, y);
      const Complex k2 = rhs(t + c[1] * step, y + step * (a2[0] * k1));
      const Complex k3 = rhs(t + c[2] * step, y + step * (a3[0] * k1 + a3[1] * k2));
      const Complex k4 =
          rhs(t + c[3] * step, y + step * (a4[0] * k1 + a4[1] * k2 + a4[2] * k3));
      const Complex k5 = rhs(t + c[4] * step,
                             y + step * (a5[0] * k1 + a5[1] * k2 + a5[2] * k3 + a5[3] * k4));
      const Complex k6 =
          rhs(t + c[5] * step,
              y + step * (a6[0] * k1 + a6[1] * k2 + a6[2] * k3 + a6[3] * k4 + a6[4] * k5));
      const Complex y5 = y + step * (b5[0] * k1 + b5[2] * k3 + b5[3] * k4 + b5[4] * k5 +
                                     b5[5] * k6);
      const Complex k7 = rhs(t + step, y5);
      const Complex y4 = y + step * (b4[0] * k1 + b4[2] * k3 + b4[3] * k4 + b4[4] * k5 +
                                     b4[5] * k6 + b4[6] * k7);
      const double err = std::abs(y5 - y4);
      const double scale = local_tol * (1.0 + std::abs(y));
      if (err <= scale || step < 1e-18) {
        t += step;
        y = y5;
        if (!clipped) {
          const double grow = 0.9 * std::pow(scale / std::max(err, 1e-300), 0.2);
          h *= std::clamp(grow, 0.2, 5.0);
        }
        rejects = 0;
      } else {
        h = step * std::clamp(0.9 * std::pow(scale / err, 0.2), 0.1, 0.9);
        if (++rejects > 40)
          throw IntegratorError("solve_alpha_ode: step rejection cascade at t = " +
                                std::to_string(t));
      }
    }
    t = t_target;
    out[static_cast<std::size_t>(i)] = y;
  }
  return out;
}

Complex windowed_fourier_component(const RealVector& t_grid,
                                   const std::vector<Complex>& values, int k, double omega) {
  if (static_cast<std::size_t>(t_grid.size()) != values.size() || values.size() < 8)
    throw ConfigError("windowed_fourier_component: bad sampling");
  static const double a[5] = {0.21557895, 0.41663158, 0.277263158, 0.083578947, 0.006947368};
  const auto n = values.size();
  Complex acc = 0.0;
  double gain = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n);
    double w = a[0];
    for (int q = 1; q < 5; ++q) w += ((q % 2) ? -1.0 : 1.0) * a[q] * std::cos(two_pi * q * x);
    acc += w * values[i] * std::exp(Complex(0, -k * omega * t_grid(static_cast<Eigen::Index>(i))));
    gain += w;
  }
  return acc / gain;
}

// ---------------------------------------------------------------------------
// Bessel series
// ---------------------------------------------------------------------------

namespace {

struct PaddedTones {
  double lambda[2] = {0.0, 0.0};
  double omega[2] = {1.0, 1.0};
  double phase[2] = {0.0, 0.0};
  int count = 0;
};

PaddedTones pad_tones(const DeviceParams& params, const FluxModulation& mod) {
  if (mod.tones.size() > 2)
    throw ConfigError("bessel series supports at most two tones (bichromatic)");
  PaddedTones p;
  p.count = static_cast<int>(mod.tones.size());
  const auto lambda = modulation_strengths(params, mod);
  for (std::size_t m = 0; m < mod.tones.size(); ++m) {
    p.lambda[m] = lambda[m];
    p.omega[m] = mod.tones[m].omega;
    p.phase[m] = mod.tones[m].phase;
  }
  return p;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void check_denominators(const PaddedTones& tones, double delta, int order, double tol) {
  const int q_max = (tones.lambda[0] != 0.0) ? order : 0;
  const int p_max = (tones.lambda[1] != 0.0) ? order : 0;
  for (int q = -q_max; q <= q_max; ++q)
    for (int p = -p_max; p <= p_max; ++p) {
      const double den = q * tones.omega[0] + p * tones.omega[1] + delta;
      if (std::abs(den) < tol)
        throw SmallDenominatorError(
            q, p, den,
            "resonant denominator q w1 + p w2 + Delta = " + std::to_string(den / MHz) +
                " MHz at (q,p) = (" + std::to_string(q) + "," + std::to_string(p) + ")");
    }
}

}  // namespace

AlphaComponents alpha_series(const DeviceParams& params, const FluxModulation& mod,
                             int qubit, int sign, int k_max, int bessel_order,
                             double small_denominator_tol, std::vector<std::string>* warnings) {
  const PaddedTones tones = pad_tones(params, mod);
  const double g = params.qubits.at(static_cast<std::size_t>(qubit)).g;
  const double delta = detuning(params, qubit, sign);
  const double s = static_cast<double>(sign);
  check_denominators(tones, delta, bessel_order, small_denominator_tol);

  AlphaComponents comp;
  comp.k_max = k_max;
  comp.harmonics = Matrix::Zero(std::max(tones.count, 1), 2 * k_max + 1);

  const int q_max = (tones.lambda[0] != 0.0) ? bessel_order : 0;
  const int p_max = (tones.lambda[1] != 0.0) ? bessel_order : 0;

  // Static component: sum_{q,p} Jq(s l1)^2 Jp(s l2)^2 / (q w1 + p w2 + Delta).
  Complex stat = 0.0;
  for (int q = -q_max; q <= q_max; ++q) {
    const double jq = bessel_j(q, s * tones.lambda[0]);
    for (int p = -p_max; p <= p_max; ++p) {
      const double jp = bessel_j(p, s * tones.lambda[1]);
      stat += jq * jq * jp * jp / (q * tones.omega[0] + p * tones.omega[1] + delta);
    }
  }
  comp.static_component = g * stat;

  // Per-tone harmonics: sum_{q,p} J_{k-q}(-s lm) Jq(s lm) Jp(s ln)^2 /
  // (q wm + p wn + Delta), carrying e^{i k phase_m} for nonzero tone phases.
  for (int m = 0; m < tones.count; ++m) {
    const int n = 1 - m;
    const int qm = (tones.lambda[m] != 0.0) ? bessel_order : 0;
    const int pn = (tones.lambda[n] != 0.0) ? bessel_order : 0;
    for (int k = -k_max; k <= k_max; ++k) {
      if (k == 0) continue;
      Complex acc = 0.0;
      for (int q = -qm; q <= qm; ++q) {
        const double jkq = bessel_j(k - q, -s * tones.lambda[m]);
        const double jq = bessel_j(q, s * tones.lambda[m]);
        if (jkq == 0.0 || jq == 0.0) continue;
        for (int p = -pn; p <= pn; ++p) {
          const double jp = bessel_j(p, s * tones.lambda[n]);
          acc += jkq * jq * jp * jp /
                 (q * tones.omega[m] + p * tones.omega[n] + delta);
        }
      }
      comp.harmonics(m, k + k_max) =
          g * acc * std::exp(Complex(0, k * tones.phase[m]));
    }
  }

  if (warnings) {
    const double lam_max = std::max(std::abs(tones.lambda[0]), std::abs(tones.lambda[1]));
    if (lam_max >= 1.0)
      warnings->push_back("modulation strength lambda = " + std::to_string(lam_max) +
                          " outside the perturbative regime");
  }
  return comp;
}

Complex weak_modulation_alpha(const DeviceParams& params, const FluxModulation& mod,
                              int qubit, int sign, int k, int tone,
                              std::vector<std::string>* warnings) {
  const PaddedTones tones = pad_tones(params, mod);
  const double g = params.qubits.at(static_cast<std::size_t>(qubit)).g;
  const double delta = detuning(params, qubit, sign);
  const double s = static_cast<double>(sign);
  if (warnings) {
    for (int m = 0; m < tones.count; ++m)
      if (std::abs(tones.lambda[m]) >= 0.3)
        warnings->push_back("weak-modulation form used at lambda = " +
                            std::to_string(tones.lambda[m]));
  }
  if (k == 0) {
    Complex value = g / delta;
    for (int m = 0; m < tones.count; ++m) {
      const double wm = tones.omega[m];
      if (std::abs(std::abs(delta) - wm) < default_small_denominator_tol)
        throw SmallDenominatorError(
            0, 0, std::abs(delta) - wm,
            "weak-modulation static term resonant: |Delta| close to tone frequency");
      value += 0.5 * g * tones.lambda[m] * tones.lambda[m] * delta /
               (delta * delta - wm * wm);
    }
    return value;
  }
  if (k != 1 && k != -1)
    throw ConfigError("weak_modulation_alpha: closed forms exist for k in {-1, 0, 1}");
  if (tone < 0 || tone >= std::max(tones.count, 1))
    throw ConfigError("weak_modulation_alpha: tone index out of range");
  const double lm = tones.lambda[tone];
  const double wm = tones.omega[tone];
  const double den = k * wm + delta;
  if (std::abs(den) < default_small_denominator_tol)
    throw SmallDenominatorError(k, 0, den, "weak-modulation |k|=1 term resonant");
  const Complex phase = std::exp(Complex(0, k * tones.phase[tone]));
  return s * 0.5 * g * k * (lm / den - lm / delta) * phase;
}

// ---------------------------------------------------------------------------
// Harmonic balance (coupler frequency to second order)
// ---------------------------------------------------------------------------

AlphaComponents harmonic_balance_alpha(const DeviceParams& params, const FluxModulation& mod,
                                       int qubit, int sign, int k_max, int combo_order,
                                       double small_denominator_tol) {
  const int m_count = static_cast<int>(mod.tones.size());
  if (m_count > 2) throw ConfigError("harmonic balance supports at most two tones");
  const double g = params.qubits.at(static_cast<std::size_t>(qubit)).g;
  const double s = static_cast<double>(sign);
  const double d1 = coupler_frequency_derivative(mod.theta, params);
  const double d2 = coupler_frequency_derivative2(mod.theta, params);

  double delta_amp[2] = {0.0, 0.0};
  double omega[2] = {1.0, 1.0};
  double phase[2] = {0.0, 0.0};
  for (int m = 0; m < m_count; ++m) {
    delta_amp[m] = mod.tones[static_cast<std::size_t>(m)].delta;
    omega[m] = mod.tones[static_cast<std::size_t>(m)].omega;
    phase[m] = mod.tones[static_cast<std::size_t>(m)].phase;
  }

  // Static detuning including the second-order flux rectification shift.
  const double wc_static = coupler_frequency(mod.theta, params) +
                           0.25 * d2 * (delta_amp[0] * delta_amp[0] +
                                        delta_amp[1] * delta_amp[1]);
  const double delta_bar = params.qubits.at(static_cast<std::size_t>(qubit)).omega +
                           s * wc_static;

  // Harmonic shifts of the coupler frequency keyed by lattice offset (dq,dp).
  std::map<std::pair<int, int>, Complex> shifts;
  const auto add_shift = [&](int dq, int dp, Complex amp) {
    if (std::abs(amp) == 0.0) return;
    shifts[{dq, dp}] += amp;
    shifts[{-dq, -dp}] += std::conj(amp);
  };
  if (delta_amp[0] != 0.0)
    add_shift(1, 0, 0.5 * d1 * delta_amp[0] * std::exp(Complex(0, phase[0])));
  if (delta_amp[1] != 0.0)
    add_shift(0, 1, 0.5 * d1 * delta_amp[1] * std::exp(Complex(0, phase[1])));
  if (delta_amp[0] != 0.0)
    add_shift(2, 0, 0.125 * d2 * delta_amp[0] * delta_amp[0] *
                        std::exp(Complex(0, 2 * phase[0])));
  if (delta_amp[1] != 0.0)
    add_shift(0, 2, 0.125 * d2 * delta_amp[1] * delta_amp[1] *
                        std::exp(Complex(0, 2 * phase[1])));
  if (delta_amp[0] != 0.0 && delta_amp[1] != 0.0) {
    add_shift(1, 1, 0.25 * d2 * delta_amp[0] * delta_amp[1] *
                        std::exp(Complex(0, phase[0] + phase[1])));
    add_shift(1, -1, 0.25 * d2 * delta_amp[0] * delta_amp[1] *
                         std::exp(Complex(0, phase[0] - phase[1])));
  }

  // Lattice {q w1 + p w2 : |q| + |p| <= combo_order}.
  const int q_span = (m_count >= 1) ? combo_order : 0;
  const int p_span = (m_count >= 2) ? combo_order : 0;
  std::vector<std::pair<int, int>> lattice;
  std::map<std::pair<int, int>, int> index;
  for (int q = -q_span; q <= q_span; ++q)
    for (int p = -p_span; p <= p_span; ++p) {
      if (std::abs(q) + std::abs(p) > combo_order) continue;
      index[{q, p}] = static_cast<int>(lattice.size());
      lattice.emplace_back(q, p);
    }
  const int dim = static_cast<int>(lattice.size());

  for (const auto& [q, p] : lattice) {
    const double nu = q * omega[0] + p * omega[1] + delta_bar;
    if (std::abs(nu) < small_denominator_tol)
      throw SmallDenominatorError(q, p, nu,
                                  "harmonic balance resonant at (q,p) = (" +
                                      std::to_string(q) + "," + std::to_string(p) + ")");
  }
  // Degenerate lattice (rationally related tones colliding inside the window)
  // would make the linear system meaningless.
  for (int u = 0; u < dim; ++u)
    for (int v = u + 1; v < dim; ++v) {
      const double nu_u = lattice[u].first * omega[0] + lattice[u].second * omega[1];
      const double nu_v = lattice[v].first * omega[0] + lattice[v].second * omega[1];
      if (std::abs(nu_u - nu_v) < 1e-6 * std::max(omega[0], omega[1]))
        throw ConfigError("harmonic balance: degenerate tone lattice");
    }

  Matrix system = Matrix::Zero(dim, dim);
  Vector rhs = Vector::Zero(dim);
  for (int u = 0; u < dim; ++u) {
    const auto [q, p] = lattice[static_cast<std::size_t>(u)];
    system(u, u) = q * omega[0] + p * omega[1] + delta_bar;
    for (const auto& [shift, amp] : shifts) {
      const auto it = index.find({q - shift.first, p - shift.second});
      if (it != index.end()) system(u, it->second) += s * amp;
    }
    if (q == 0 && p == 0) rhs(u) = g;
  }

  Eigen::PartialPivLU<Matrix> lu(system);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-12))
    throw IntegratorError("harmonic balance system ill-conditioned, rcond = " +
                          std::to_string(rcond));
  const Vector coeffs = lu.solve(rhs);

  AlphaComponents comp;
  comp.k_max = k_max;
  comp.harmonics = Matrix::Zero(std::max(m_count, 1), 2 * k_max + 1);
  comp.static_component = coeffs(index.at({0, 0}));
  for (int k = -k_max; k <= k_max; ++k) {
    if (k == 0) continue;
    if (m_count >= 1 && std::abs(k) <= combo_order)
      comp.harmonics(0, k + k_max) = coeffs(index.at({k, 0}));
    if (m_count >= 2 && std::abs(k) <= combo_order)
      comp.harmonics(1, k + k_max) = coeffs(index.at({0, k}));
  }
  return comp;
}

// ---------------------------------------------------------------------------
// Tables and effective parameters
// ---------------------------------------------------------------------------

SwtTable build_swt_table(const DeviceParams& params, const FluxModulation& mod,
                         SwtOrder order, int k_max, int bessel_order,
                         double small_denominator_tol) {
  SwtTable table;
  table.k_max = k_max;
  table.bessel_order = bessel_order;
  table.lambda = modulation_strengths(params, mod);
  for (const auto& tone : mod.tones) table.tone_freqs.push_back(tone.omega);

  for (int j = 0; j < params.num_qubits(); ++j) {
    std::array<AlphaComponents, 2> pair;
    std::array<double, 2> dets{detuning(params, j, -1), detuning(params, j, +1)};
    for (int sidx = 0; sidx < 2; ++sidx) {
      const int sign = (sidx == 0) ? -1 : +1;
      pair[static_cast<std::size_t>(sidx)] =
          (order == SwtOrder::bessel_first)
              ? alpha_series(params, mod, j, sign, k_max, bessel_order,
                             small_denominator_tol, &table.warnings)
              : harmonic_balance_alpha(params, mod, j, sign, k_max, 4,
                                       small_denominator_tol);
    }
    table.alpha.push_back(std::move(pair));
    table.detunings.push_back(dets);
  }

  double max_abs = 0.0;
  for (const auto& pair : table.alpha)
    for (const auto& comp : pair) {
      max_abs = std::max(max_abs, std::abs(comp.static_component));
      max_abs = std::max(max_abs, comp.harmonics.cwiseAbs().maxCoeff());
    }
  if (max_abs >= 1.0)
    table.warnings.push_back("SWT coefficient magnitude " + std::to_string(max_abs) +
                             " >= 1: outside the perturbative regime");

  if (order == SwtOrder::bessel_first && !mod.tones.empty()) {
    double tail = 0.0;
    for (double lam : table.lambda)
      tail += std::pow(std::abs(lam) / 2.0, bessel_order + 1) / factorial(bessel_order + 1);
    double g_max = 0.0;
    for (const auto& q : params.qubits) g_max = std::max(g_max, q.g);
    // Dropped terms sit behind denominators no smaller than the guard floor.
    table.truncation_tail_bound = g_max * tail / small_denominator_tol;
  }
  return table;
}

std::vector<double> dispersive_shifts(const SwtTable& table, const DeviceParams& params) {
  std::vector<double> shifted;
  for (int j = 0; j < params.num_qubits(); ++j) {
    const auto& pair = table.alpha.at(static_cast<std::size_t>(j));
    shifted.push_back(params.qubits[static_cast<std::size_t>(j)].omega +
                      params.qubits[static_cast<std::size_t>(j)].g *
                          (pair[0].static_component.real() + pair[1].static_component.real()));
  }
  return shifted;
}

std::vector<double> dispersive_shifts_at(const SwtTable& table, const DeviceParams& params,
                                         double t) {
  std::vector<double> shifted;
  for (int j = 0; j < params.num_qubits(); ++j) {
    const auto& pair = table.alpha.at(static_cast<std::size_t>(j));
    const double re = pair[0].evaluate(t, table.tone_freqs).real() +
                      pair[1].evaluate(t, table.tone_freqs).real();
    shifted.push_back(params.qubits[static_cast<std::size_t>(j)].omega +
                      params.qubits[static_cast<std::size_t>(j)].g * re);
  }
  return shifted;
}

OmegaAmplitudes coupling_amplitudes(const SwtTable& table, const DeviceParams& params,
                                    int qubit_i, int qubit_j) {
  const auto& ai = table.alpha.at(static_cast<std::size_t>(qubit_i));
  const auto& aj = table.alpha.at(static_cast<std::size_t>(qubit_j));
  const double gi = params.qubits.at(static_cast<std::size_t>(qubit_i)).g;
  const double gj = params.qubits.at(static_cast<std::size_t>(qubit_j)).g;
  const int k_max = table.k_max;
  const int m_count = static_cast<int>(std::max<std::size_t>(table.tone_freqs.size(), 1));

  OmegaAmplitudes amps;
  amps.k_max = k_max;
  amps.plus = Matrix::Zero(m_count, 2 * k_max + 1);
  amps.minus = Matrix::Zero(m_count, 2 * k_max + 1);

  amps.static_plus = 0.5 * (gi * aj[0].static_component + gj * ai[0].static_component -
                            gi * aj[1].static_component - gj * ai[1].static_component);
  amps.static_minus = amps.static_plus;

  for (int m = 0; m < static_cast<int>(table.tone_freqs.size()); ++m) {
    for (int k = -k_max; k <= k_max; ++k) {
      if (k == 0) continue;
      amps.plus(m, k + k_max) =
          0.5 * (gi * aj[0].harmonic(-k, m) + gj * ai[0].harmonic(k, m) -
                 gi * aj[1].harmonic(-k, m) - gj * ai[1].harmonic(k, m));
      amps.minus(m, k + k_max) =
          0.5 * (gi * aj[0].harmonic(k, m) + gj * ai[0].harmonic(k, m) -
                 gi * aj[1].harmonic(k, m) - gj * ai[1].harmonic(k, m));
    }
  }
  return amps;
}

EffectiveParams effective_xy_couplings(const DeviceParams& params, const FluxModulation& mod,
                                       double drive_freq1, double drive_freq2, SwtOrder order,
                                       double resonance_tol) {
  if (params.num_qubits() != 2)
    throw ConfigError("effective_xy_couplings requires exactly two qubits");
  if (mod.tones.size() != 2)
    throw ConfigError("effective_xy_couplings requires two tones (difference and sum)");
  const double diff = drive_freq1 - drive_freq2;
  const double sum = drive_freq1 + drive_freq2;
  if (std::abs(mod.tones[0].omega - diff) > resonance_tol ||
      std::abs(mod.tones[1].omega - sum) > resonance_tol)
    throw ConfigError(
        "tone frequencies are not at the drive difference/sum: got (" +
        std::to_string(mod.tones[0].omega / GHz) + ", " +
        std::to_string(mod.tones[1].omega / GHz) + ") GHz, expected (" +
        std::to_string(diff / GHz) + ", " + std::to_string(sum / GHz) + ") GHz");

  EffectiveParams eff;
  eff.table = build_swt_table(params, mod, order);
  eff.amplitudes = coupling_amplitudes(eff.table, params, 0, 1);
  const auto shifts = dispersive_shifts(eff.table, params);
  eff.omega_bar = {shifts[0], shifts[1]};
  eff.drive_freq = {drive_freq1, drive_freq2};
  eff.epsilon = {drive_freq1 - shifts[0], drive_freq2 - shifts[1]};
  eff.omega_x_complex = eff.amplitudes.plus_km(-1, 0) + eff.amplitudes.minus_km(-1, 1);
  eff.omega_y_complex = eff.amplitudes.plus_km(-1, 0) - eff.amplitudes.minus_km(-1, 1);
  return eff;
}

EffectiveParams second_order_effective_params(const DeviceParams& params,
                                              const FluxModulation& mod, double drive_freq1,
                                              double drive_freq2) {
  return effective_xy_couplings(params, mod, drive_freq1, drive_freq2,
                                SwtOrder::harmonic_second);
}

namespace detail {
double ising_ratio_from_detunings(double d1m, double d1p, double d2m, double d2p) {
  const double num = d1m * d2p + d1p * d2m;
  const double den = d1m * d2m + d1p * d2p;
  const double scale = std::max({std::abs(d1m * d2p), std::abs(d1p * d2m),
                                 std::abs(d1m * d2m), std::abs(d1p * d2p)});
  if (std::abs(den) < 1e-12 * scale)
    throw SmallDenominatorError(0, 0, den, "ising ratio denominator vanishes");
  return -num / den;
}
}  // namespace detail

double ising_ratio(const DeviceParams& params) {
  if (params.num_qubits() != 2) throw ConfigError("ising_ratio requires exactly two qubits");
  return detail::ising_ratio_from_detunings(detuning(params, 0, -1), detuning(params, 0, +1),
                                            detuning(params, 1, -1), detuning(params, 1, +1));
}

ResonantModulation resonant_modulation(const DeviceParams& params, double delta1,
                                       double delta2, SwtOrder order, double theta_phase1,
                                       double theta_phase2) {
  if (params.num_qubits() != 2)
    throw ConfigError("resonant_modulation requires exactly two qubits");
  // Start from the delta = 0 dispersive shifts and iterate tones to the
  // self-consistent difference/sum frequencies.
  std::array<double, 2> wbar;
  for (int j = 0; j < 2; ++j) {
    const double g = params.qubits[static_cast<std::size_t>(j)].g;
    wbar[static_cast<std::size_t>(j)] =
        params.qubits[static_cast<std::size_t>(j)].omega +
        g * g * (1.0 / detuning(params, j, -1) + 1.0 / detuning(params, j, +1));
  }
  ResonantModulation out;
  for (int iter = 0; iter < 8; ++iter) {
    if (!(wbar[0] > wbar[1]))
      throw ConfigError("resonant_modulation assumes w_bar_1 > w_bar_2");
    FluxModulation mod;
    mod.theta = params.theta;
    mod.tones = {{delta1, wbar[0] - wbar[1], theta_phase1},
                 {delta2, wbar[0] + wbar[1], theta_phase2}};
    out.eff = effective_xy_couplings(params, mod, wbar[0], wbar[1], order);
    out.mod = mod;
    const double move = std::max(std::abs(out.eff.omega_bar[0] - wbar[0]),
                                 std::abs(out.eff.omega_bar[1] - wbar[1]));
    wbar = out.eff.omega_bar;
    if (move < two_pi * 1e-3) break;  // 1 mHz
  }
  out.omega_bar = wbar;
  out.drive_freq = wbar;
  out.mod.tones[0].omega = wbar[0] - wbar[1];
  out.mod.tones[1].omega = wbar[0] + wbar[1];
  return out;
}

InversionResult invert_target_couplings(double j_x, double j_y, const DeviceParams& params,
                                        bool refine) {
  if (params.num_qubits() != 2)
    throw ConfigError("invert_target_couplings requires exactly two qubits");
  const double d1m = detuning(params, 0, -1), d1p = detuning(params, 0, +1);
  const double d2m = detuning(params, 1, -1), d2p = detuning(params, 1, +1);
  const double g1 = params.qubits[0].g, g2 = params.qubits[1].g;
  const double dwc = coupler_frequency_derivative(params.theta, params);
  const double prod = d1m * d1p * d2m * d2p;

  InversionResult result;
  result.delta[0] = (j_x + j_y) / (g1 * g2 * dwc) * prod / (d1m * d2m + d1p * d2p);
  // Sign convention: the sum-tone amplitude enters Omega^- with a leading
  // minus, so the closed-form inversion for delta_2 carries one as well.
  result.delta[1] = -(j_x - j_y) / (g1 * g2 * dwc) * prod / (d1m * d2p + d1p * d2m);

  const auto check_physical = [&](const std::array<double, 2>& d) {
    if (std::abs(params.theta) + std::abs(d[0]) + std::abs(d[1]) >= 0.5)
      throw ConfigError("inverted modulation amplitudes exceed the flux arc: |theta| + "
                        "|delta1| + |delta2| >= 0.5");
  };
  check_physical(result.delta);

  if (j_x == 0.0 && j_y == 0.0) {
    result.resonant = resonant_modulation(params, 0.0, 0.0, SwtOrder::harmonic_second);
    return result;
  }

  if (refine) {
    const double target_scale = std::max(std::abs(j_x), std::abs(j_y));
    std::array<double, 2> d = result.delta;
    for (int iter = 0; iter < 8; ++iter) {
      const auto eval = [&](const std::array<double, 2>& dd) {
        const auto r = resonant_modulation(params, dd[0], dd[1], SwtOrder::harmonic_second);
        return std::array<double, 2>{r.eff.omega_x(), r.eff.omega_y()};
      };
      const auto f0 = eval(d);
      const std::array<double, 2> residual{f0[0] - j_x, f0[1] - j_y};
      const double err = std::max(std::abs(residual[0]), std::abs(residual[1]));
      result.newton_iterations = iter;
      if (err < 1e-8 * target_scale) break;
      Eigen::Matrix2d jac;
      for (int col = 0; col < 2; ++col) {
        std::array<double, 2> dh = d;
        const double h = std::max(1e-7, 1e-4 * std::abs(d[static_cast<std::size_t>(col)]));
        dh[static_cast<std::size_t>(col)] += h;
        const auto fh = eval(dh);
        jac(0, col) = (fh[0] - f0[0]) / h;
        jac(1, col) = (fh[1] - f0[1]) / h;
      }
      const Eigen::Vector2d step = jac.partialPivLu().solve(
          Eigen::Vector2d(residual[0], residual[1]));
      d[0] -= step(0);
      d[1] -= step(1);
      check_physical(d);
    }
    result.delta = d;
    result.refined = true;
  }
  result.resonant =
      resonant_modulation(params, result.delta[0], result.delta[1], SwtOrder::harmonic_second);
  return result;
}

std::vector<double> static_dressed_frequencies(const DeviceParams& params, ModelKind kind) {
  FluxModulation mod;
  mod.theta = params.theta;
  const TransmonHamiltonian h(params, mod, DriveSpec::off(params.num_qubits()), kind);
  const Matrix h0 = h(0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h0);
  const HilbertSpace& space = h.space();

  const auto find_level = [&](const std::vector<int>& levels) {
    const Vector psi = QuantumState::basis_state(space, levels).state_vector();
    int best = 0;
    double best_overlap = -1.0;
    for (int k = 0; k < es.eigenvectors().cols(); ++k) {
      const double overlap = std::norm(psi.dot(es.eigenvectors().col(k)));
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = k;
      }
    }
    return es.eigenvalues()(best);
  };

  std::vector<int> ground(static_cast<std::size_t>(space.size()), 0);
  const double e0 = find_level(ground);
  std::vector<double> freqs;
  for (int j = 0; j < params.num_qubits(); ++j) {
    std::vector<int> excited = ground;
    excited[static_cast<std::size_t>(j)] = 1;
    freqs.push_back(find_level(excited) - e0);
  }
  return freqs;
}

}  // namespace paramsim
