#include "paramsim/device.hpp"

#include <cmath>

#include "paramsim/errors.hpp"

namespace paramsim {

HilbertSpace DeviceParams::space(int dim_override) const {
  std::vector<Subsystem> subsystems;
  for (int j = 0; j < num_qubits(); ++j) {
    const int d = dim_override > 0 ? dim_override : qubits[static_cast<std::size_t>(j)].dim;
    subsystems.push_back({"q" + std::to_string(j + 1), d});
  }
  subsystems.push_back({"c", dim_override > 0 ? dim_override : coupler.dim});
  return HilbertSpace(subsystems);
}

std::vector<std::string> DeviceParams::violations() const {
  std::vector<std::string> out;
  if (qubits.empty()) out.push_back("device has no qubits");
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    const auto& q = qubits[j];
    const std::string tag = "qubit " + std::to_string(j + 1);
    if (!(q.omega > 0)) out.push_back(tag + ": omega must be positive");
    if (!(q.g > 0)) out.push_back(tag + ": g must be positive");
    if (q.dim < 2) out.push_back(tag + ": dim must be >= 2");
  }
  if (!(coupler.omega0 > 0)) out.push_back("coupler: omega0 must be positive");
  if (coupler.dim < 2) out.push_back("coupler: dim must be >= 2");
  if (!(std::abs(theta) < 0.5)) out.push_back("dc bias theta must satisfy |theta| < 0.5");
  return out;
}

std::vector<std::string> DeviceParams::warnings() const {
  std::vector<std::string> out;
  const double wc = coupler_frequency(theta, *this);
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    const auto& q = qubits[j];
    const double delta_minus = q.omega - wc;
    if (std::abs(delta_minus) / q.g < dispersive_min_ratio)
      out.push_back("qubit " + std::to_string(j + 1) +
                    ": dispersive ratio |Delta_-|/g = " +
                    std::to_string(std::abs(delta_minus) / q.g) + " below " +
                    std::to_string(dispersive_min_ratio));
  }
  return out;
}

std::vector<std::string> FluxModulation::violations() const {
  std::vector<std::string> out;
  double excursion = std::abs(theta);
  for (const auto& tone : tones) excursion += std::abs(tone.delta);
  if (!(excursion < 0.5))
    out.push_back("flux excursion |theta| + sum|delta| = " + std::to_string(excursion) +
                  " must stay below 0.5");
  for (std::size_t m = 0; m < tones.size(); ++m)
    if (!(tones[m].omega > 0))
      out.push_back("tone " + std::to_string(m + 1) + ": frequency must be positive");
  return out;
}

double coupler_frequency(double theta_eff, const DeviceParams& params) {
  if (!(std::abs(theta_eff) < 0.5))
    throw ConfigError("flux out of range: |" + std::to_string(theta_eff) + "| >= 0.5");
  return params.coupler.omega0 * std::sqrt(std::abs(std::cos(pi * theta_eff)));
}

double coupler_frequency_derivative(double theta, const DeviceParams& params) {
  if (!(std::abs(theta) < 0.5)) throw ConfigError("flux out of range");
  const double c = std::cos(pi * theta);
  const double s = std::sin(pi * theta);
  return -0.5 * pi * params.coupler.omega0 * s / std::sqrt(c);
}

double coupler_frequency_derivative2(double theta, const DeviceParams& params) {
  if (!(std::abs(theta) < 0.5)) throw ConfigError("flux out of range");
  const double c = std::cos(pi * theta);
  const double s = std::sin(pi * theta);
  return -0.5 * pi * pi * params.coupler.omega0 *
         (std::sqrt(c) + 0.5 * s * s / (c * std::sqrt(c)));
}

double flux_waveform(double t, const FluxModulation& mod) {
  double phi = mod.theta;
  for (const auto& tone : mod.tones) phi += tone.delta * std::cos(tone.omega * t + tone.phase);
  return phi;
}

double CouplerFrequencySeries::evaluate(double t) const {
  Complex value = static_part;
  for (const auto& h : harmonics)
    value += h.amplitude * std::exp(Complex(0, h.frequency * t)) +
             std::conj(h.amplitude) * std::exp(Complex(0, -h.frequency * t));
  return value.real();
}

namespace {

void add_harmonic(std::vector<Harmonic>& table, double freq, Complex amp) {
  if (std::abs(amp) == 0.0) return;
  // Negative mixing frequencies fold back onto the conjugate branch.
  if (freq < 0) {
    freq = -freq;
    amp = std::conj(amp);
  }
  for (auto& h : table) {
    if (std::abs(h.frequency - freq) < 1e-6 * std::max(1.0, freq)) {
      h.amplitude += amp;
      return;
    }
  }
  table.push_back({freq, amp});
}

}  // namespace

CouplerFrequencySeries coupler_frequency_series(const FluxModulation& mod,
                                                const DeviceParams& params, int order) {
  if (order != 1 && order != 2)
    throw ConfigError("coupler_frequency_series: order must be 1 or 2");
  CouplerFrequencySeries series;
  series.static_part = coupler_frequency(mod.theta, params);
  series.derivative1 = coupler_frequency_derivative(mod.theta, params);
  series.derivative2 = coupler_frequency_derivative2(mod.theta, params);

  for (const auto& tone : mod.tones) {
    const Complex phase = std::exp(Complex(0, tone.phase));
    add_harmonic(series.harmonics, tone.omega, 0.5 * series.derivative1 * tone.delta * phase);
  }
  if (order == 2) {
    const std::size_t m_count = mod.tones.size();
    for (std::size_t m = 0; m < m_count; ++m) {
      const auto& tm = mod.tones[m];
      series.static_part += 0.25 * series.derivative2 * tm.delta * tm.delta;
      add_harmonic(series.harmonics, 2.0 * tm.omega,
                   0.125 * series.derivative2 * tm.delta * tm.delta *
                       std::exp(Complex(0, 2.0 * tm.phase)));
      for (std::size_t n = m + 1; n < m_count; ++n) {
        const auto& tn = mod.tones[n];
        const double amp2 = 0.25 * series.derivative2 * tm.delta * tn.delta;
        add_harmonic(series.harmonics, tm.omega + tn.omega,
                     amp2 * std::exp(Complex(0, tm.phase + tn.phase)));
        add_harmonic(series.harmonics, tm.omega - tn.omega,
                     amp2 * std::exp(Complex(0, tm.phase - tn.phase)));
      }
    }
  }
  return series;
}

DriveChannel DriveChannel::off() {
  DriveChannel ch;
  ch.amplitude = [](double) { return 0.0; };
  ch.phase = [](double) { return 0.0; };
  return ch;
}

DriveChannel DriveChannel::constant(double f, double omega_d, double static_phase) {
  DriveChannel ch;
  ch.amplitude = [f](double) { return f; };
  ch.phase = [omega_d](double t) { return omega_d * t; };
  ch.static_phase = static_phase;
  return ch;
}

DriveSpec DriveSpec::off(int num_qubits) {
  DriveSpec spec;
  for (int j = 0; j < num_qubits; ++j) spec.channels.push_back(DriveChannel::off());
  return spec;
}

TransmonHamiltonian::TransmonHamiltonian(const DeviceParams& params,
                                         const FluxModulation& mod, const DriveSpec& drive,
                                         ModelKind kind,
                                         std::function<double(double)> flux_override)
    : params_(params), mod_(mod), drive_(drive), kind_(kind),
      flux_override_(std::move(flux_override)) {
  space_ = params.space(kind == ModelKind::two_level ? 2 : 0);
  if (!drive_.channels.empty() &&
      static_cast<int>(drive_.channels.size()) != params.num_qubits())
    throw ConfigError("drive channel count does not match qubit count");

  const int dim = space_.total_dim();
  h_static_ = Matrix::Zero(dim, dim);

  Matrix coupler_exchange;
  if (kind_ == ModelKind::full) {
    const int dc = space_.dim_of("c");
    const Matrix nc = number_operator(dc);
    coupler_op_ = embed(nc, "c", space_).matrix;
    const Matrix ac = lowering_operator(dc);
    coupler_exchange = embed(ac + ac.adjoint().eval(), "c", space_).matrix;
    h_static_ += 0.5 * params.coupler.anharm *
                 embed((nc * (nc - identity_matrix(dc))).eval(), "c", space_).matrix;
  } else {
    coupler_op_ = embed((-0.5 * pauli_z()).eval(), "c", space_).matrix;
    coupler_exchange = embed(pauli_x(), "c", space_).matrix;
  }

  for (int j = 0; j < params.num_qubits(); ++j) {
    const auto& q = params.qubits[static_cast<std::size_t>(j)];
    const std::string label = "q" + std::to_string(j + 1);
    if (kind_ == ModelKind::full) {
      const int dq = space_.dim_of(label);
      const Matrix nq = number_operator(dq);
      h_static_ += q.omega * embed(nq, label, space_).matrix;
      h_static_ += 0.5 * q.anharm *
                   embed((nq * (nq - identity_matrix(dq))).eval(), label, space_).matrix;
      const Matrix aq = lowering_operator(dq);
      h_static_ += q.g * embed(aq + aq.adjoint().eval(), label, space_).matrix * coupler_exchange;
      raise_ops_.push_back(embed(aq.adjoint().eval(), label, space_).matrix);
    } else {
      h_static_ += -0.5 * q.omega * embed(pauli_z(), label, space_).matrix;
      h_static_ += q.g * embed(pauli_x(), label, space_).matrix * coupler_exchange;
      const Matrix raise = 0.5 * (pauli_x() - imag_unit * pauli_y());  // |1><0|
      raise_ops_.push_back(embed(raise, label, space_).matrix);
    }
  }
}

double TransmonHamiltonian::coupler_frequency_at(double t) const {
  const double flux = flux_override_ ? flux_override_(t) : flux_waveform(t, mod_);
  return coupler_frequency(flux, params_);
}

void TransmonHamiltonian::assemble_into(double t, Matrix& out) const {
  out = h_static_;
  out += coupler_frequency_at(t) * coupler_op_;
  for (std::size_t j = 0; j < drive_.channels.size(); ++j) {
    const auto& ch = drive_.channels[j];
    if (!ch.amplitude) continue;
    const double f = ch.amplitude(t);
    if (f == 0.0) continue;
    const double total_phase = ch.phase(t) + ch.static_phase;
    if (drive_.form == DriveForm::paper) {
      const Complex c = 0.5 * f * std::exp(Complex(0, -total_phase));
      out += c * raise_ops_[j];
      out += std::conj(c) * raise_ops_[j].adjoint();
    } else {
      const double c = f * std::cos(total_phase);
      out += c * (raise_ops_[j] + raise_ops_[j].adjoint().eval());
    }
  }
}

Matrix TransmonHamiltonian::operator()(double t) const {
  Matrix out;
  assemble_into(t, out);
  return out;
}

Operator build_full_hamiltonian(double t, const DeviceParams& params,
                                const FluxModulation& mod, const DriveSpec& drive,
                                const HilbertSpace& space) {
  TransmonHamiltonian h(params, mod, drive, ModelKind::full);
  if (!(h.space() == space))
    throw ConfigError("space does not match device layout (expected q1..qN, c)");
  return Operator{space, h(t)};
}

Operator build_two_level_hamiltonian(double t, const DeviceParams& params,
                                     const FluxModulation& mod, const DriveSpec& drive,
                                     const HilbertSpace& space) {
  TransmonHamiltonian h(params, mod, drive, ModelKind::two_level);
  if (!(h.space() == space))
    throw ConfigError("space does not match device layout (expected q1..qN, c at dim 2)");
  return Operator{space, h(t)};
}

}  // namespace paramsim
