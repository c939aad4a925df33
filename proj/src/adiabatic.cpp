#include "paramsim/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include <Eigen/Eigenvalues>

#include "paramsim/errors.hpp"

namespace paramsim {

TargetHamiltonian TargetHamiltonian::molecule_row(double a_y, double j_x, double j_y) {
  TargetHamiltonian t;
  t.c = {a_y, a_y};
  t.j_x = j_x;
  t.j_y = j_y;
  return t;
}

Matrix TargetHamiltonian::matrix() const {
  const HilbertSpace space({{"q1", 2}, {"q2", 2}});
  Matrix h = Matrix::Zero(4, 4);
  const char* labels[2] = {"q1", "q2"};
  for (int j = 0; j < 2; ++j) {
    h += a[static_cast<std::size_t>(j)] * embed(pauli_z(), labels[j], space).matrix;
    h += b[static_cast<std::size_t>(j)] * embed(pauli_x(), labels[j], space).matrix;
    h += c[static_cast<std::size_t>(j)] * embed(pauli_y(), labels[j], space).matrix;
  }
  h += j_x * kron(pauli_x(), pauli_x());
  h += j_y * kron(pauli_y(), pauli_y());
  return h;
}

TargetHamiltonian::Spectrum TargetHamiltonian::diagonalize() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix());
  Spectrum s;
  s.eigenvalues = es.eigenvalues();
  s.ground_state = es.eigenvectors().col(0);
  s.gap = es.eigenvalues()(1) - es.eigenvalues()(0);
  return s;
}

double energy_estimate(const QuantumState& state, const TargetHamiltonian& target) {
  if (state.space().total_dim() != 4)
    throw ConfigError("energy estimator expects a two-qubit state");
  const HilbertSpace space({{"q1", 2}, {"q2", 2}});
  double e = 0.0;
  const char* labels[2] = {"q1", "q2"};
  for (int j = 0; j < 2; ++j) {
    if (target.a[static_cast<std::size_t>(j)] != 0.0)
      e += target.a[static_cast<std::size_t>(j)] *
           expectation_value(state, embed(pauli_z(), labels[j], space).matrix);
    if (target.b[static_cast<std::size_t>(j)] != 0.0)
      e += target.b[static_cast<std::size_t>(j)] *
           expectation_value(state, embed(pauli_x(), labels[j], space).matrix);
    if (target.c[static_cast<std::size_t>(j)] != 0.0)
      e += target.c[static_cast<std::size_t>(j)] *
           expectation_value(state, embed(pauli_y(), labels[j], space).matrix);
  }
  if (target.j_x != 0.0)
    e += target.j_x * expectation_value(state, kron(pauli_x(), pauli_x()));
  if (target.j_y != 0.0)
    e += target.j_y * expectation_value(state, kron(pauli_y(), pauli_y()));
  return e;
}

// ---------------------------------------------------------------------------
// Schedule
// ---------------------------------------------------------------------------

double ProtocolSchedule::drive_amp(int j, double t) const {
  return drive_amp_final[static_cast<std::size_t>(j)] * (t / t_total);
}

double ProtocolSchedule::modulation_amp(int m, double t) const {
  return delta_final[static_cast<std::size_t>(m)] * (t / t_total);
}

double ProtocolSchedule::drive_frequency(int j, double t,
                                         const std::array<double, 2>& wbar) const {
  return wbar[static_cast<std::size_t>(j)] - eps0 * (1.0 - t / t_total);
}

double ProtocolSchedule::drive_phase_integral(int j, double t,
                                              const std::array<double, 2>& wbar) const {
  return (wbar[static_cast<std::size_t>(j)] - eps0) * t +
         0.5 * eps0 * t * t / t_total;
}

double ProtocolSchedule::tone_frequency(int m, double t,
                                        const std::array<double, 2>& wbar) const {
  if (m == 0) return wbar[0] - wbar[1];
  return wbar[0] + wbar[1] - 2.0 * eps0 * (1.0 - t / t_total);
}

double ProtocolSchedule::tone_phase_integral(int m, double t,
                                             const std::array<double, 2>& wbar) const {
  if (m == 0) return (wbar[0] - wbar[1]) * t;
  return drive_phase_integral(0, t, wbar) + drive_phase_integral(1, t, wbar);
}

double ProtocolSchedule::flux(double t, const std::array<double, 2>& wbar) const {
  double phi = 0.0;
  for (int m = 0; m < 2; ++m)
    phi += modulation_amp(m, t) * std::cos(tone_phase_integral(m, t, wbar));
  return phi;
}

ProtocolSchedule::TrackPoint ProtocolSchedule::track_at(double s) const {
  if (track.empty()) throw ConfigError("schedule track not built");
  s = std::clamp(s, 0.0, 1.0);
  const double pos = s * (track.size() - 1);
  const std::size_t i0 = static_cast<std::size_t>(std::floor(pos));
  const std::size_t i1 = std::min(i0 + 1, track.size() - 1);
  const double w = pos - static_cast<double>(i0);
  const TrackPoint& p0 = track[i0];
  const TrackPoint& p1 = track[i1];
  TrackPoint out;
  out.s = s;
  out.omega_x = (1 - w) * p0.omega_x + w * p1.omega_x;
  out.omega_y = (1 - w) * p0.omega_y + w * p1.omega_y;
  out.omega_bar1 = (1 - w) * p0.omega_bar1 + w * p1.omega_bar1;
  out.omega_bar2 = (1 - w) * p0.omega_bar2 + w * p1.omega_bar2;
  out.epsilon1 = (1 - w) * p0.epsilon1 + w * p1.epsilon1;
  out.epsilon2 = (1 - w) * p0.epsilon2 + w * p1.epsilon2;
  return out;
}

ProtocolSchedule ProtocolSchedule::with_total_time(double t) const {
  if (!(t > 0)) throw ConfigError("protocol time T must be positive");
  ProtocolSchedule out = *this;
  out.t_total = t;
  return out;
}

ProtocolSchedule build_schedule(const TargetHamiltonian& target, const DeviceParams& params,
                                double t_total, const ScheduleOptions& opts) {
  if (!(t_total > 0)) throw ConfigError("protocol time T must be positive");
  if (target.a[0] != 0.0 || target.a[1] != 0.0)
    throw ConfigError("linear protocol supports vanishing sigma_z target terms only");

  ProtocolSchedule schedule;
  schedule.t_total = t_total;
  schedule.eps0 = opts.eps0;
  schedule.target = target;
  for (int j = 0; j < 2; ++j) {
    const double bj = target.b[static_cast<std::size_t>(j)];
    const double cj = target.c[static_cast<std::size_t>(j)];
    schedule.drive_amp_final[static_cast<std::size_t>(j)] = std::hypot(bj, cj);
    schedule.drive_phase[static_cast<std::size_t>(j)] =
        (bj == 0.0 && cj == 0.0) ? 0.0 : -std::atan2(cj, bj);
  }

  const auto inversion = invert_target_couplings(target.j_x, target.j_y, params, true);
  schedule.delta_final = inversion.delta;
  schedule.omega_bar_swt = inversion.resonant.omega_bar;

  // Effective-parameter track along s = t/T.
  const int nodes = std::max(9, opts.track_nodes);
  schedule.track.resize(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    const double s = static_cast<double>(i) / (nodes - 1);
    ProtocolSchedule::TrackPoint point;
    point.s = s;
    const double wd1 = schedule.omega_bar_swt[0] - opts.eps0 * (1.0 - s);
    const double wd2 = schedule.omega_bar_swt[1] - opts.eps0 * (1.0 - s);
    if (s == 0.0 || (schedule.delta_final[0] == 0.0 && schedule.delta_final[1] == 0.0)) {
      FluxModulation mod0;
      mod0.theta = params.theta;
      mod0.tones = {{0.0, wd1 - wd2, 0.0}, {0.0, wd1 + wd2, 0.0}};
      const auto eff = effective_xy_couplings(params, mod0, wd1, wd2,
                                              SwtOrder::harmonic_second);
      point.omega_x = eff.omega_x();
      point.omega_y = eff.omega_y();
      point.omega_bar1 = eff.omega_bar[0];
      point.omega_bar2 = eff.omega_bar[1];
      point.epsilon1 = eff.epsilon[0];
      point.epsilon2 = eff.epsilon[1];
    } else {
      FluxModulation mod;
      mod.theta = params.theta;
      mod.tones = {{schedule.delta_final[0] * s, wd1 - wd2, 0.0},
                   {schedule.delta_final[1] * s, wd1 + wd2, 0.0}};
      const auto eff =
          effective_xy_couplings(params, mod, wd1, wd2, SwtOrder::harmonic_second);
      point.omega_x = eff.omega_x();
      point.omega_y = eff.omega_y();
      point.omega_bar1 = eff.omega_bar[0];
      point.omega_bar2 = eff.omega_bar[1];
      point.epsilon1 = eff.epsilon[0];
      point.epsilon2 = eff.epsilon[1];
    }
    schedule.track[static_cast<std::size_t>(i)] = point;
  }

  schedule.omega_bar_full = schedule.omega_bar_swt;
  schedule.omega_bar_two_level = schedule.omega_bar_swt;
  if (opts.with_full_frequencies) {
    // Model-matched end-of-ramp frequencies: exact static dressed transition
    // plus the modulation-induced part of the SWT shift (or a Floquet /
    // calibration refinement on top).
    const auto swt_static = [&]() {
      FluxModulation mod0;
      mod0.theta = params.theta;
      mod0.tones = {{0.0, schedule.omega_bar_swt[0] - schedule.omega_bar_swt[1], 0.0},
                    {0.0, schedule.omega_bar_swt[0] + schedule.omega_bar_swt[1], 0.0}};
      const auto eff = effective_xy_couplings(params, mod0, schedule.omega_bar_swt[0],
                                              schedule.omega_bar_swt[1],
                                              SwtOrder::harmonic_second);
      return eff.omega_bar;
    }();

    for (const ModelKind kind : {ModelKind::full, ModelKind::two_level}) {
      const auto dressed = static_dressed_frequencies(params, kind);
      std::array<double, 2> wbar{};
      for (int j = 0; j < 2; ++j)
        wbar[static_cast<std::size_t>(j)] =
            dressed[static_cast<std::size_t>(j)] +
            (schedule.omega_bar_swt[static_cast<std::size_t>(j)] -
             swt_static[static_cast<std::size_t>(j)]);

      if (opts.floquet_refine &&
          (schedule.delta_final[0] != 0.0 || schedule.delta_final[1] != 0.0)) {
        for (int pass = 0; pass < 2; ++pass) {
          std::array<double, 2> shift{0.0, 0.0};
          for (int m = 0; m < 2; ++m) {
            if (schedule.delta_final[static_cast<std::size_t>(m)] == 0.0) continue;
            const auto fq = floquet_modulation_shifts(
                params, kind, schedule.delta_final[static_cast<std::size_t>(m)],
                (m == 0) ? wbar[0] - wbar[1] : wbar[0] + wbar[1]);
            for (int j = 0; j < 2; ++j)
              shift[static_cast<std::size_t>(j)] += fq[static_cast<std::size_t>(j)];
          }
          for (int j = 0; j < 2; ++j)
            wbar[static_cast<std::size_t>(j)] =
                dressed[static_cast<std::size_t>(j)] + shift[static_cast<std::size_t>(j)];
        }
      }
      if (kind == ModelKind::full)
        schedule.omega_bar_full = wbar;
      else
        schedule.omega_bar_two_level = wbar;
    }

    if (opts.calibrate &&
        (schedule.delta_final[0] != 0.0 || schedule.delta_final[1] != 0.0)) {
      FluxModulation mod_final;
      mod_final.theta = params.theta;
      mod_final.tones = {
          {schedule.delta_final[0], schedule.omega_bar_full[0] - schedule.omega_bar_full[1],
           0.0},
          {schedule.delta_final[1], schedule.omega_bar_full[0] + schedule.omega_bar_full[1],
           0.0}};
      const auto cal = calibrate_effective_frequencies(params, mod_final,
                                                       opts.calibration_halfwidth, 7,
                                                       ModelKind::full);
      schedule.omega_bar_full = cal.omega_bar;
    }
  }
  return schedule;
}

// ---------------------------------------------------------------------------
// Gap analysis
// ---------------------------------------------------------------------------

namespace {

Matrix effective_hamiltonian_4x4(const ProtocolSchedule& schedule, double t) {
  const auto point = schedule.track_at(t / schedule.t_total);
  Matrix h = Matrix::Zero(4, 4);
  const Matrix sz = pauli_z(), sx = pauli_x(), sy = pauli_y();
  const Matrix eye = identity_matrix(2);
  const double eps[2] = {point.epsilon1, point.epsilon2};
  for (int j = 0; j < 2; ++j) {
    const double f = schedule.drive_amp(j, t);
    const double phi = schedule.drive_phase[static_cast<std::size_t>(j)];
    Matrix local = 0.5 * eps[j] * sz +
                   0.5 * f * (std::cos(phi) * sx - std::sin(phi) * sy);
    h += (j == 0) ? kron(local, eye) : kron(eye, local);
  }
  h += 0.5 * point.omega_x * kron(sx, sx);
  h += 0.5 * point.omega_y * kron(sy, sy);
  return h;
}

}  // namespace

GapSeries gap_series(const ProtocolSchedule& schedule, int samples) {
  GapSeries series;
  series.s.resize(samples);
  series.gap.resize(samples);
  series.min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double s = static_cast<double>(i) / (samples - 1);
    const Matrix h = effective_hamiltonian_4x4(schedule, s * schedule.t_total);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    series.s(i) = s;
    series.gap(i) = es.eigenvalues()(1) - es.eigenvalues()(0);
    series.min_gap = std::min(series.min_gap, series.gap(i));
  }
  return series;
}

// ---------------------------------------------------------------------------
// Noise mapping
// ---------------------------------------------------------------------------

LindbladSpec effective_noise_spec(const DeviceParams& params, const LindbladSpec& full_spec) {
  full_spec.validate();
  const double gm_c = full_spec.gamma_minus("c");
  const double gz_c = full_spec.gamma_z("c");
  LindbladSpec eff;
  for (int j = 0; j < params.num_qubits(); ++j) {
    const std::string label = "q" + std::to_string(j + 1);
    const double participation = std::pow(
        params.qubits[static_cast<std::size_t>(j)].g / detuning(params, j, -1), 2);
    // Coupler relaxation leaks in with weight |alpha|^2; coupler dephasing
    // induces an exchange jump at its full (sigma_z-normalized) rate 4 Gz.
    const double gm_eff = full_spec.gamma_minus(label) +
                          participation * (gm_c + 4.0 * gz_c);
    const double gz_eff = full_spec.gamma_z(label);
    if (gm_eff <= 0.0 && gz_eff <= 0.0) continue;
    SubsystemNoise n;
    n.t1 = (gm_eff > 0.0) ? 1.0 / gm_eff : 0.0;
    if (gz_eff > 0.0) {
      const double inv_t1 = (n.t1 > 0.0) ? 1.0 / n.t1 : 0.0;
      n.t2 = 1.0 / (2.0 * gz_eff + 0.5 * inv_t1);
    } else if (n.t1 > 0.0) {
      n.t2 = 2.0 * n.t1;
    }
    eff.noise[label] = n;
  }
  return eff;
}

// ---------------------------------------------------------------------------
// Protocol runs
// ---------------------------------------------------------------------------

namespace {

struct ExtractedState {
  QuantumState state;  // two-qubit rotating-frame state
  double leakage = 0.0;
  double coupler_population = 0.0;
};

ExtractedState extract_two_qubit_state(const QuantumState& full_state,
                                       const ProtocolSchedule& schedule,
                                       const std::array<double, 2>& wbar, double t,
                                       double leakage_threshold) {
  ExtractedState out;
  const auto coupler_number = embed(number_operator(full_state.space().dim_of("c")), "c",
                                    full_state.space());
  out.coupler_population = expectation_value(full_state, coupler_number.matrix);
  const auto reduced = partial_trace(full_state, {"q1", "q2"});
  const auto projected = project_two_level(reduced, leakage_threshold);
  out.leakage = projected.leakage;
  const std::map<std::string, double> phases = {
      {"q1", schedule.drive_phase_integral(0, t, wbar)},
      {"q2", schedule.drive_phase_integral(1, t, wbar)}};
  out.state = apply_frame(projected.state, phases);
  return out;
}

AnnealResult measure(const QuantumState& two_qubit_state, const ProtocolSchedule& schedule) {
  AnnealResult result;
  result.final_state = two_qubit_state;
  result.energy = energy_estimate(two_qubit_state, schedule.target);
  const auto spectrum = schedule.target.diagonalize();
  result.exact_ground_energy = spectrum.eigenvalues(0);
  result.delta_e = result.energy - result.exact_ground_energy;
  const HilbertSpace qubit_space({{"q1", 2}, {"q2", 2}});
  result.fidelity = state_fidelity(
      two_qubit_state, QuantumState::pure(qubit_space, spectrum.ground_state));
  result.min_gap = gap_series(schedule, 201).min_gap;
  return result;
}

AnnealResult run_effective(const ProtocolSchedule& schedule, const DeviceParams& params,
                           const RunOptions& opts) {
  const HilbertSpace space({{"q1", 2}, {"q2", 2}});
  const HamiltonianFn h = [&](double t, Matrix& out) {
    out = effective_hamiltonian_4x4(schedule, t);
  };

  // Fastest effective scale: detunings, drive amplitudes and couplings are
  // all of order eps0; resolve generously.
  double scale = std::abs(schedule.eps0);
  for (const auto& p : schedule.track) {
    scale = std::max({scale, std::abs(p.epsilon1), std::abs(p.epsilon2),
                      std::abs(p.omega_x), std::abs(p.omega_y)});
  }
  scale = std::max(scale, std::max(schedule.drive_amp_final[0], schedule.drive_amp_final[1]));
  PropagationConfig cfg;
  cfg.t_final = schedule.t_total;
  cfg.step = (opts.step > 0) ? opts.step
                             : std::min((two_pi / scale) / 40.0, schedule.t_total / 400.0);
  cfg.max_frequency = scale;
  cfg.sample_stride = opts.sample_stride;

  // Ground state of the t = 0 effective Hamiltonian.
  Matrix h0(4, 4);
  h(0.0, h0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h0);
  const Vector ground = es.eigenvectors().col(0);

  AnnealResult result;
  if (opts.mode == RunMode::unitary) {
    const auto traj =
        propagate_schrodinger(h, QuantumState::pure(space, ground), cfg);
    result = measure(QuantumState::pure(space, traj.states.back()), schedule);
    result.norm_defect = traj.max_norm_defect;
  } else {
    const auto spec = effective_noise_spec(params, opts.noise);
    const auto traj = propagate_lindblad(
        h, QuantumState::mixed(space, ground * ground.adjoint()), spec, cfg);
    result = measure(QuantumState::mixed(space, traj.density.back()), schedule);
    result.norm_defect = traj.max_norm_defect;
  }
  result.diagnostics["step"] = cfg.step;
  return result;
}

AnnealResult run_full(const ProtocolSchedule& schedule, const DeviceParams& params,
                      const RunOptions& opts) {
  const std::array<double, 2> wbar = schedule.omega_bar_full;
  DriveSpec drive;
  for (int j = 0; j < 2; ++j) {
    DriveChannel ch;
    const double amp_final = schedule.drive_amp_final[static_cast<std::size_t>(j)];
    const double t_total = schedule.t_total;
    ch.amplitude = [amp_final, t_total](double t) { return amp_final * t / t_total; };
    ch.phase = [&schedule, wbar, j](double t) {
      return schedule.drive_phase_integral(j, t, wbar);
    };
    ch.static_phase = schedule.drive_phase[static_cast<std::size_t>(j)];
    drive.channels.push_back(std::move(ch));
  }
  FluxModulation mod;
  mod.theta = params.theta;
  mod.tones = {{schedule.delta_final[0], wbar[0] - wbar[1], 0.0},
               {schedule.delta_final[1], wbar[0] + wbar[1], 0.0}};
  const double theta_bias = params.theta;
  const auto flux = [&schedule, wbar, theta_bias](double t) {
    return theta_bias + schedule.flux(t, wbar);
  };
  TransmonHamiltonian h(params, mod, drive, ModelKind::full, flux);
  const HilbertSpace& space = h.space();

  PropagationConfig cfg;
  cfg.t_final = schedule.t_total;
  const double w_fast = mod.tones[1].omega;
  cfg.step = (opts.step > 0) ? opts.step : 1.0 * ps;
  cfg.max_frequency = w_fast;
  cfg.sample_stride = 100000;

  // Ground state of the static Hamiltonian with all drives off.
  FluxModulation static_mod;
  static_mod.theta = params.theta;
  TransmonHamiltonian h_static(params, static_mod, DriveSpec::off(2), ModelKind::full);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h_static(0.0));
  const Vector ground = es.eigenvectors().col(0);

  AnnealResult result;
  const HamiltonianFn h_fn = [&](double t, Matrix& out) { h.assemble_into(t, out); };
  if (opts.mode == RunMode::unitary) {
    const auto traj = propagate_schrodinger(h_fn, QuantumState::pure(space, ground), cfg);
    const auto extracted =
        extract_two_qubit_state(QuantumState::pure(space, traj.states.back()), schedule,
                                wbar, schedule.t_total, opts.leakage_threshold);
    result = measure(extracted.state, schedule);
    result.leakage = extracted.leakage;
    result.coupler_population = extracted.coupler_population;
    result.norm_defect = traj.max_norm_defect;
  } else {
    const auto traj = propagate_lindblad(
        h_fn, QuantumState::mixed(space, ground * ground.adjoint()), opts.noise, cfg);
    const auto extracted =
        extract_two_qubit_state(QuantumState::mixed(space, traj.density.back()), schedule,
                                wbar, schedule.t_total, opts.leakage_threshold);
    result = measure(extracted.state, schedule);
    result.leakage = extracted.leakage;
    result.coupler_population = extracted.coupler_population;
    result.norm_defect = traj.max_norm_defect;
  }
  result.diagnostics["step"] = cfg.step;
  return result;
}

}  // namespace

AnnealResult run_protocol(const ProtocolSchedule& schedule, const DeviceParams& params,
                          const RunOptions& opts) {
  if (!(schedule.t_total > 0)) throw ConfigError("protocol time T must be positive");
  return (opts.model == ProtocolModel::effective) ? run_effective(schedule, params, opts)
                                                  : run_full(schedule, params, opts);
}

RuntimeScan scan_optimal_runtime(const TargetHamiltonian& target, const DeviceParams& params,
                                 const LindbladSpec& spec, const std::vector<double>& t_list,
                                 const ScheduleOptions& schedule_opts, int workers) {
  if (t_list.empty()) throw ConfigError("runtime scan needs at least one T value");
  ScheduleOptions opts = schedule_opts;
  opts.with_full_frequencies = false;
  const ProtocolSchedule base = build_schedule(target, params, t_list.front(), opts);

  RuntimeScan scan;
  scan.t_values = t_list;
  scan.runs.resize(t_list.size());
  const auto run_one = [&](std::size_t i) {
    RunOptions run_opts;
    run_opts.model = ProtocolModel::effective;
    run_opts.mode = RunMode::lindblad;
    run_opts.noise = spec;
    scan.runs[i] = run_protocol(base.with_total_time(t_list[i]), params, run_opts);
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < t_list.size(); ++i) run_one(i);
  } else {
    std::vector<std::future<void>> futures;
    std::size_t next = 0;
    while (next < t_list.size()) {
      futures.clear();
      for (int w = 0; w < workers && next < t_list.size(); ++w, ++next)
        futures.push_back(std::async(std::launch::async, run_one, next));
      for (auto& f : futures) f.get();
    }
  }
  double best = -1.0;
  for (std::size_t i = 0; i < scan.runs.size(); ++i) {
    if (scan.runs[i].fidelity > best) {
      best = scan.runs[i].fidelity;
      scan.opt_index = i;
    }
  }
  scan.t_opt = scan.t_values[scan.opt_index];
  return scan;
}

CoherenceSweep coherence_sweep(const TargetHamiltonian& target, const DeviceParams& params,
                               double fixed_t, const std::vector<double>& t_coh_values,
                               const ScheduleOptions& schedule_opts,
                               const std::vector<CoherenceVariant>& variants, int workers) {
  CoherenceSweep sweep;
  sweep.t_coh = t_coh_values;
  sweep.variants = variants;
  if (sweep.variants.empty()) {
    sweep.variants = {{"ideal_coupler", {0.0, 0.0}},
                      {"t2c_10us", {10 * us, 10 * us}},
                      {"t2c_1us", {10 * us, 1 * us}}};
  }
  ScheduleOptions opts = schedule_opts;
  opts.with_full_frequencies = false;
  const ProtocolSchedule schedule = build_schedule(target, params, fixed_t, opts);

  sweep.delta_e.assign(sweep.variants.size(), std::vector<double>(t_coh_values.size(), 0.0));
  sweep.fidelity.assign(sweep.variants.size(), std::vector<double>(t_coh_values.size(), 0.0));

  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t v = 0; v < sweep.variants.size(); ++v)
    for (std::size_t i = 0; i < t_coh_values.size(); ++i) jobs.emplace_back(v, i);

  const auto run_one = [&](std::size_t job) {
    const auto [v, i] = jobs[job];
    LindbladSpec spec;
    spec.noise["q1"] = {t_coh_values[i], t_coh_values[i]};
    spec.noise["q2"] = {t_coh_values[i], t_coh_values[i]};
    const auto& coupler = sweep.variants[v].coupler;
    if (coupler.t1 > 0 || coupler.t2 > 0) spec.noise["c"] = coupler;
    RunOptions run_opts;
    run_opts.model = ProtocolModel::effective;
    run_opts.mode = RunMode::lindblad;
    run_opts.noise = spec;
    const auto result = run_protocol(schedule, params, run_opts);
    sweep.delta_e[v][i] = result.delta_e;
    sweep.fidelity[v][i] = result.fidelity;
  };
  if (workers <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_one(j);
  } else {
    std::size_t next = 0;
    while (next < jobs.size()) {
      std::vector<std::future<void>> futures;
      for (int w = 0; w < workers && next < jobs.size(); ++w, ++next)
        futures.push_back(std::async(std::launch::async, run_one, next));
      for (auto& f : futures) f.get();
    }
  }
  return sweep;
}

}  // namespace paramsim
