#include "paramsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "paramsim/errors.hpp"
#include "paramsim/swt.hpp"

namespace paramsim {

void PropagationConfig::validate() const {
  if (!(t_final > 0)) throw ConfigError("propagation: t_final must be positive");
  if (!(step > 0)) throw ConfigError("propagation: step must be positive");
  if (sample_stride < 1) throw ConfigError("propagation: sample_stride must be >= 1");
  if (max_frequency && *max_frequency > 0) {
    const double limit = (two_pi / *max_frequency) / 20.0;
    if (step > limit * (1.0 + 1e-12))
      throw ConfigError("propagation: step " + std::to_string(step) +
                        " does not resolve the fastest frequency (limit " +
                        std::to_string(limit) + ")");
  }
}

RealVector Trajectory::observable(const std::string& name) const {
  const auto it = observables.find(name);
  if (it == observables.end()) throw ConfigError("unknown observable '" + name + "'");
  return Eigen::Map<const RealVector>(it->second.data(),
                                      static_cast<Eigen::Index>(it->second.size()));
}

RealVector Trajectory::times_vector() const {
  return Eigen::Map<const RealVector>(times.data(), static_cast<Eigen::Index>(times.size()));
}

// ---------------------------------------------------------------------------
// CF4 stepper
// ---------------------------------------------------------------------------

namespace {
constexpr double cf4_node1 = 0.5 - 0.28867513459481287;  // 1/2 -+ sqrt(3)/6
constexpr double cf4_node2 = 0.5 + 0.28867513459481287;
constexpr double cf4_alpha1 = 0.25 + 0.28867513459481287;
constexpr double cf4_alpha2 = 0.25 - 0.28867513459481287;
}  // namespace

Cf4Stepper::Cf4Stepper(GeneratorFn generator, int dim)
    : generator_(std::move(generator)), dim_(dim) {
  g1_.resize(dim, dim);
  g2_.resize(dim, dim);
  gen_.resize(dim, dim);
}

void Cf4Stepper::apply_exponential(Matrix& block) {
  // Shift out the trace, then scale so the 1-norm stays below 1/2 and apply
  // the truncated Taylor series to the block.
  const Complex mu = gen_.trace() / static_cast<double>(dim_);
  gen_.diagonal().array() -= mu;
  double norm1 = 0.0;
  for (int c = 0; c < dim_; ++c) norm1 = std::max(norm1, gen_.col(c).cwiseAbs().sum());
  const int substeps = std::max(1, static_cast<int>(std::ceil(norm1 / 0.5)));
  const double inv = 1.0 / substeps;

  term_.resizeLike(block);
  next_.resizeLike(block);
  for (int s = 0; s < substeps; ++s) {
    term_ = block;
    double term_scale = term_.norm();
    const double target = 1e-16 * std::max(term_scale, 1e-300);
    for (int k = 1; k <= 24; ++k) {
      next_.noalias() = gen_ * term_;
      term_ = next_ * (inv / k);
      block += term_;
      term_scale = term_.norm();
      if (term_scale < target) break;
    }
  }
  block *= std::exp(mu);
}

void Cf4Stepper::step(double t, double h, Matrix& block) {
  generator_(t + cf4_node1 * h, g1_);
  generator_(t + cf4_node2 * h, g2_);
  gen_ = h * (cf4_alpha1 * g1_ + cf4_alpha2 * g2_);
  apply_exponential(block);
  gen_ = h * (cf4_alpha2 * g1_ + cf4_alpha1 * g2_);
  apply_exponential(block);
}

// ---------------------------------------------------------------------------
// Schrodinger propagation
// ---------------------------------------------------------------------------

namespace {

double hermiticity_defect(const Matrix& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

void propagate_block(const HamiltonianFn& h, Matrix& block, const PropagationConfig& cfg,
                     const BlockObserver& observer) {
  cfg.validate();
  const int dim = static_cast<int>(block.rows());
  Matrix h_work(dim, dim);
  bool herm_checked = false;
  GeneratorFn generator = [&](double t, Matrix& out) {
    h(t, h_work);
    if (cfg.check_hermiticity && !herm_checked) {
      if (hermiticity_defect(h_work) > 1e-12)
        throw IntegratorError("Hamiltonian not hermitian at t = " + std::to_string(t));
      herm_checked = true;
    }
    out = Complex(0, -1) * h_work;
  };
  Cf4Stepper stepper(std::move(generator), dim);

  const long n_steps = static_cast<long>(std::ceil(cfg.t_final / cfg.step - 1e-9));
  if (observer) observer(0.0, block);
  for (long i = 0; i < n_steps; ++i) {
    const double t0 = i * cfg.step;
    const double t1 = std::min((i + 1) * cfg.step, cfg.t_final);
    stepper.step(t0, t1 - t0, block);
    if ((i + 1) % cfg.sample_stride == 0 || i + 1 == n_steps) {
      for (int c = 0; c < block.cols(); ++c) {
        const double defect = std::abs(block.col(c).norm() - 1.0);
        if (defect > cfg.norm_tol)
          throw IntegratorError("norm drift " + std::to_string(defect) + " at t = " +
                                std::to_string(t1));
      }
      if (observer) observer(t1, block);
      herm_checked = false;  // re-check hermiticity once per sample window
    }
  }
}

Trajectory propagate_schrodinger(const HamiltonianFn& h, const QuantumState& psi0,
                                 const PropagationConfig& cfg) {
  psi0.validate();
  if (!psi0.is_pure()) throw ConfigError("propagate_schrodinger expects a pure state");
  Matrix block = psi0.state_vector();

  Trajectory traj;
  traj.pure = true;
  for (const auto& [name, op] : cfg.observables) traj.observables[name] = {};
  const BlockObserver observer = [&](double t, const Matrix& b) {
    traj.times.push_back(t);
    traj.states.push_back(b.col(0));
    traj.max_norm_defect = std::max(traj.max_norm_defect, std::abs(b.col(0).norm() - 1.0));
    for (const auto& [name, op] : cfg.observables)
      traj.observables[name].push_back((b.col(0).adjoint() * op * b.col(0))(0, 0).real());
  };
  propagate_block(h, block, cfg, observer);
  return traj;
}

// ---------------------------------------------------------------------------
// Lindblad propagation
// ---------------------------------------------------------------------------

double LindbladSpec::gamma_minus(const std::string& label) const {
  const auto it = noise.find(label);
  if (it == noise.end() || it->second.t1 <= 0) return 0.0;
  return 1.0 / it->second.t1;
}

double LindbladSpec::gamma_z(const std::string& label) const {
  const auto it = noise.find(label);
  if (it == noise.end() || it->second.t2 <= 0) return 0.0;
  const double inv_t1 = (it->second.t1 > 0) ? 1.0 / it->second.t1 : 0.0;
  return 0.5 * (1.0 / it->second.t2 - 0.5 * inv_t1);
}

void LindbladSpec::validate() const {
  for (const auto& [label, n] : noise) {
    if (n.t1 > 0 && n.t2 > 0 && n.t2 > 2.0 * n.t1 * (1.0 + 1e-12))
      throw ConfigError("subsystem '" + label + "': T2 = " + std::to_string(n.t2) +
                        " exceeds 2 T1 = " + std::to_string(2.0 * n.t1));
  }
}

bool LindbladSpec::empty() const {
  for (const auto& [label, n] : noise)
    if (n.t1 > 0 || n.t2 > 0) return false;
  return true;
}

std::vector<Matrix> collapse_operators(const HilbertSpace& space, const LindbladSpec& spec) {
  spec.validate();
  std::vector<Matrix> ops;
  for (const auto& [label, n] : spec.noise) {
    if (!space.has(label))
      throw ConfigError("noise on unknown subsystem '" + label + "'");
    const int d = space.dim_of(label);
    const double gm = spec.gamma_minus(label);
    const double gz = spec.gamma_z(label);
    if (gm > 0)
      ops.push_back(std::sqrt(gm) * embed(lowering_operator(d), label, space).matrix);
    if (gz > 0)
      ops.push_back(2.0 * std::sqrt(gz) * embed(number_operator(d), label, space).matrix);
  }
  return ops;
}

Matrix lindblad_dissipator(const HilbertSpace& space, const LindbladSpec& spec) {
  const int n = space.total_dim();
  const Matrix eye = Matrix::Identity(n, n);
  Matrix diss = Matrix::Zero(n * n, n * n);
  for (const auto& c : collapse_operators(space, spec)) {
    const Matrix cdc = c.adjoint() * c;
    diss += kron(c.conjugate(), c);
    diss -= 0.5 * kron(eye, cdc);
    diss -= 0.5 * kron(cdc.transpose(), eye);
  }
  return diss;
}

Trajectory propagate_lindblad(const HamiltonianFn& h, const QuantumState& rho0,
                              const LindbladSpec& spec, const PropagationConfig& cfg,
                              double positivity_floor) {
  cfg.validate();
  rho0.validate();
  const HilbertSpace& space = rho0.space();
  const int n = space.total_dim();
  const Matrix diss = lindblad_dissipator(space, spec);
  const Matrix eye = Matrix::Identity(n, n);

  Matrix h_work(n, n);
  GeneratorFn generator = [&](double t, Matrix& out) {
    h(t, h_work);
    out = diss;
    out.noalias() += Complex(0, -1) * kron(eye, h_work);
    out.noalias() += Complex(0, +1) * kron(h_work.transpose(), eye);
  };
  Cf4Stepper stepper(std::move(generator), n * n);

  Matrix rho = rho0.density_matrix();
  Eigen::Map<Matrix> rho_vec(rho.data(), n * n, 1);
  Matrix block = rho_vec;

  Trajectory traj;
  traj.pure = false;
  for (const auto& [name, op] : cfg.observables) traj.observables[name] = {};

  const auto record = [&](double t) {
    Eigen::Map<const Matrix> rho_now(block.data(), n, n);
    const double trace_defect = std::abs(rho_now.trace() - Complex(1.0, 0.0));
    if (trace_defect > cfg.norm_tol)
      throw IntegratorError("trace drift " + std::to_string(trace_defect) + " at t = " +
                            std::to_string(t));
    const double herm = (rho_now - rho_now.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-9)
      throw IntegratorError("hermiticity drift " + std::to_string(herm));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho_now + rho_now.adjoint()),
                                             Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -positivity_floor)
      throw IntegratorError("positivity breach: min eigenvalue " +
                            std::to_string(es.eigenvalues().minCoeff()));
    traj.max_norm_defect = std::max(traj.max_norm_defect, trace_defect);
    traj.times.push_back(t);
    traj.density.push_back(rho_now);
    for (const auto& [name, op] : cfg.observables)
      traj.observables[name].push_back((op * rho_now).trace().real());
  };

  const long n_steps = static_cast<long>(std::ceil(cfg.t_final / cfg.step - 1e-9));
  record(0.0);
  for (long i = 0; i < n_steps; ++i) {
    const double t0 = i * cfg.step;
    const double t1 = std::min((i + 1) * cfg.step, cfg.t_final);
    stepper.step(t0, t1 - t0, block);
    if ((i + 1) % cfg.sample_stride == 0 || i + 1 == n_steps) record(t1);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Fidelities
// ---------------------------------------------------------------------------

double state_fidelity(const QuantumState& a, const QuantumState& b) {
  a.validate(1e-6, 1e-8, 1e-6);
  b.validate(1e-6, 1e-8, 1e-6);
  if (a.space().total_dim() != b.space().total_dim())
    throw ConfigError("state_fidelity: dimension mismatch");
  if (a.is_pure() && b.is_pure()) {
    const Complex overlap = a.state_vector().dot(b.state_vector());
    return std::norm(overlap);
  }
  if (a.is_pure()) {
    const Vector& psi = a.state_vector();
    return (psi.adjoint() * b.density_matrix() * psi)(0, 0).real();
  }
  if (b.is_pure()) return state_fidelity(b, a);

  const Matrix rho = a.density_matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  RealVector eigs = es.eigenvalues().cwiseMax(0.0);
  const Matrix sqrt_rho = es.eigenvectors() * eigs.cwiseSqrt().asDiagonal() *
                          es.eigenvectors().adjoint();
  const Matrix m = sqrt_rho * b.density_matrix() * sqrt_rho;
  Eigen::SelfAdjointEigenSolver<Matrix> es2(0.5 * (m + m.adjoint()));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < es2.eigenvalues().size(); ++i)
    sum += std::sqrt(std::max(0.0, es2.eigenvalues()(i)));
  return sum * sum;
}

// ---------------------------------------------------------------------------
// Oscillation frequency extraction
// ---------------------------------------------------------------------------

OscillationFit extract_oscillation_frequency(const RealVector& t, const RealVector& y) {
  const Eigen::Index n = t.size();
  if (n < 16 || y.size() != n)
    throw ExtractionError("oscillation fit: need at least 16 uniform samples");
  const double dt = t(1) - t(0);
  const double span = t(n - 1) - t(0);

  std::vector<Complex> signal(static_cast<std::size_t>(n));
  const double mean = y.mean();
  for (Eigen::Index i = 0; i < n; ++i) signal[static_cast<std::size_t>(i)] = y(i) - mean;

  Eigen::FFT<double> fft;
  std::vector<Complex> spectrum;
  fft.fwd(spectrum, signal);

  const std::size_t half = spectrum.size() / 2;
  std::vector<double> power(half, 0.0);
  for (std::size_t k = 1; k < half; ++k) power[k] = std::norm(spectrum[k]);
  const auto peak_it = std::max_element(power.begin() + 1, power.end());
  const std::size_t k_peak = static_cast<std::size_t>(peak_it - power.begin());
  std::vector<double> sorted = power;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  if (!(power[k_peak] > 25.0 * median) || power[k_peak] <= 0.0 ||
      power[k_peak] < 1e-20 * static_cast<double>(n))
    throw ExtractionError("no spectral peak above the noise floor");

  const double omega_fft = two_pi * static_cast<double>(k_peak) /
                           (dt * static_cast<double>(spectrum.size()));

  // Linear LSQ in (offset, cos, sin) at fixed omega; golden-section on omega.
  const auto residual_at = [&](double omega, OscillationFit* fit) {
    double swc = 0, sws = 0, scc = 0, sss = 0, scs = 0, syc = 0, sys = 0, sy = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double c = std::cos(omega * t(i));
      const double s = std::sin(omega * t(i));
      swc += c; sws += s; scc += c * c; sss += s * s; scs += c * s;
      syc += y(i) * c; sys += y(i) * s; sy += y(i);
    }
    Eigen::Matrix3d m;
    m << static_cast<double>(n), swc, sws, swc, scc, scs, sws, scs, sss;
    const Eigen::Vector3d rhs(sy, syc, sys);
    const Eigen::Vector3d sol = m.ldlt().solve(rhs);
    double ss_res = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double model = sol(0) + sol(1) * std::cos(omega * t(i)) +
                           sol(2) * std::sin(omega * t(i));
      ss_res += (y(i) - model) * (y(i) - model);
    }
    if (fit) {
      fit->omega = omega;
      fit->offset = sol(0);
      fit->amplitude = std::hypot(sol(1), sol(2));
      fit->residual_rms = std::sqrt(ss_res / static_cast<double>(n));
    }
    return ss_res;
  };

  const double bin = two_pi / (dt * static_cast<double>(spectrum.size()));
  double lo = std::max(omega_fft - 1.5 * bin, 0.25 * bin);
  double hi = omega_fft + 1.5 * bin;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = residual_at(x1, nullptr), f2 = residual_at(x2, nullptr);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = residual_at(x1, nullptr);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = residual_at(x2, nullptr);
    }
  }
  OscillationFit fit;
  residual_at(0.5 * (lo + hi), &fit);
  if (fit.omega * span < 2.0 * two_pi)
    throw ExtractionError("series spans fewer than two oscillation periods");
  return fit;
}

// ---------------------------------------------------------------------------
// Gate fidelity benchmark
// ---------------------------------------------------------------------------

GateFidelityResult average_gate_fidelity(const HamiltonianFn& h, const HilbertSpace& space,
                                         const Matrix& u_target,
                                         const std::array<double, 2>& frame_freqs,
                                         const PropagationConfig& cfg, double window_start,
                                         double leakage_threshold) {
  if (space.size() != 3)
    throw ConfigError("gate benchmark expects a q1, q2, c space");
  if (u_target.rows() != 4 || u_target.cols() != 4)
    throw ConfigError("gate target must be 4x4");

  // Computational-basis starts with the coupler in its ground state.
  std::vector<int> slice_index(4);
  Matrix block = Matrix::Zero(space.total_dim(), 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int col = 2 * a + b;
      const auto state = QuantumState::basis_state(space, {a, b, 0});
      block.col(col) = state.state_vector();
      Eigen::Index idx = 0;
      state.state_vector().cwiseAbs().maxCoeff(&idx);
      slice_index[static_cast<std::size_t>(col)] = static_cast<int>(idx);
    }

  GateFidelityResult result;
  const BlockObserver observer = [&](double t, const Matrix& b) {
    if (t < window_start) return;
    // Coupler-ground two-level slice, then the rotating-frame phases.
    Matrix v(4, 4);
    for (int col = 0; col < 4; ++col)
      for (int row = 0; row < 4; ++row)
        v(row, col) = b(slice_index[static_cast<std::size_t>(row)], col);
    for (int col = 0; col < 4; ++col) {
      const double missing = 1.0 - v.col(col).squaredNorm();
      result.max_missing_weight = std::max(result.max_missing_weight, missing);
    }
    for (int row = 0; row < 4; ++row) {
      const int n1 = row >> 1, n2 = row & 1;
      // exp(-i theta sigma_z/2) puts e^{-i theta/2} on level 0.
      const double phase = 0.5 * frame_freqs[0] * t * (n1 == 0 ? -1.0 : 1.0) +
                           0.5 * frame_freqs[1] * t * (n2 == 0 ? -1.0 : 1.0);
      v.row(row) *= std::exp(Complex(0, phase));
    }
    const Matrix overlap = u_target * v;
    double f = 0.0;
    for (int col = 0; col < 4; ++col) f += std::norm(overlap(col, col));
    f /= 4.0;
    result.times.push_back(t);
    result.fidelity.push_back(f);
    if (f > result.max_fidelity) {
      result.max_fidelity = f;
      result.argmax_time = t;
    }
  };

  propagate_block(h, block, cfg, observer);
  if (result.max_missing_weight > leakage_threshold)
    throw DegenerateProjectionError("gate benchmark leakage " +
                                    std::to_string(result.max_missing_weight) +
                                    " exceeds threshold");
  return result;
}

// ---------------------------------------------------------------------------
// Calibration and Floquet analysis
// ---------------------------------------------------------------------------

namespace {

// Peak transfer contrast for one tone configuration: propagate from `start`
// and track the target population over roughly one swap period.
double transfer_contrast(const DeviceParams& params, const FluxModulation& mod,
                         ModelKind kind, const std::vector<int>& start_levels,
                         const std::vector<int>& target_levels, double duration,
                         double step) {
  TransmonHamiltonian h(params, mod, DriveSpec::off(params.num_qubits()), kind);
  const HilbertSpace& space = h.space();
  Matrix block = QuantumState::basis_state(space, start_levels).state_vector();

  // Target population summed over coupler levels.
  std::vector<int> probe = target_levels;
  std::vector<Eigen::Index> indices;
  for (int nc = 0; nc < space.dim_of("c"); ++nc) {
    probe.back() = nc;
    Eigen::Index idx = 0;
    QuantumState::basis_state(space, probe).state_vector().cwiseAbs().maxCoeff(&idx);
    indices.push_back(idx);
  }

  double p_max = 0.0, p_min = 1.0;
  PropagationConfig cfg;
  cfg.t_final = duration;
  cfg.step = step;
  cfg.sample_stride = 50;
  const BlockObserver observer = [&](double, const Matrix& b) {
    double p = 0.0;
    for (const auto idx : indices) p += std::norm(b(idx, 0));
    p_max = std::max(p_max, p);
    p_min = std::min(p_min, p);
  };
  propagate_block([&](double t, Matrix& out) { h.assemble_into(t, out); }, block, cfg,
                  observer);
  return p_max - p_min;
}

double parabolic_peak(const RealVector& x, const RealVector& y) {
  Eigen::Index k = 0;
  y.maxCoeff(&k);
  if (k == 0 || k == y.size() - 1) return x(k);
  const double d1 = y(k) - y(k - 1);
  const double d2 = y(k) - y(k + 1);
  const double denom = d1 + d2;
  if (denom <= 0) return x(k);
  return x(k) + 0.5 * (x(1) - x(0)) * (d1 - d2) / denom;
}

}  // namespace

CalibrationResult calibrate_effective_frequencies(const DeviceParams& params,
                                                  const FluxModulation& mod_final,
                                                  double search_halfwidth, int grid_points,
                                                  ModelKind kind) {
  if (params.num_qubits() != 2 || mod_final.tones.size() != 2)
    throw ConfigError("calibration requires two qubits and two tones");
  if (grid_points < 3) throw ConfigError("calibration grid needs at least 3 points");

  // Analytic starting point and expected swap rates at the final amplitudes.
  const auto res = resonant_modulation(params, mod_final.tones[0].delta,
                                       mod_final.tones[1].delta, SwtOrder::harmonic_second);
  const double coupling_diff = std::abs(0.5 * (res.eff.omega_x() + res.eff.omega_y()));
  const double coupling_sum = std::abs(0.5 * (res.eff.omega_x() - res.eff.omega_y()));
  if (coupling_diff < 1.0 * kHz || coupling_sum < 1.0 * kHz)
    throw CalibrationError("modulation too weak to produce measurable oscillations");

  const double step = (two_pi / res.mod.tones[1].omega) / 24.0;
  const double duration_diff = 1.15 * pi / (2.0 * coupling_diff);
  const double duration_sum = 1.15 * pi / (2.0 * coupling_sum);

  const auto scan = [&](int tone_index, const std::vector<int>& start,
                        const std::vector<int>& target, double duration, double center,
                        double* best_contrast) {
    RealVector freqs(grid_points), contrasts(grid_points);
    for (int i = 0; i < grid_points; ++i) {
      const double f = center + search_halfwidth *
                                    (2.0 * i / (grid_points - 1.0) - 1.0);
      FluxModulation mod = res.mod;
      mod.tones[static_cast<std::size_t>(tone_index)].omega = f;
      freqs(i) = f;
      contrasts(i) = transfer_contrast(params, mod, kind, start, target, duration, step);
    }
    const double max_c = contrasts.maxCoeff();
    const double min_c = contrasts.minCoeff();
    if (max_c < 0.05 || (max_c - min_c) < 0.1 * max_c)
      throw CalibrationError("contrast landscape flat over the search window");
    *best_contrast = max_c;
    return parabolic_peak(freqs, contrasts);
  };

  CalibrationResult out;
  out.difference_tone = scan(0, {1, 0, 0}, {0, 1, 0}, duration_diff,
                             res.mod.tones[0].omega, &out.contrast_difference);
  out.sum_tone = scan(1, {0, 0, 0}, {1, 1, 0}, duration_sum, res.mod.tones[1].omega,
                      &out.contrast_sum);
  out.omega_bar[0] = 0.5 * (out.sum_tone + out.difference_tone);
  out.omega_bar[1] = 0.5 * (out.sum_tone - out.difference_tone);
  return out;
}

std::vector<double> floquet_dressed_frequencies(const DeviceParams& params,
                                                const FluxModulation& mod, ModelKind kind,
                                                int steps_per_period) {
  if (mod.tones.size() != 1)
    throw ConfigError("floquet_dressed_frequencies expects a single tone");
  const double period = two_pi / mod.tones[0].omega;

  TransmonHamiltonian h(params, mod, DriveSpec::off(params.num_qubits()), kind);
  const HilbertSpace& space = h.space();
  const int dim = space.total_dim();

  Matrix u = Matrix::Identity(dim, dim);
  PropagationConfig cfg;
  cfg.t_final = period;
  cfg.step = period / steps_per_period;
  cfg.sample_stride = steps_per_period;
  cfg.norm_tol = 1e-6;
  propagate_block([&](double t, Matrix& out) { h.assemble_into(t, out); }, u, cfg, nullptr);

  Eigen::ComplexEigenSolver<Matrix> es(u);

  // Reference static dressed states for mode identification.
  FluxModulation static_mod;
  static_mod.theta = mod.theta;
  TransmonHamiltonian h0(params, static_mod, DriveSpec::off(params.num_qubits()), kind);
  Eigen::SelfAdjointEigenSolver<Matrix> es0(h0(0.0));

  const auto quasi_energy_of = [&](const Vector& reference, double expected) {
    int best = 0;
    double best_overlap = -1.0;
    for (int k = 0; k < dim; ++k) {
      const double overlap = std::norm(reference.dot(es.eigenvectors().col(k)));
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = k;
      }
    }
    double quasi = -std::arg(es.eigenvalues()(best)) / period;  // mod omega_tone
    const double w = mod.tones[0].omega;
    const double n = std::round((expected - quasi) / w);
    return quasi + n * w;
  };

  const auto static_state = [&](const std::vector<int>& levels) {
    const Vector probe = QuantumState::basis_state(space, levels).state_vector();
    int best = 0;
    double best_overlap = -1.0;
    for (int k = 0; k < dim; ++k) {
      const double overlap = std::norm(probe.dot(es0.eigenvectors().col(k)));
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = k;
      }
    }
    return std::make_pair(Vector(es0.eigenvectors().col(best)), es0.eigenvalues()(best));
  };

  std::vector<int> ground_levels(static_cast<std::size_t>(space.size()), 0);
  const auto [ground_vec, ground_e] = static_state(ground_levels);
  const double ground_quasi = quasi_energy_of(ground_vec, ground_e);

  std::vector<double> freqs;
  for (int j = 0; j < params.num_qubits(); ++j) {
    std::vector<int> levels = ground_levels;
    levels[static_cast<std::size_t>(j)] = 1;
    const auto [vec, e] = static_state(levels);
    freqs.push_back(quasi_energy_of(vec, e) - ground_quasi);
  }
  return freqs;
}

std::vector<double> floquet_modulation_shifts(const DeviceParams& params, ModelKind kind,
                                              double delta, double tone_freq,
                                              double probe_offset, int steps_per_period) {
  const auto statics = static_dressed_frequencies(params, kind);
  std::vector<double> shifts(statics.size(), 0.0);
  if (delta == 0.0) return shifts;
  for (const double sign : {-1.0, +1.0}) {
    FluxModulation probe;
    probe.theta = params.theta;
    probe.tones = {{delta, tone_freq + sign * probe_offset, 0.0}};
    const auto fq = floquet_dressed_frequencies(params, probe, kind, steps_per_period);
    for (std::size_t j = 0; j < shifts.size(); ++j)
      shifts[j] += 0.5 * (fq[j] - statics[j]);
  }
  return shifts;
}

}  // namespace paramsim
