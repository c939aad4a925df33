#include "paramsim/swt.hpp"

#include <doctest.h>

#include <cmath>

#include "paramsim/bessel.hpp"
#include "paramsim/errors.hpp"
#include "test_util.hpp"

using namespace paramsim;

namespace {

// Resonant bichromatic modulation at the delta = 0 dispersive shifts; enough
// for oracle comparisons that do not need the self-consistent tones.
FluxModulation simple_resonant_mod(const DeviceParams& params, double d1, double d2) {
  std::array<double, 2> wbar{};
  for (int j = 0; j < 2; ++j) {
    const double g = params.qubits[static_cast<std::size_t>(j)].g;
    wbar[static_cast<std::size_t>(j)] =
        params.qubits[static_cast<std::size_t>(j)].omega +
        g * g * (1.0 / detuning(params, j, -1) + 1.0 / detuning(params, j, +1));
  }
  FluxModulation mod;
  mod.theta = params.theta;
  mod.tones = {{d1, wbar[0] - wbar[1], 0.0}, {d2, wbar[0] + wbar[1], 0.0}};
  return mod;
}

RealVector uniform_grid(double period, int periods, int samples_per_period) {
  const int n = periods * samples_per_period;
  RealVector grid(n);
  for (int i = 0; i < n; ++i) grid(i) = i * period / samples_per_period;
  return grid;
}

}  // namespace

TEST_CASE("bessel_j reflection rules") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(2, 0.0) == 0.0);
  CHECK(bessel_j(-1, 0.3) == doctest::Approx(-bessel_j(1, 0.3)));
  CHECK(bessel_j(1, -0.3) == doctest::Approx(-bessel_j(1, 0.3)));
  CHECK(bessel_j(-2, -0.4) == doctest::Approx(bessel_j(2, 0.4)));
}

TEST_CASE("alpha ODE with static flux stays at the fixed point") {
  const auto params = testing::reference_device();
  FluxModulation mod;
  mod.theta = -0.1;
  RealVector grid = uniform_grid(1.0 * ns, 20, 16);
  const auto alpha = solve_alpha_ode(params, mod, 0, -1, grid);
  // g / Delta_- = 0.130 / (5.8 - 7.119) GHz = -0.0986 (dimensionless).
  const Complex expected = params.qubits[0].g / detuning(params, 0, -1);
  CHECK(expected.real() == doctest::Approx(-0.0986).epsilon(1e-3));
  for (const auto& a : alpha) CHECK(std::abs(a - expected) < 1e-8);
}

TEST_CASE("alpha ODE is linear in g") {
  auto params = testing::reference_device();
  const auto mod = simple_resonant_mod(params, 0.012, 0.02);
  RealVector grid = uniform_grid(two_pi / mod.tones[0].omega, 10, 32);
  const auto alpha1 = solve_alpha_ode(params, mod, 0, -1, grid);
  params.qubits[0].g *= 2.0;
  const auto alpha2 = solve_alpha_ode(params, mod, 0, -1, grid);
  for (std::size_t i = 0; i < alpha1.size(); ++i)
    CHECK(std::abs(alpha2[i] - 2.0 * alpha1[i]) < 1e-9);
}

TEST_CASE("monochromatic fundamental matches the weak-modulation closed form") {
  const auto params = testing::reference_device();
  FluxModulation mod;
  mod.theta = -0.1;
  mod.tones = {{0.004, 0.8 * GHz, 0.0}};  // lambda ~ 0.018
  const double period = two_pi / mod.tones[0].omega;
  RealVector grid = uniform_grid(period, 400, 48);
  const auto alpha = solve_alpha_ode(params, mod, 0, -1, grid);
  const Complex fundamental = windowed_fourier_component(grid, alpha, 1, mod.tones[0].omega);
  const Complex weak = weak_modulation_alpha(params, mod, 0, -1, 1, 0);
  const double lambda = modulation_strengths(params, mod)[0];
  CHECK(std::abs(fundamental - weak) <
        std::abs(weak) * std::max(0.02, 20.0 * lambda * lambda));
}

TEST_CASE("alpha_series limits") {
  const auto params = testing::reference_device();
  SUBCASE("no modulation reduces to g / Delta") {
    FluxModulation mod;
    mod.theta = -0.1;
    mod.tones = {{0.0, 0.8 * GHz, 0.0}, {0.0, 10.8 * GHz, 0.0}};
    for (const int sign : {-1, +1}) {
      const auto comp = alpha_series(params, mod, 0, sign);
      const Complex expected = params.qubits[0].g / detuning(params, 0, sign);
      CHECK(std::abs(comp.static_component - expected) < 1e-12);
      CHECK(comp.harmonics.cwiseAbs().maxCoeff() < 1e-15);
    }
  }
  SUBCASE("joint tone-sign flip applies Bessel reflection parity") {
    // Flipping the sign of both deltas multiplies the integrating factor's
    // argument by -1; each harmonic picks up (-1)^k, so odd harmonics flip
    // and even ones persist.
    auto mod = simple_resonant_mod(params, 0.012, 0.03);
    const auto plus = alpha_series(params, mod, 0, -1);
    mod.tones[0].delta *= -1.0;
    mod.tones[1].delta *= -1.0;
    const auto minus = alpha_series(params, mod, 0, -1);
    CHECK(std::abs(plus.static_component - minus.static_component) < 1e-14);
    for (int m = 0; m < 2; ++m)
      for (int k = -3; k <= 3; ++k) {
        if (k == 0) continue;
        const double parity = (k % 2 == 0) ? 1.0 : -1.0;
        CHECK(std::abs(minus.harmonic(k, m) - parity * plus.harmonic(k, m)) < 1e-14);
      }
  }
}

TEST_CASE("alpha_series matches the windowed ODE Fourier analysis at |k| <= 1") {
  const auto params = testing::reference_device();
  const auto mod = simple_resonant_mod(params, 0.01, 0.01);
  for (const int sign : {-1, +1}) {
    const auto series = alpha_series(params, mod, 0, sign);
    for (int m = 0; m < 2; ++m) {
      const double wm = mod.tones[static_cast<std::size_t>(m)].omega;
      RealVector grid = uniform_grid(two_pi / wm, 300, 48);
      const auto alpha = solve_alpha_ode(params, mod, 0, sign, grid);
      for (const int k : {-1, 1}) {
        const Complex ode = windowed_fourier_component(grid, alpha, k, wm);
        CHECK(std::abs(series.harmonic(k, m) - ode) < 0.02 * std::abs(ode));
      }
      if (m == 0) {
        const Complex ode0 = windowed_fourier_component(grid, alpha, 0, wm);
        CHECK(std::abs(series.static_component - ode0) < 0.02 * std::abs(ode0));
      }
    }
  }
}

TEST_CASE("harmonic balance reduces to the series as delta -> 0") {
  const auto params = testing::reference_device();
  double previous = 0.0;
  for (const double scale : {1.0, 0.5, 0.25}) {
    const auto mod = simple_resonant_mod(params, 0.008 * scale, 0.02 * scale);
    const auto series = alpha_series(params, mod, 0, -1);
    const auto hb = harmonic_balance_alpha(params, mod, 0, -1);
    const double rel = std::abs(hb.harmonic(-1, 0) - series.harmonic(-1, 0)) /
                       std::abs(series.harmonic(-1, 0));
    if (previous > 0.0) CHECK(rel < 0.75 * previous);  // O(delta) approach
    previous = rel;
  }
}

TEST_CASE("harmonic balance reproduces the exact-ODE k = 2 component") {
  // The first-order series misses the wc''(delta^2) channel entirely at
  // |k| = 2; the harmonic balance must capture it.
  const auto params = testing::reference_device();
  const auto mod = simple_resonant_mod(params, 0.01, 0.01);
  const double wm = mod.tones[0].omega;
  RealVector grid = uniform_grid(two_pi / wm, 300, 48);
  const auto alpha = solve_alpha_ode(params, mod, 0, -1, grid);
  const auto hb = harmonic_balance_alpha(params, mod, 0, -1);
  for (const int k : {-2, 2}) {
    const Complex ode = windowed_fourier_component(grid, alpha, k, wm);
    CHECK(std::abs(hb.harmonic(k, 0) - ode) < 0.02 * std::abs(ode));
  }
}

TEST_CASE("weak-modulation closed forms") {
  const auto params = testing::reference_device();
  SUBCASE("lambda = 0 gives g / Delta") {
    FluxModulation mod;
    mod.theta = -0.1;
    mod.tones = {{0.0, 0.8 * GHz, 0.0}};
    const Complex value = weak_modulation_alpha(params, mod, 1, +1, 0);
    CHECK(std::abs(value - params.qubits[1].g / detuning(params, 1, +1)) < 1e-15);
  }
  SUBCASE("k -> -k flips the first denominator") {
    FluxModulation mod;
    mod.theta = -0.1;
    mod.tones = {{0.01, 0.9 * GHz, 0.0}};
    const double g = params.qubits[0].g;
    const double delta = detuning(params, 0, -1);
    const double lambda = modulation_strengths(params, mod)[0];
    const double wm = mod.tones[0].omega;
    // Independent transcription of the closed form for both k signs.
    const Complex expect_plus = -0.5 * g * (lambda / (wm + delta) - lambda / delta);
    const Complex expect_minus = +0.5 * g * (lambda / (-wm + delta) - lambda / delta);
    CHECK(std::abs(weak_modulation_alpha(params, mod, 0, -1, 1) - expect_plus) < 1e-15);
    CHECK(std::abs(weak_modulation_alpha(params, mod, 0, -1, -1) - expect_minus) < 1e-15);
  }
  SUBCASE("matches alpha_series to cubic order") {
    std::vector<double> scales = {0.25, 0.5, 1.0};
    std::vector<double> diffs;
    for (const double s : scales) {
      FluxModulation mod;
      mod.theta = -0.1;
      mod.tones = {{0.02 * s, 0.9 * GHz, 0.0}};
      const Complex series = alpha_series(params, mod, 0, -1).harmonic(1, 0);
      const Complex weak = weak_modulation_alpha(params, mod, 0, -1, 1);
      diffs.push_back(std::abs(series - weak));
    }
    const double slope =
        std::log(diffs.back() / diffs.front()) / std::log(scales.back() / scales.front());
    CHECK(slope == doctest::Approx(3.0).epsilon(0.15));
  }
}

TEST_CASE("dispersive shifts") {
  const auto params = testing::reference_device();
  SUBCASE("g -> 0 leaves the bare frequency") {
    auto weak_params = params;
    for (auto& q : weak_params.qubits) q.g = 1.0;  // 1 rad/s
    FluxModulation mod;
    mod.theta = -0.1;
    mod.tones = {{0.0, 0.8 * GHz, 0.0}, {0.0, 10.8 * GHz, 0.0}};
    const auto table = build_swt_table(weak_params, mod, SwtOrder::bessel_first);
    const auto shifts = dispersive_shifts(table, weak_params);
    CHECK(std::abs(shifts[0] - weak_params.qubits[0].omega) < 1e-6);
  }
  SUBCASE("delta = 0 value includes both detuning signs") {
    FluxModulation mod;
    mod.theta = -0.1;
    mod.tones = {{0.0, 0.8 * GHz, 0.0}, {0.0, 10.8 * GHz, 0.0}};
    const auto table = build_swt_table(params, mod, SwtOrder::bessel_first);
    const auto shifts = dispersive_shifts(table, params);
    const double g = params.qubits[0].g;
    const double expected =
        params.qubits[0].omega +
        g * g * (1.0 / detuning(params, 0, -1) + 1.0 / detuning(params, 0, +1));
    CHECK(shifts[0] == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("static shift moves quadratically in delta1") {
    std::vector<double> shifts;
    for (const double d1 : {0.005, 0.01, 0.02}) {
      const auto mod = simple_resonant_mod(params, d1, 0.0);
      const auto table = build_swt_table(params, mod, SwtOrder::harmonic_second);
      shifts.push_back(dispersive_shifts(table, params)[0]);
    }
    const double base = [&] {
      const auto mod = simple_resonant_mod(params, 0.0, 0.0);
      return dispersive_shifts(build_swt_table(params, mod, SwtOrder::harmonic_second),
                               params)[0];
    }();
    const double c1 = shifts[0] - base;
    const double c2 = shifts[1] - base;
    const double c3 = shifts[2] - base;
    CHECK(c2 / c1 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(c3 / c2 == doctest::Approx(4.0).epsilon(0.05));
    // Monotone in delta^2 (all same sign, growing magnitude).
    CHECK(std::abs(c3) > std::abs(c2));
    CHECK(std::abs(c2) > std::abs(c1));
  }
}

TEST_CASE("coupling amplitude limits and symmetries") {
  const auto params = testing::reference_device();
  SUBCASE("delta = 0 kills every k != 0 amplitude") {
    FluxModulation mod;
    mod.theta = -0.1;
    mod.tones = {{0.0, 0.8 * GHz, 0.0}, {0.0, 10.8 * GHz, 0.0}};
    const auto table = build_swt_table(params, mod, SwtOrder::bessel_first);
    const auto amps = coupling_amplitudes(table, params);
    CHECK(amps.plus.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(amps.minus.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(std::abs(amps.static_plus) > 0.0);  // always-on dispersive exchange
  }
  SUBCASE("first-order difference-tone amplitude matches the closed form") {
    const auto mod = simple_resonant_mod(params, 0.008, 0.0);
    const auto table = build_swt_table(params, mod, SwtOrder::bessel_first);
    const auto amps = coupling_amplitudes(table, params);
    const double dwc = coupler_frequency_derivative(params.theta, params);
    const double g1 = params.qubits[0].g, g2 = params.qubits[1].g;
    const Complex closed_form =
        0.008 * g1 * g2 / 2.0 * dwc *
        (1.0 / (detuning(params, 0, -1) * detuning(params, 1, -1)) +
         1.0 / (detuning(params, 0, +1) * detuning(params, 1, +1)));
    const double lambda = modulation_strengths(params, mod)[0];
    CHECK(std::abs(amps.plus_km(-1, 0) - closed_form) <
          std::max(2.0 * lambda * lambda, 1e-4) * std::abs(closed_form));
  }
  SUBCASE("index swap conjugation") {
    const auto mod = simple_resonant_mod(params, 0.01, 0.02);
    auto asym = params;
    asym.qubits[1].g = 117 * MHz;  // break the g1 = g2 symmetry
    const auto table = build_swt_table(asym, mod, SwtOrder::bessel_first);
    const auto amps_ij = coupling_amplitudes(table, asym, 0, 1);
    const auto amps_ji = coupling_amplitudes(table, asym, 1, 0);
    for (int m = 0; m < 2; ++m)
      for (const int k : {-2, -1, 1, 2})
        CHECK(std::abs(amps_ij.plus_km(k, m) - std::conj(amps_ji.plus_km(-k, m))) < 1e-12);
  }
}

TEST_CASE("effective XY couplings") {
  const auto params = testing::reference_device();
  SUBCASE("delta2 = 0 gives a pure iSWAP-type pair") {
    const auto mod = simple_resonant_mod(params, 0.01, 0.0);
    const double wd1 = 0.5 * (mod.tones[1].omega + mod.tones[0].omega);
    const double wd2 = 0.5 * (mod.tones[1].omega - mod.tones[0].omega);
    const auto eff = effective_xy_couplings(params, mod, wd1, wd2, SwtOrder::bessel_first);
    CHECK(eff.omega_x() == doctest::Approx(eff.omega_y()).epsilon(1e-12));
    CHECK(std::abs(eff.omega_x()) > 0.0);
  }
  SUBCASE("delta1 = 0 gives a pure bSWAP-type pair") {
    const auto mod = simple_resonant_mod(params, 0.0, 0.02);
    const double wd1 = 0.5 * (mod.tones[1].omega + mod.tones[0].omega);
    const double wd2 = 0.5 * (mod.tones[1].omega - mod.tones[0].omega);
    const auto eff = effective_xy_couplings(params, mod, wd1, wd2, SwtOrder::bessel_first);
    CHECK(eff.omega_x() == doctest::Approx(-eff.omega_y()).epsilon(1e-12));
    CHECK(std::abs(eff.omega_x()) > 0.0);
  }
  SUBCASE("resonance condition is enforced") {
    auto mod = simple_resonant_mod(params, 0.01, 0.01);
    const double wd1 = 0.5 * (mod.tones[1].omega + mod.tones[0].omega);
    const double wd2 = 0.5 * (mod.tones[1].omega - mod.tones[0].omega);
    mod.tones[0].omega += 2.0 * MHz;
    CHECK_THROWS_AS(effective_xy_couplings(params, mod, wd1, wd2, SwtOrder::bessel_first),
                    ConfigError);
  }
  SUBCASE("couplings are real for vanishing tone phases") {
    const auto res = resonant_modulation(params, 0.012, 0.03, SwtOrder::harmonic_second);
    CHECK(std::abs(res.eff.omega_x_complex.imag()) <
          1e-9 * std::abs(res.eff.omega_x_complex.real()));
    CHECK(std::abs(res.eff.omega_y_complex.imag()) <
          1e-9 * std::max(std::abs(res.eff.omega_y_complex.real()), 1.0));
  }
  SUBCASE("first-order quantities are odd under a joint delta flip") {
    const auto plus = resonant_modulation(params, 0.01, 0.025, SwtOrder::bessel_first);
    const auto minus = resonant_modulation(params, -0.01, -0.025, SwtOrder::bessel_first);
    CHECK(minus.eff.omega_x() == doctest::Approx(-plus.eff.omega_x()).epsilon(1e-9));
    CHECK(minus.eff.omega_y() == doctest::Approx(-plus.eff.omega_y()).epsilon(1e-9));
    // Second-order static shifts are even under the same flip.
    const auto plus2 = resonant_modulation(params, 0.01, 0.025, SwtOrder::harmonic_second);
    const auto minus2 =
        resonant_modulation(params, -0.01, -0.025, SwtOrder::harmonic_second);
    CHECK(minus2.omega_bar[0] == doctest::Approx(plus2.omega_bar[0]).epsilon(1e-12));
    CHECK(minus2.omega_bar[1] == doctest::Approx(plus2.omega_bar[1]).epsilon(1e-12));
  }
}

TEST_CASE("ising ratio") {
  const auto params = testing::reference_device();
  SUBCASE("reference parameters") {
    // Arithmetic from the detunings: Delta1- = -1.3191, Delta1+ = 12.9191,
    // Delta2- = -2.1191, Delta2+ = 12.1191 (2 pi GHz) gives +0.27211.
    const double d1m = detuning(params, 0, -1), d1p = detuning(params, 0, +1);
    const double d2m = detuning(params, 1, -1), d2p = detuning(params, 1, +1);
    const double expected = -(d1m * d2p + d1p * d2m) / (d1m * d2m + d1p * d2p);
    CHECK(ising_ratio(params) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(ising_ratio(params) == doctest::Approx(0.27211).epsilon(1e-4));
  }
  SUBCASE("closure: the ratio zeroes the first-order Omega_y") {
    // First-order amplitudes (weak-modulation |k| = 1 forms assembled through
    // the Omega_bar combination) with tones at the bare difference and sum,
    // where the cancellation is exact algebra. The lambda-resummed series and
    // dressed tone placement keep higher-order terms and only approach it.
    const double d1 = 0.01;
    const double d2 = d1 / ising_ratio(params);
    FluxModulation mod;
    mod.theta = params.theta;
    mod.tones = {{d1, params.qubits[0].omega - params.qubits[1].omega, 0.0},
                 {d2, params.qubits[0].omega + params.qubits[1].omega, 0.0}};
    const double g1 = params.qubits[0].g, g2 = params.qubits[1].g;
    const auto weak = [&](int qubit, int sign, int k, int tone) {
      return weak_modulation_alpha(params, mod, qubit, sign, k, tone);
    };
    const Complex plus_11 = 0.5 * (g1 * weak(1, -1, +1, 0) + g2 * weak(0, -1, -1, 0) -
                                   g1 * weak(1, +1, +1, 0) - g2 * weak(0, +1, -1, 0));
    const Complex minus_12 = 0.5 * (g1 * weak(1, -1, -1, 1) + g2 * weak(0, -1, -1, 1) -
                                    g1 * weak(1, +1, -1, 1) - g2 * weak(0, +1, -1, 1));
    const Complex omega_y = plus_11 - minus_12;
    const Complex omega_x = plus_11 + minus_12;
    CHECK(std::abs(omega_y) <= 1e-12 * std::abs(omega_x));

    const auto res = resonant_modulation(params, d1, d2, SwtOrder::bessel_first);
    CHECK(std::abs(res.eff.omega_y()) <= 5e-3 * std::abs(res.eff.omega_x()));
  }
  SUBCASE("equal qubit frequencies") {
    // With Delta1 = Delta2 the ratio is -2 D+ D- / (D+^2 + D-^2); for any
    // dispersive configuration (D- < 0 < D+) that is positive and below 1.
    const double ratio = detail::ising_ratio_from_detunings(-1.0, 13.0, -1.0, 13.0);
    CHECK(ratio == doctest::Approx(2.0 * 13.0 / (1.0 + 169.0)));
    CHECK(ratio > 0.0);
    CHECK(ratio < 1.0);
  }
  SUBCASE("vanishing denominator raises") {
    CHECK_THROWS_AS(detail::ising_ratio_from_detunings(-1.0, 2.0, 4.0, 2.0),
                    SmallDenominatorError);
  }
}

TEST_CASE("inversion of target couplings") {
  const auto params = testing::reference_device();
  SUBCASE("zero targets give zero amplitudes") {
    const auto result = invert_target_couplings(0.0, 0.0, params);
    CHECK(result.delta[0] == 0.0);
    CHECK(result.delta[1] == 0.0);
  }
  SUBCASE("round trip within 2% after refinement") {
    for (const auto& [jx, jy] : std::vector<std::pair<double, double>>{
             {0.8 * MHz, 0.2 * MHz}, {0.5 * MHz, 0.0}, {1.0 * MHz, -0.3 * MHz}}) {
      const auto result = invert_target_couplings(jx, jy, params);
      CHECK(std::abs(result.resonant.eff.omega_x() - jx) <=
            0.02 * std::max(std::abs(jx), 0.1 * MHz));
      CHECK(std::abs(result.resonant.eff.omega_y() - jy) <=
            0.02 * std::max(std::abs(jy), 0.1 * MHz));
    }
  }
  SUBCASE("pure Ising targets reproduce the ratio at first order") {
    const auto result = invert_target_couplings(0.6 * MHz, 0.0, params, false);
    CHECK(result.delta[0] / result.delta[1] ==
          doctest::Approx(ising_ratio(params)).epsilon(1e-12));
  }
  SUBCASE("unphysical amplitudes are rejected") {
    CHECK_THROWS_AS(invert_target_couplings(60.0 * MHz, 0.0, params, false), ConfigError);
  }
}

TEST_CASE("small denominator guard fires exactly below the threshold") {
  auto params = testing::reference_device();
  FluxModulation mod;
  mod.theta = -0.1;
  // Put the tone near |Delta_2-| so that q = +1, p = 0 resonates.
  const double d2m = detuning(params, 1, -1);  // negative, about -2.12 GHz
  mod.tones = {{0.004, -d2m - 8.0 * MHz, 0.0}};
  CHECK_THROWS_AS(alpha_series(params, mod, 1, -1), SmallDenominatorError);
  mod.tones[0].omega = -d2m - 12.0 * MHz;  // just outside the 10 MHz guard
  CHECK_NOTHROW(alpha_series(params, mod, 1, -1));

  try {
    mod.tones[0].omega = -d2m - 8.0 * MHz;
    alpha_series(params, mod, 1, -1);
    FAIL("expected SmallDenominatorError");
  } catch (const SmallDenominatorError& e) {
    CHECK(e.q == 1);
    CHECK(e.p == 0);
    CHECK(std::abs(e.value) < 10.0 * MHz);
  }
}

TEST_CASE("swt table metadata") {
  const auto params = testing::reference_device();
  const auto mod = simple_resonant_mod(params, 0.01, 0.02);
  const auto table = build_swt_table(params, mod, SwtOrder::bessel_first);
  CHECK(table.lambda.size() == 2);
  CHECK(table.truncation_tail_bound < 1e-10);  // tiny at these lambdas
  CHECK(table.warnings.empty());
  double max_abs = 0.0;
  for (const auto& pair : table.alpha)
    for (const auto& comp : pair)
      max_abs = std::max({max_abs, std::abs(comp.static_component),
                          comp.harmonics.cwiseAbs().maxCoeff()});
  CHECK(max_abs < 1.0);
}
