// Common scalar/matrix aliases and unit helpers.
//
// All frequencies are stored as angular frequencies (rad/s) and all times in
// seconds. Configuration files use ordinary frequencies (GHz/MHz); the unit
// constants below fold in the 2*pi at ingestion so that `5.8 * GHz` is the
// angular frequency of a 5.8 GHz transition.
#pragma once

#include <complex>
#include <Eigen/Dense>

namespace paramsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Angular-frequency units.
inline constexpr double Hz = two_pi;
inline constexpr double kHz = two_pi * 1e3;
inline constexpr double MHz = two_pi * 1e6;
inline constexpr double GHz = two_pi * 1e9;

// Time units.
inline constexpr double second = 1.0;
inline constexpr double us = 1e-6;
inline constexpr double ns = 1e-9;
inline constexpr double ps = 1e-12;

inline constexpr Complex imag_unit{0.0, 1.0};

}  // namespace paramsim
