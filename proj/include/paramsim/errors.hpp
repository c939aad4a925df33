#pragma once

#include <stdexcept>
#include <string>

namespace paramsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Resonant denominator q*w1 + p*w2 + Delta too close to zero in a
// perturbative series or harmonic-balance solve.
struct SmallDenominatorError : std::runtime_error {
  SmallDenominatorError(int q_, int p_, double value_rad_s, const std::string& what_)
      : std::runtime_error(what_), q(q_), p(p_), value(value_rad_s) {}
  int q;
  int p;
  double value;
};

struct DegenerateProjectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegratorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExtractionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace paramsim
