// Integer-order Bessel J with the reflection rules needed for signed
// arguments: J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x).
#pragma once

#include <cmath>

namespace paramsim {

inline double bessel_j(int n, double x) {
  bool negate = false;
  if (n < 0) {
    n = -n;
    if (n % 2 == 1) negate = !negate;
  }
  if (x < 0) {
    x = -x;
    if (n % 2 == 1) negate = !negate;
  }
  const double value = std::cyl_bessel_j(static_cast<double>(n), x);
  return negate ? -value : value;
}

}  // namespace paramsim
