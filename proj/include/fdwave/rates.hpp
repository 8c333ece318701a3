#pragma once

// Decay-rate constants: nu# = min(-1, 2*beta + alpha/2 - 2) and the energy
// rate gamma# = 2 / (1 - 2*(1 + nu#/alpha)).

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fdwave {

inline void check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("beta must lie in [0,1], got " + std::to_string(beta));
}

inline double nu_sharp(double alpha, double beta) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("alpha must lie in (0,2), got " + std::to_string(alpha));
  check_beta(beta);
  return std::min(-1.0, 2.0 * beta + alpha / 2.0 - 2.0);
}

inline double gamma_sharp(double alpha, double beta) {
  const double nu = nu_sharp(alpha, beta);
  return 2.0 / (1.0 - 2.0 * (1.0 + nu / alpha));
}

struct RateConstants {
  double alpha = 1.0;
  double beta = 0.0;
  double nu = -1.5;
  double gamma = 1.0;

  static RateConstants make(double alpha, double beta) {
    RateConstants r;
    r.alpha = alpha;
    r.beta = beta;
    r.nu = nu_sharp(alpha, beta);
    r.gamma = gamma_sharp(alpha, beta);
    return r;
  }
};

}  // namespace fdwave
