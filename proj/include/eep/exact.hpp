#pragma once

// Exact rotations theta = theta0 - tau of the unperturbed equation
// (circular pivot path, no gravity) and their linear stability.

#include <cmath>
#include <numbers>
#include <vector>

#include "eep/error.hpp"

namespace eep {

struct ExactRotation {
  double theta0 = 0.0;
  int k = 0;
  bool stable = false;
};

/// Routh-Hurwitz test for eta'' + beta eta' + mu cos(theta0) eta = 0.
inline bool stability_check(double beta, double mu, double theta0) {
  if (!(mu > 0.0)) throw Error(ErrorCode::invalid_parameter, "mu must be positive");
  if (std::abs(std::sin(theta0) - beta / mu) > 1e-9)
    throw Error(ErrorCode::not_a_branch, "sin(theta0) != beta/mu: not an exact rotation");
  return beta > 0.0 && mu * std::cos(theta0) > 0.0;
}

/// Parameters admitting an asymptotically stable rotation: 0 < beta < mu.
inline bool existence_window(double beta, double mu) { return 0.0 < beta && beta < mu; }

/// Both branches for each k in [k_min, k_max].
inline std::vector<ExactRotation> exact_branches(double beta, double mu, int k_min = 0,
                                                 int k_max = 0) {
  if (!(mu > 0.0)) throw Error(ErrorCode::invalid_parameter, "mu must be positive");
  if (k_max < k_min) throw Error(ErrorCode::invalid_parameter, "empty k range");
  if (std::abs(beta) > mu)
    throw Error(ErrorCode::no_solution, "no exact rotation: |beta| > mu");
  const double base = std::asin(beta / mu);
  std::vector<ExactRotation> out;
  for (int k = k_min; k <= k_max; ++k) {
    const double shift = 2.0 * std::numbers::pi * k;
    // cos(base) >= 0, so only the first branch can be stable, and only for beta > 0.
    out.push_back({base + shift, k, beta > 0.0 && std::cos(base) > 0.0});
    out.push_back({std::numbers::pi - base + shift, k, false});
  }
  return out;
}

}  // namespace eep
