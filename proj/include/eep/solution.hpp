#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "eep/dynamics.hpp"
#include "eep/error.hpp"
#include "eep/harmonic.hpp"
#include "eep/io.hpp"

namespace eep {

enum class Method { Exact, Multiscale1, Multiscale2, Averaging2 };

constexpr std::string_view to_string(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::Multiscale1: return "multiscale1";
    case Method::Multiscale2: return "multiscale2";
    case Method::Averaging2: return "averaging2";
  }
  return "unknown";
}

inline Method parse_method(std::string_view s) {
  for (Method m : {Method::Exact, Method::Multiscale1, Method::Multiscale2, Method::Averaging2})
    if (to_string(m) == s) return m;
  throw Error(ErrorCode::invalid_parameter, "unknown method '" + std::string(s) + "'");
}

/// A closed-form rotation
///   theta(tau) = -tau + theta0 + weight1 * series1(tau) + weight2 * series2(tau).
/// Multiple-scales solutions use weights eps and eps^2; the averaging
/// solution stores already-scaled terms with weight 1.
struct AsymptoticSolution {
  Method method = Method::Exact;
  double theta0 = 0.0;
  double eps = 0.0;
  HarmonicSeries series1;
  std::optional<HarmonicSeries> series2;
  double weight1 = 0.0;
  double weight2 = 0.0;

  double theta(double tau) const {
    double th = -tau + theta0 + weight1 * series1.evaluate(tau);
    if (series2) th += weight2 * series2->evaluate(tau);
    return th;
  }

  double theta_dot(double tau) const {
    double v = -1.0 + weight1 * series1.derivative(tau);
    if (series2) v += weight2 * series2->derivative(tau);
    return v;
  }

  double theta_ddot(double tau) const {
    double a = weight1 * series1.second_derivative(tau);
    if (series2) a += weight2 * series2->second_derivative(tau);
    return a;
  }

  State state_at(double tau) const { return {theta(tau), theta_dot(tau)}; }

  /// Initial guess for shooting in the rotating frame.
  PeriodicOrbit orbit_guess() const {
    const State s = state_at(0.0);
    return {s.theta, s.theta_dot + 1.0, two_pi, 0.0};
  }
};

inline AsymptoticSolution exact_solution(double theta0) {
  AsymptoticSolution sol;
  sol.method = Method::Exact;
  sol.theta0 = theta0;
  return sol;
}

inline nlohmann::json to_json(const AsymptoticSolution& sol) {
  nlohmann::json j{{"method", std::string(to_string(sol.method))},
                   {"theta0", sol.theta0},
                   {"eps", sol.eps},
                   {"weight1", sol.weight1},
                   {"series1", to_json(sol.series1)}};
  if (sol.series2) {
    j["weight2"] = sol.weight2;
    j["series2"] = to_json(*sol.series2);
  } else {
    j["series2"] = nullptr;
  }
  return j;
}

/// One period [0, 2 pi) sampled at `samples` points, Trajectory CSV schema.
inline void write_csv(std::ostream& os, const AsymptoticSolution& sol, std::size_t samples) {
  if (samples == 0) throw Error(ErrorCode::invalid_parameter, "samples must be positive");
  os << "tau,theta,theta_dot\n";
  for (std::size_t k = 0; k < samples; ++k) {
    const double tau = two_pi * static_cast<double>(k) / static_cast<double>(samples);
    os << format_double(tau) << ',' << format_double(sol.theta(tau)) << ','
       << format_double(sol.theta_dot(tau)) << '\n';
  }
}

}  // namespace eep
