#pragma once

// Multiple-scales rotations for order-one damping: theta = -tau + theta0 +
// eps theta1 + eps^2 theta2, with theta0 on the stable exact branch.

#include <cmath>
#include <string>

#include "eep/error.hpp"
#include "eep/harmonic.hpp"
#include "eep/params.hpp"
#include "eep/solution.hpp"

namespace eep {

namespace detail {

inline void require_window(const DimensionlessParams& d) {
  validate(d);
  if (!(0.0 < d.beta && d.beta < d.mu))
    throw Error(ErrorCode::no_solution, "multiple-scales solution needs 0 < beta < mu");
}

// mu sin(theta0) = beta and mu cos(theta0) = sqrt(mu^2 - beta^2) on the
// stable branch; everything below is written in terms of these.
inline double stable_theta0(const DimensionlessParams& d) {
  const double theta0 = std::asin(d.beta / d.mu);
  const double tol = 1e-12 * d.mu;
  if (std::abs(d.mu * std::sin(theta0) - d.beta) > tol ||
      std::abs(d.mu * std::cos(theta0) - d.stiffness()) > tol)
    throw Error(ErrorCode::not_a_branch, "theta0 fails the stable-branch identities");
  return theta0;
}

}  // namespace detail

/// Right-hand side of the first-order equation as a series:
/// sin(2 tau - theta0) + w sin(tau - theta0).
inline HarmonicSeries first_order_forcing(const DimensionlessParams& d) {
  detail::require_window(d);
  const double w = d.w();
  const double r = d.beta / d.mu;
  const double c = std::sqrt(1.0 - r * r);
  HarmonicSeries f;
  if (w != 0.0) f.add(1, -w * r, w * c);
  f.add(2, -r, c);
  return f;
}

inline HarmonicSeries theta1_series(const DimensionlessParams& d) {
  return respond(first_order_forcing(d), d.beta, d.mu);
}

/// Right-hand side of the second-order equation,
///   beta theta1^2 / 2 - (cos(2 tau - theta0) + w cos(tau - theta0)) theta1,
/// as mean + harmonics 1..4.
inline HarmonicSeries second_order_forcing(const DimensionlessParams& d,
                                           const HarmonicSeries& theta1) {
  const HarmonicSeries f1 = first_order_forcing(d);
  const auto [A1, B1] = f1.coefficient(1);
  const auto [A2, B2] = f1.coefficient(2);
  const auto [a1, b1] = theta1.coefficient(1);
  const auto [a2, b2] = theta1.coefficient(2);
  // Weight of the theta1^2 group: the Taylor term is beta theta1^2 / 2.
  const double h = d.beta / 2.0;

  const double A0 = (b2 * b2 + b1 * b1 + a2 * a2 + a1 * a1) * h +
                    (A1 * b1 + A2 * b2 - B2 * a2 - B1 * a1);
  const double An[5] = {
      A0,
      (a1 * a2 + b1 * b2) * h + (A1 * b2 + A2 * b1 - B1 * a2 - B2 * a1) / 2.0,
      (a1 * a1 - b1 * b1) * h / 2.0 - (A1 * b1 + B1 * a1) / 2.0,
      (a1 * a2 - b1 * b2) * h - (A2 * b1 + A1 * b2 + B1 * a2 + B2 * a1) / 2.0,
      (a2 * a2 - b2 * b2) * h / 2.0 - (A2 * b2 + B2 * a2) / 2.0,
  };
  const double Bn[5] = {
      0.0,
      (a1 * b2 - b1 * a2) * h - (A1 * a2 - A2 * a1 + B1 * b2 - B2 * b1) / 2.0,
      h * a1 * b1 + (A1 * a1 - B1 * b1) / 2.0,
      (a1 * b2 + b1 * a2) * h + (A1 * a2 + A2 * a1 - B1 * b2 - B2 * b1) / 2.0,
      h * a2 * b2 + (A2 * a2 - B2 * b2) / 2.0,
  };
  HarmonicSeries out(An[0] / 2.0);
  for (int n = 1; n <= 4; ++n)
    if (An[n] != 0.0 || Bn[n] != 0.0) out.add(n, An[n], Bn[n]);
  return out;
}

inline HarmonicSeries theta2_series(const DimensionlessParams& d) {
  return respond(second_order_forcing(d, theta1_series(d)), d.beta, d.mu);
}

namespace detail {

// Printed denominators of the first-order closed form.
inline double closed_form_den2(double beta, double mu, double s) {
  return 3.0 * beta * beta + mu * mu + 8.0 * (2.0 - s);
}
inline double closed_form_den1(double mu, double s) { return mu * mu + 1.0 - 2.0 * s; }

}  // namespace detail

/// First-order rotation evaluated directly in the closed form
///   theta = -tau + theta0
///         - eps   (2 beta cos(2tau - theta0) + (4 - s) sin(2tau - theta0)) / D2
///         - omega^2 (beta cos(tau - theta0) + (1 - s) sin(tau - theta0)) / D1
/// with s = sqrt(mu^2 - beta^2).
inline double first_order_closed_form(const DimensionlessParams& d, double tau) {
  detail::require_window(d);
  const double theta0 = detail::stable_theta0(d);
  const double s = d.stiffness();
  const double x2 = 2.0 * tau - theta0, x1 = tau - theta0;
  double th = -tau + theta0 -
              d.eps * (2.0 * d.beta * std::cos(x2) + (4.0 - s) * std::sin(x2)) /
                  detail::closed_form_den2(d.beta, d.mu, s);
  const double w2 = d.omega * d.omega;
  if (w2 != 0.0)
    th -= w2 * (d.beta * std::cos(x1) + (1.0 - s) * std::sin(x1)) /
          detail::closed_form_den1(d.mu, s);
  return th;
}

/// The closed form above expanded into cos/sin of n tau (theta1 only).
inline HarmonicSeries closed_form_theta1(const DimensionlessParams& d) {
  detail::require_window(d);
  const double theta0 = detail::stable_theta0(d);
  const double s = d.stiffness();
  const double sn = std::sin(theta0), cs = std::cos(theta0);
  // -amp (P cos(n tau - theta0) + R sin(n tau - theta0)) / D
  auto add_term = [&](HarmonicSeries& out, int n, double amp, double P, double R, double D) {
    if (std::abs(D) <= denominator_guard(d.mu))
      throw Error(ErrorCode::resonance, "resonant denominator for harmonic " + std::to_string(n));
    out.add(n, -amp * (P * cs - R * sn) / D, -amp * (P * sn + R * cs) / D);
  };
  HarmonicSeries out;
  const double w = d.w();
  if (w != 0.0) add_term(out, 1, w, d.beta, 1.0 - s, detail::closed_form_den1(d.mu, s));
  add_term(out, 2, 1.0, 2.0 * d.beta, 4.0 - s, detail::closed_form_den2(d.beta, d.mu, s));
  return out;
}

inline AsymptoticSolution multiscale_solution(const DimensionlessParams& d, int order) {
  if (order != 1 && order != 2)
    throw Error(ErrorCode::invalid_parameter, "multiple-scales order must be 1 or 2");
  detail::require_window(d);
  AsymptoticSolution sol;
  sol.method = order == 1 ? Method::Multiscale1 : Method::Multiscale2;
  sol.theta0 = detail::stable_theta0(d);
  sol.eps = d.eps;
  sol.series1 = closed_form_theta1(d);
  sol.weight1 = d.eps;
  if (order == 2) {
    sol.series2 = theta2_series(d);
    sol.weight2 = d.eps * d.eps;
  }
  return sol;
}

}  // namespace eep
