#pragma once

// Reference computations for the tests. Everything here is brute force
// (numerical integration, quadrature on a grid) and never calls the
// closed-form pieces it is used to check.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "eep.hpp"

namespace oracle {

struct Fourier {
  double mean = 0.0;
  std::vector<double> cos_amp;  // index n, entry 0 unused
  std::vector<double> sin_amp;
};

/// Rectangle rule on a uniform periodic grid (the trapezoid rule for a
/// periodic integrand).
inline Fourier project(const std::function<double(double)>& f, int n_max,
                       std::size_t samples = 1024) {
  Fourier out;
  out.cos_amp.assign(n_max + 1, 0.0);
  out.sin_amp.assign(n_max + 1, 0.0);
  const double N = static_cast<double>(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = eep::two_pi * static_cast<double>(k) / N;
    const double v = f(t);
    out.mean += v / N;
    for (int n = 1; n <= n_max; ++n) {
      out.cos_amp[n] += 2.0 * v * std::cos(n * t) / N;
      out.sin_amp[n] += 2.0 * v * std::sin(n * t) / N;
    }
  }
  return out;
}

/// Steady response of x'' + beta x' + k x = forcing(tau): integrate from rest
/// for `periods` periods, then Fourier-analyse one more period.
inline Fourier steady_fourier(const std::function<double(double)>& forcing, double beta,
                              double k, int n_max, int periods = 200,
                              std::size_t samples = 1024) {
  auto f = [&](double t, const eep::ode::Vec<2>& y) {
    return eep::ode::Vec<2>{y[1], forcing(t) - beta * y[1] - k * y[0]};
  };
  eep::ode::DormandPrince<2> dp(0.0, {0.0, 0.0}, {.tol = 1e-13});
  const double t0 = eep::two_pi * periods;
  dp.advance_to(f, t0);
  std::vector<double> xs(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    dp.advance_to(f, t0 + eep::two_pi * static_cast<double>(j) / static_cast<double>(samples));
    xs[j] = dp.state()[0];
  }
  return project([&](double t) {
    const auto j = static_cast<std::size_t>(std::lround(t / eep::two_pi * samples)) % samples;
    return xs[j];
  }, n_max, samples);
}

struct SteadyError {
  double max_abs_err = 0.0;
  double amplitude = 0.0;
};

/// Max |theta_dot approx - theta_dot numeric| over one period after a long
/// transient started from the approximation's own state at tau = 0. No
/// shooting involved.
inline SteadyError steady_velocity_error(const eep::AsymptoticSolution& sol,
                                         const eep::DimensionlessParams& d, int periods = 200,
                                         std::size_t samples = 1024) {
  auto f = [&](double t, const eep::ode::Vec<2>& y) {
    const auto r = eep::rhs(t, {y[0], y[1]}, d);
    return eep::ode::Vec<2>{r.theta_dot, r.theta_ddot};
  };
  const auto s0 = sol.state_at(0.0);
  eep::ode::DormandPrince<2> dp(0.0, {s0.theta, s0.theta_dot}, {.tol = 1e-12});
  const double t0 = eep::two_pi * periods;
  SteadyError e;
  double vmax = -1e300, vmin = 1e300;
  for (std::size_t j = 0; j < samples; ++j) {
    const double phase = eep::two_pi * static_cast<double>(j) / static_cast<double>(samples);
    dp.advance_to(f, t0 + phase);
    const double v = dp.state()[1];
    vmax = std::max(vmax, v);
    vmin = std::min(vmin, v);
    e.max_abs_err = std::max(e.max_abs_err, std::abs(v - sol.theta_dot(phase)));
  }
  e.amplitude = (vmax - vmin) / 2.0;
  return e;
}

/// Right-hand side of the scaled equation for the slow variable, written in
/// the generating-oscillator amplitude q and phase psi, with no expansion.
inline double scaled_forcing(double tau, double q, double psi, double eps, double beta_hat,
                             double w, double mu) {
  const double se = std::sqrt(eps);
  const double x = beta_hat / mu + q * std::cos(psi);
  const double xd = -std::sqrt(mu) * q * std::sin(psi);
  return mu * (x - std::sin(se * x) / se) - se * beta_hat * xd +
         se * std::sin(2.0 * tau - se * x) + se * w * std::sin(tau - se * x);
}

/// Period average of the exact standard-form right-hand sides at frozen (Q, Zeta).
inline std::pair<double, double> averaged_standard_form(double Q, double Z, double eps,
                                                        double beta_hat, double w, double mu,
                                                        std::size_t samples = 4096) {
  const double sm = std::sqrt(mu);
  double dq = 0.0, dz = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = eep::two_pi * static_cast<double>(k) / static_cast<double>(samples);
    const double psi = Z + t;
    const double f = scaled_forcing(t, Q, psi, eps, beta_hat, w, mu);
    dq += -std::sin(psi) * f / sm;
    dz += sm - 1.0 - std::cos(psi) * f / (Q * sm);
  }
  return {dq / samples, dz / samples};
}

/// Runs a shell command, capturing stdout. Returns the exit status.
inline int run(const std::string& cmd, std::string* out = nullptr) {
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return -1;
  std::string text;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) text.append(buf, n);
  const int status = pclose(p);
  if (out) *out = std::move(text);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace oracle
