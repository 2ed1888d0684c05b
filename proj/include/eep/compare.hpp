#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "eep/averaging.hpp"
#include "eep/dynamics.hpp"
#include "eep/error.hpp"
#include "eep/exact.hpp"
#include "eep/io.hpp"
#include "eep/multiscale.hpp"
#include "eep/solution.hpp"

namespace eep {

struct CompareOptions {
  double tol = 1e-10;          // integrator tolerance for the sampled reference period
  std::size_t samples = 1024;  // samples over one period
  int transient_periods = 200;
  ShootingOptions shooting{};
};

struct ComparisonReport {
  Method method = Method::Exact;
  double max_abs_err = 0.0;  // max |theta_dot approx - theta_dot numeric| over a period
  double rel_err = 0.0;      // max_abs_err / amplitude
  double amplitude = 0.0;    // half peak-to-peak of the numeric theta_dot
};

namespace detail {

inline std::pair<PeriodicOrbit, bool> polish(const DimensionlessParams& d,
                                             const PeriodicOrbit& guess,
                                             const ShootingOptions& opt) {
  const auto orbit = find_periodic_rotation(d, guess, opt);
  return {orbit, is_stable(floquet_multipliers(orbit, d, opt.integrator_tol))};
}

}  // namespace detail

/// Attracting 1:1 rotation nearest the given guess. Newton is tried from the
/// guess directly; if that lands on an unstable orbit (or fails), the state is
/// pushed off along the unstable direction, settled by integration and
/// polished again.
inline PeriodicOrbit reference_orbit(const DimensionlessParams& d, const PeriodicOrbit& guess,
                                     const CompareOptions& opt = {}) {
  State start = guess.initial_state();
  try {
    auto [orbit, stable] = detail::polish(d, guess, opt.shooting);
    if (stable) return orbit;
    const auto M = monodromy(orbit, d, opt.shooting.integrator_tol);
    const auto ev = floquet_multipliers(orbit, d, opt.shooting.integrator_tol);
    // Eigenvector of the dominant (real) multiplier.
    const double lam = ev[0].real();
    double ex = M[1], ey = lam - M[0];
    if (std::hypot(ex, ey) < 1e-14) {
      ex = lam - M[3];
      ey = M[2];
    }
    if (std::hypot(ex, ey) < 1e-14) {
      ex = 1.0;
      ey = 0.0;
    }
    const double n = std::hypot(ex, ey);
    start = State{orbit.phi0 + 1e-2 * ex / n, orbit.v0 - 1.0 + 1e-2 * ey / n};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::no_orbit_found && e.code() != ErrorCode::blowup) throw;
  }
  const auto [settled, periods] = settle(d, start, opt.transient_periods, opt.tol);
  (void)periods;
  auto [orbit, stable] =
      detail::polish(d, {settled.theta, settled.theta_dot + 1.0, two_pi, 0.0}, opt.shooting);
  if (!stable) throw Error(ErrorCode::no_orbit_found, "no stable 1:1 rotation near the guess");
  return orbit;
}

inline ComparisonReport compare_solution(const AsymptoticSolution& sol,
                                         const DimensionlessParams& d,
                                         const CompareOptions& opt = {}) {
  if (opt.samples < 2) throw Error(ErrorCode::invalid_parameter, "need at least 2 samples");
  const auto orbit = reference_orbit(d, sol.orbit_guess(), opt);

  std::vector<double> times(opt.samples);
  for (std::size_t k = 0; k < opt.samples; ++k)
    times[k] = two_pi * static_cast<double>(k) / static_cast<double>(opt.samples);
  auto f = [&d](double tau, const ode::Vec<2>& y) {
    const auto r = rhs(tau, {y[0], y[1]}, d);
    return ode::Vec<2>{r.theta_dot, r.theta_ddot};
  };
  const State s0 = orbit.initial_state();
  const auto ys =
      ode::integrate_at<2>(f, 0.0, ode::Vec<2>{s0.theta, s0.theta_dot}, times, {.tol = opt.tol});

  double err = 0.0, vmax = -std::numeric_limits<double>::infinity(), vmin = -vmax;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double v = ys[k][1];
    err = std::max(err, std::abs(sol.theta_dot(times[k]) - v));
    vmax = std::max(vmax, v);
    vmin = std::min(vmin, v);
  }
  ComparisonReport rep;
  rep.method = sol.method;
  rep.max_abs_err = err;
  rep.amplitude = (vmax - vmin) / 2.0;
  if (rep.amplitude > 0.0)
    rep.rel_err = err / rep.amplitude;
  else
    rep.rel_err = err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return rep;
}

inline nlohmann::json to_json(const ComparisonReport& r) {
  return {{"method", std::string(to_string(r.method))},
          {"max_abs_err", r.max_abs_err},
          {"rel_err", r.rel_err},
          {"amplitude", r.amplitude}};
}

/// Builds the closed-form solution of the requested kind.
inline AsymptoticSolution build_solution(Method m, const DimensionlessParams& d) {
  switch (m) {
    case Method::Exact: {
      if (d.eps != 0.0 || d.omega != 0.0)
        throw Error(ErrorCode::invalid_parameter, "exact solution needs eps = 0 and omega = 0");
      const auto branches = exact_branches(d.beta, d.mu);
      if (!branches.front().stable)
        throw Error(ErrorCode::no_solution, "no stable exact rotation for these parameters");
      return exact_solution(branches.front().theta0);
    }
    case Method::Multiscale1: return multiscale_solution(d, 1);
    case Method::Multiscale2: return multiscale_solution(d, 2);
    case Method::Averaging2: return averaging_solution(d);
  }
  throw Error(ErrorCode::invalid_parameter, "unknown method");
}

struct SweepRow {
  double beta = 0.0, eps = 0.0, mu = 0.0, omega = 0.0;
  Method method = Method::Exact;
  double max_abs_err = std::numeric_limits<double>::quiet_NaN();
  double rel_err = std::numeric_limits<double>::quiet_NaN();
  double amplitude = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";  // "ok" or the error code that prevented the row
};

struct SweepResult {
  std::vector<SweepRow> rows;  // beta-major, methods in the requested order
};

/// Linear (or geometric) grid of `count` points from lo to hi inclusive.
inline std::vector<double> make_grid(double lo, double hi, std::size_t count, bool log_spacing) {
  if (count == 0) throw Error(ErrorCode::invalid_parameter, "grid needs at least one point");
  if (log_spacing && !(lo > 0.0 && hi > 0.0))
    throw Error(ErrorCode::invalid_parameter, "log grid needs positive bounds");
  std::vector<double> g(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
    g[k] = log_spacing ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
  }
  if (count > 1) g.back() = hi;
  return g;
}

/// One comparison per (beta, method). Failures become rows with a status
/// instead of aborting the sweep. Points run on up to `jobs` threads; row
/// order never depends on scheduling.
inline SweepResult sweep_beta(const DimensionlessParams& base, std::span<const double> beta_grid,
                              std::span<const Method> methods, const CompareOptions& opt = {},
                              unsigned jobs = 1) {
  SweepResult out;
  out.rows.resize(beta_grid.size() * methods.size());
  auto run_one = [&](std::size_t idx) {
    const double beta = beta_grid[idx / methods.size()];
    const Method m = methods[idx % methods.size()];
    DimensionlessParams d = base;
    d.beta = beta;
    SweepRow row;
    row.beta = beta;
    row.eps = d.eps;
    row.mu = d.mu;
    row.omega = d.omega;
    row.method = m;
    try {
      if (!existence_window(beta, d.mu))
        throw Error(ErrorCode::no_orbit_found, "beta outside (0, mu)");
      const auto rep = compare_solution(build_solution(m, d), d, opt);
      row.max_abs_err = rep.max_abs_err;
      row.rel_err = rep.rel_err;
      row.amplitude = rep.amplitude;
    } catch (const Error& e) {
      row.status = std::string(to_string(e.code()));
    }
    out.rows[idx] = row;
  };

  const std::size_t total = out.rows.size();
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(total, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < total; ++i) run_one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < total; i = next++) run_one(i);
    });
  for (auto& t : pool) t.join();
  return out;
}

inline void write_csv(std::ostream& os, const SweepResult& r) {
  os << "beta,eps,mu,omega,method,max_abs_err,rel_err,amplitude,status\n";
  for (const auto& row : r.rows)
    os << format_double(row.beta) << ',' << format_double(row.eps) << ','
       << format_double(row.mu) << ',' << format_double(row.omega) << ','
       << to_string(row.method) << ',' << format_double(row.max_abs_err) << ','
       << format_double(row.rel_err) << ',' << format_double(row.amplitude) << ','
       << row.status << '\n';
}

}  // namespace eep
