#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "eep/error.hpp"
#include "eep/io.hpp"
#include "eep/ode.hpp"
#include "eep/params.hpp"

namespace eep {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct State {
  double theta = 0.0;      // rad
  double theta_dot = 0.0;  // per unit of tau
};

struct StateRate {
  double theta_dot = 0.0;
  double theta_ddot = 0.0;
};

/// Maps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

inline StateRate rhs(double tau, const State& s, const DimensionlessParams& d) {
  const double acc = -d.beta * s.theta_dot - d.mu * std::sin(tau + s.theta) +
                     d.eps * std::sin(tau - s.theta) - d.omega * d.omega * std::sin(s.theta);
  return {s.theta_dot, acc};
}

/// Equation of motion in physical time t [s]; theta_dot is dtheta/dt.
inline StateRate rhs_physical(double t, const State& s, const PhysicalParams& p) {
  const double W2 = p.Omega * p.Omega;
  const double xdd = -p.X * W2 * std::sin(p.Omega * t);
  const double ydd = -p.Y * W2 * std::cos(p.Omega * t);
  const double ml = p.m * p.l;
  const double acc = -(p.c * s.theta_dot + ml * (p.g - ydd) * std::sin(s.theta) -
                       ml * xdd * std::cos(s.theta)) /
                     (ml * p.l);
  return {s.theta_dot, acc};
}

struct Sample {
  double tau = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
};

class Trajectory {
 public:
  Trajectory(std::vector<Sample> samples, std::size_t steady_start)
      : samples_(std::move(samples)), steady_start_(steady_start) {
    if (samples_.empty()) throw Error(ErrorCode::invalid_parameter, "empty trajectory");
    if (steady_start_ >= samples_.size())
      throw Error(ErrorCode::invalid_parameter, "steady_start out of range");
    for (std::size_t i = 1; i < samples_.size(); ++i)
      if (!(samples_[i].tau > samples_[i - 1].tau))
        throw Error(ErrorCode::invalid_parameter, "trajectory times must increase strictly");
  }

  const std::vector<Sample>& samples() const noexcept { return samples_; }
  std::size_t steady_start() const noexcept { return steady_start_; }
  std::size_t size() const noexcept { return samples_.size(); }
  const Sample& back() const { return samples_.back(); }

 private:
  std::vector<Sample> samples_;
  std::size_t steady_start_;
};

struct IntegrateOptions {
  double tol = 1e-10;
  std::size_t samples_per_period = 64;
  double transient_periods = 200.0;
};

namespace detail {

inline std::vector<double> uniform_times(double t0, double t1, double spacing) {
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((t1 - t0) / spacing - 1e-9)));
  std::vector<double> times(n + 1);
  for (std::size_t k = 0; k <= n; ++k)
    times[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n);
  times.back() = t1;
  return times;
}

inline void check_tolerance(double tol) {
  if (!(tol >= 1e-13 && tol <= 1e-3))
    throw Error(ErrorCode::invalid_parameter, "tolerance must lie in [1e-13, 1e-3]");
}

// First sample after the transient, or the start of the last period when the
// run is shorter than the transient.
inline std::size_t steady_index(const std::vector<double>& times, double t_steady,
                                double period) {
  const double t1 = times.back();
  const double mark = t_steady <= t1 ? t_steady : std::max(times.front(), t1 - period);
  std::size_t i = 0;
  while (i + 1 < times.size() && times[i] < mark - 1e-12 * std::max(1.0, std::abs(mark))) ++i;
  return i;
}

}  // namespace detail

/// Integrates the dimensionless equation on [tau0, tau1] and samples it on an
/// equally spaced grid (both ends included).
inline Trajectory integrate(const DimensionlessParams& d, const State& s0, double tau0,
                            double tau1, const IntegrateOptions& opt = {}) {
  validate(d);
  detail::check_tolerance(opt.tol);
  if (!(tau1 > tau0)) throw Error(ErrorCode::invalid_parameter, "tau1 must exceed tau0");
  if (opt.samples_per_period == 0)
    throw Error(ErrorCode::invalid_parameter, "samples_per_period must be positive");

  const auto times =
      detail::uniform_times(tau0, tau1, two_pi / static_cast<double>(opt.samples_per_period));
  auto f = [&d](double tau, const ode::Vec<2>& y) {
    const auto r = rhs(tau, {y[0], y[1]}, d);
    return ode::Vec<2>{r.theta_dot, r.theta_ddot};
  };
  const auto ys = ode::integrate_at<2>(f, tau0, ode::Vec<2>{s0.theta, s0.theta_dot}, times,
                                       {.tol = opt.tol});
  std::vector<Sample> samples(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) samples[k] = {times[k], ys[k][0], ys[k][1]};
  return Trajectory(std::move(samples),
                    detail::steady_index(times, tau0 + opt.transient_periods * two_pi, two_pi));
}

inline Trajectory integrate(const DimensionlessParams& d, const State& s0, double tau0,
                            double tau1, double tol) {
  return integrate(d, s0, tau0, tau1, IntegrateOptions{.tol = tol});
}

/// Physical-time counterpart of integrate(); the `tau` column holds t [s] and
/// `theta_dot` is dtheta/dt.
inline Trajectory integrate_physical(const PhysicalParams& p, const State& s0, double t0,
                                     double t1, const IntegrateOptions& opt = {}) {
  validate(p);
  detail::check_tolerance(opt.tol);
  if (!(t1 > t0)) throw Error(ErrorCode::invalid_parameter, "t1 must exceed t0");
  const double period = two_pi / p.Omega;
  const auto times =
      detail::uniform_times(t0, t1, period / static_cast<double>(opt.samples_per_period));
  auto f = [&p](double t, const ode::Vec<2>& y) {
    const auto r = rhs_physical(t, {y[0], y[1]}, p);
    return ode::Vec<2>{r.theta_dot, r.theta_ddot};
  };
  const auto ys = ode::integrate_at<2>(f, t0, ode::Vec<2>{s0.theta, s0.theta_dot}, times,
                                       {.tol = opt.tol});
  std::vector<Sample> samples(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) samples[k] = {times[k], ys[k][0], ys[k][1]};
  return Trajectory(std::move(samples),
                    detail::steady_index(times, t0 + opt.transient_periods * period, period));
}

inline void write_csv(std::ostream& os, const Trajectory& traj) {
  os << "tau,theta,theta_dot\n";
  for (const auto& s : traj.samples())
    os << format_double(s.tau) << ',' << format_double(s.theta) << ','
       << format_double(s.theta_dot) << '\n';
}

// ---------------------------------------------------------------------------
// 1:1 rotations as fixed points of the 2*pi map in the rotating frame
// phi = theta + tau, v = dphi/dtau = theta_dot + 1.

struct PeriodicOrbit {
  double phi0 = 0.0;
  double v0 = 0.0;
  double period = two_pi;
  double residual = 0.0;

  State initial_state() const { return {phi0, v0 - 1.0}; }
};

using Matrix2 = std::array<double, 4>;  // row-major

struct ReturnMap {
  double phi = 0.0;   // unwrapped
  double v = 0.0;
  Matrix2 jacobian{};
};

/// Flow over one period together with its state-transition matrix.
inline ReturnMap return_map(const DimensionlessParams& d, double phi0, double v0,
                            double tol = 1e-12) {
  const double w2 = d.omega * d.omega;
  auto f = [&d, w2](double tau, const ode::Vec<6>& y) {
    const double th = y[0], thd = y[1];
    const double acc = -d.beta * thd - d.mu * std::sin(tau + th) + d.eps * std::sin(tau - th) -
                       w2 * std::sin(th);
    const double k =
        -d.mu * std::cos(tau + th) - d.eps * std::cos(tau - th) - w2 * std::cos(th);
    // dPhi/dtau = A Phi with A = [[0, 1], [k, -beta]]; Phi row-major in y[2..5].
    return ode::Vec<6>{thd,  acc,  y[4], y[5], k * y[2] - d.beta * y[4],
                       k * y[3] - d.beta * y[5]};
  };
  const ode::Vec<6> y0{phi0, v0 - 1.0, 1.0, 0.0, 0.0, 1.0};
  const auto y = ode::integrate_to<6>(f, 0.0, y0, two_pi, {.tol = tol});
  return {y[0] + two_pi, y[1] + 1.0, {y[2], y[3], y[4], y[5]}};
}

struct ShootingOptions {
  double integrator_tol = 1e-12;
  double residual_tol = 1e-10;
  int max_iterations = 50;
  double max_step = 1.0;    // cap on each Newton update component
  double blowup = 1e6;      // |v| beyond this counts as divergence
};

/// Newton iteration on the period map starting from the guess (phi0, v0).
inline PeriodicOrbit find_periodic_rotation(const DimensionlessParams& d,
                                            const PeriodicOrbit& guess,
                                            const ShootingOptions& opt = {}) {
  validate(d);
  double phi = guess.phi0, v = guess.v0;
  for (int it = 0; it <= opt.max_iterations; ++it) {
    if (!std::isfinite(phi) || !std::isfinite(v) || std::abs(v) > opt.blowup ||
        std::abs(phi) > opt.blowup)
      throw Error(ErrorCode::blowup, "shooting iterates diverged");
    const auto pm = return_map(d, phi, v, opt.integrator_tol);
    const double g0 = wrap_angle(pm.phi - phi);
    const double g1 = pm.v - v;
    const double res = std::max(std::abs(g0), std::abs(g1));
    if (!std::isfinite(res)) throw Error(ErrorCode::blowup, "return map is not finite");
    if (res < opt.residual_tol) {
      if (std::lround((pm.phi - phi - g0) / two_pi) != 0)
        throw Error(ErrorCode::no_orbit_found,
                    "converged to a fixed point that is not a 1:1 rotation");
      return {wrap_angle(phi), v, two_pi, res};
    }
    if (it == opt.max_iterations) break;
    // (J - I) dx = -g
    const double a = pm.jacobian[0] - 1.0, b = pm.jacobian[1];
    const double c = pm.jacobian[2], e = pm.jacobian[3] - 1.0;
    const double det = a * e - b * c;
    if (det == 0.0 || !std::isfinite(det))
      throw Error(ErrorCode::no_orbit_found, "singular shooting Jacobian");
    double dphi = (-g0 * e + g1 * b) / det;
    double dv = (-g1 * a + g0 * c) / det;
    const double size = std::max(std::abs(dphi), std::abs(dv));
    if (size > opt.max_step) {
      dphi *= opt.max_step / size;
      dv *= opt.max_step / size;
    }
    phi += dphi;
    v += dv;
  }
  throw Error(ErrorCode::no_orbit_found, "Newton iteration on the period map did not converge");
}

inline Matrix2 monodromy(const PeriodicOrbit& orbit, const DimensionlessParams& d,
                         double tol = 1e-12) {
  return return_map(d, orbit.phi0, orbit.v0, tol).jacobian;
}

inline std::array<std::complex<double>, 2> eigenvalues(const Matrix2& m) {
  const double tr = m[0] + m[3];
  const double det = m[0] * m[3] - m[1] * m[2];
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr / 4.0 - det));
  return {tr / 2.0 + disc, tr / 2.0 - disc};
}

/// Multipliers ordered by decreasing modulus.
inline std::array<std::complex<double>, 2> floquet_multipliers(const PeriodicOrbit& orbit,
                                                               const DimensionlessParams& d,
                                                               double tol = 1e-12) {
  auto ev = eigenvalues(monodromy(orbit, d, tol));
  if (std::abs(ev[1]) > std::abs(ev[0])) std::swap(ev[0], ev[1]);
  return ev;
}

inline bool is_stable(const std::array<std::complex<double>, 2>& multipliers) {
  return std::abs(multipliers[0]) < 1.0 && std::abs(multipliers[1]) < 1.0;
}

/// Integrates whole periods from s0 (taken at tau = 0) until two successive
/// rotating-frame Poincare samples differ by less than `threshold`, or
/// max_periods is reached. Returns the final state and periods used.
inline std::pair<State, int> settle(const DimensionlessParams& d, const State& s0,
                                    int max_periods, double tol = 1e-10,
                                    double threshold = 1e-9) {
  auto f = [&d](double tau, const ode::Vec<2>& y) {
    const auto r = rhs(tau, {y[0], y[1]}, d);
    return ode::Vec<2>{r.theta_dot, r.theta_ddot};
  };
  ode::DormandPrince<2> stepper(0.0, {s0.theta, s0.theta_dot}, {.tol = tol});
  double prev_phi = s0.theta, prev_v = s0.theta_dot + 1.0;
  for (int k = 1; k <= max_periods; ++k) {
    const double tau = two_pi * k;
    stepper.advance_to(f, tau);
    const double phi = stepper.state()[0] + tau;
    const double v = stepper.state()[1] + 1.0;
    const double diff = std::max(std::abs(wrap_angle(phi - prev_phi)), std::abs(v - prev_v));
    prev_phi = phi;
    prev_v = v;
    if (diff < threshold) return {{wrap_angle(phi), v - 1.0}, k};
  }
  return {{wrap_angle(prev_phi), prev_v - 1.0}, max_periods};
}

}  // namespace eep
