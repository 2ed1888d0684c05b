#pragma once

// Explicit Dormand-Prince 5(4) pair with PI step-size control. The state is a
// fixed-size std::array so the same integrator drives the 2-component flow,
// the 6-component flow + variational system, and test problems.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "eep/error.hpp"

namespace eep::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

struct StepControl {
  double tol = 1e-10;           // absolute and relative local error bound
  double initial_step = 1e-3;
  double min_step_rel = 1e-14;  // underflow threshold relative to max(|t|, 1)
  std::size_t max_steps = 50'000'000;
};

/// Raised when the step size underflows or the state stops being finite.
/// Carries the last accepted state.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(const std::string& what, double t, std::vector<double> y)
      : Error(ErrorCode::integration_failure, what), t_(t), y_(std::move(y)) {}

  double last_time() const noexcept { return t_; }
  const std::vector<double>& last_state() const noexcept { return y_; }

 private:
  double t_;
  std::vector<double> y_;
};

namespace detail {
// Butcher tableau (Dormand & Prince 1980).
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

template <std::size_t N>
bool all_finite(const Vec<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}
}  // namespace detail

template <std::size_t N>
class DormandPrince {
 public:
  DormandPrince(double t0, const Vec<N>& y0, StepControl ctrl = {})
      : t_(t0), y_(y0), h_(ctrl.initial_step), ctrl_(ctrl) {}

  double time() const noexcept { return t_; }
  const Vec<N>& state() const noexcept { return y_; }
  std::size_t steps() const noexcept { return accepted_; }

  /// Advances exactly to `target` (>= time()). Steps are clamped so that the
  /// target is hit; the unclamped proposal is kept for the next call.
  template <class F>
  void advance_to(F&& f, double target) {
    using namespace detail;
    if (target < t_) throw Error(ErrorCode::invalid_parameter, "integration target is behind");
    if (!have_k1_) {
      k1_ = f(t_, y_);
      have_k1_ = true;
    }
    while (t_ < target) {
      if (accepted_ + rejected_ >= ctrl_.max_steps) fail("maximum number of steps exceeded");
      if (h_ < ctrl_.min_step_rel * std::max(std::abs(t_), 1.0)) fail("step size underflow");

      const double remaining = target - t_;
      const bool clamp = h_ >= remaining;
      const double h = clamp ? remaining : h_;

      Vec<N> tmp, k2, k3, k4, k5, k6, k7, y_new;
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * a21 * k1_[i];
      k2 = f(t_ + c2 * h, tmp);
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2[i]);
      k3 = f(t_ + c3 * h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
      k4 = f(t_ + c4 * h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      k5 = f(t_ + c5 * h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                              a65 * k5[i]);
      k6 = f(t_ + h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        y_new[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                                a76 * k6[i]);
      const double t_new = clamp ? target : t_ + h;
      k7 = f(t_new, y_new);

      double err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                              e6 * k6[i] + e7 * k7[i]);
        const double scale = ctrl_.tol * (1.0 + std::max(std::abs(y_[i]), std::abs(y_new[i])));
        err = std::max(err, std::abs(e) / scale);
      }
      if (!std::isfinite(err)) err = 1e10;

      // PI controller (Hairer, Nørsett & Wanner, II.4).
      constexpr double beta = 0.04, safe = 0.9, fac_min = 0.2, fac_max = 10.0;
      constexpr double expo = 0.2 - beta * 0.75;
      const double fac11 = std::pow(err, expo);
      if (err <= 1.0) {
        double fac = fac11 / std::pow(err_old_, beta);
        fac = std::clamp(fac / safe, 1.0 / fac_max, 1.0 / fac_min);
        double h_next = h / fac;
        if (last_rejected_) h_next = std::min(h_next, h);
        err_old_ = std::max(err, 1e-4);
        t_ = t_new;
        y_ = y_new;
        k1_ = k7;
        ++accepted_;
        last_rejected_ = false;
        if (!detail::all_finite(y_)) fail("state is no longer finite");
        // A strongly clamped step says little about the size of a free step.
        if (!clamp || h >= 0.5 * h_) h_ = h_next;
      } else {
        h_ = h / std::min(1.0 / fac_min, fac11 / safe);
        ++rejected_;
        last_rejected_ = true;
      }
    }
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw IntegrationFailure(why + " at t = " + std::to_string(t_), t_,
                             std::vector<double>(y_.begin(), y_.end()));
  }

  double t_;
  Vec<N> y_;
  double h_;
  StepControl ctrl_;
  Vec<N> k1_{};
  bool have_k1_ = false;
  double err_old_ = 1e-4;
  bool last_rejected_ = false;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
};

/// Integrates and returns the state at each of the (nondecreasing) output
/// times, all of which must be >= t0.
template <std::size_t N, class F>
std::vector<Vec<N>> integrate_at(F&& f, double t0, const Vec<N>& y0,
                                 std::span<const double> times, StepControl ctrl = {}) {
  DormandPrince<N> stepper(t0, y0, ctrl);
  std::vector<Vec<N>> out;
  out.reserve(times.size());
  for (double t : times) {
    stepper.advance_to(f, t);
    out.push_back(stepper.state());
  }
  return out;
}

template <std::size_t N, class F>
Vec<N> integrate_to(F&& f, double t0, const Vec<N>& y0, double t1, StepControl ctrl = {}) {
  DormandPrince<N> stepper(t0, y0, ctrl);
  stepper.advance_to(f, t1);
  return stepper.state();
}

/// Same tableau with a constant step and no error control; used for
/// convergence-order checks.
template <std::size_t N, class F>
Vec<N> integrate_fixed(F&& f, double t0, Vec<N> y, double t1, std::size_t n_steps) {
  using namespace detail;
  const double h = (t1 - t0) / static_cast<double>(n_steps);
  for (std::size_t s = 0; s < n_steps; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    Vec<N> tmp, k1 = f(t, y), k2, k3, k4, k5, k6;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    k2 = f(t + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(t + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(t + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(t + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = f(t + h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      y[i] += h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
  }
  return y;
}

}  // namespace eep::ode
