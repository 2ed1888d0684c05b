#pragma once

// Small-damping rotations (beta ~ sqrt(eps)) by averaging. With
// theta = -tau + sqrt(eps) vartheta and Poincare variables
//   vartheta = beta_hat/mu + q cos(psi),  vartheta' = -sqrt(mu) q sin(psi),
// psi = zeta + tau, the slow pair (q, zeta) is averaged to (Q, Zeta).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "json.hpp"

#include "eep/dynamics.hpp"
#include "eep/error.hpp"
#include "eep/params.hpp"
#include "eep/solution.hpp"

namespace eep {

struct ScaledParams {
  double beta_hat = 0.0;  // beta / sqrt(eps)
  double w = 0.0;         // omega^2 / eps
  double sqrt_mu = 1.0;
  double detuning = 0.0;  // sqrt(mu) - 1

  double mu() const { return sqrt_mu * sqrt_mu; }
};

inline ScaledParams scale(const DimensionlessParams& d) {
  validate(d);
  if (!(d.eps > 0.0)) throw Error(ErrorCode::undefined_ratio, "averaging needs eps > 0");
  const double sm = std::sqrt(d.mu);
  return {d.beta_hat(), d.w(), sm, sm - 1.0};
}

struct AveragedState {
  double Q = 0.0;
  double Zeta = 0.0;  // (-pi, pi], defined up to 2 pi k
  int order = 1;
  bool trivial = false;  // Q = 0 branch (gravity-free case only)
};

struct AveragedRate {
  double dQ = 0.0;
  double dZeta = 0.0;
};

namespace detail {

inline void check_order(int order) {
  if (order != 1 && order != 2)
    throw Error(ErrorCode::invalid_parameter, "averaging order must be 1 or 2");
}

// (dQ, Q dZeta): free of the 1/Q singularity.
inline std::array<double, 2> averaged_field(double Q, double Z, const ScaledParams& sp,
                                            double eps, int order) {
  const double se = std::sqrt(eps);
  const double sm = sp.sqrt_mu, mu = sp.mu();
  const double bh = sp.beta_hat, w = sp.w;
  double dQ = -se * w * std::cos(Z) / (2.0 * sm) - se * bh * Q / 2.0;
  double QdZ = Q * sp.detuning + se * w * std::sin(Z) / (2.0 * sm);
  if (order == 2) {
    const double g = eps * bh / 4.0 * (4.0 / mu - 1.0) * w / (2.0 * sm);
    dQ += g * std::sin(Z) + eps / (4.0 * sm) * std::sin(2.0 * Z) * Q;
    QdZ += g * std::cos(Z) +
           Q * (-eps * bh * bh / 8.0 * (2.0 / (mu * sm) + 1.0) +
                eps / (4.0 * sm) * std::cos(2.0 * Z) - eps * sm / 16.0 * Q * Q);
  }
  return {dQ, QdZ};
}

// The same field in u = Q cos Zeta, v = Q sin Zeta.
inline std::array<double, 2> cartesian_field(double u, double v, const ScaledParams& sp,
                                             double eps, int order) {
  const double Q = std::hypot(u, v);
  const double Z = std::atan2(v, u);
  const auto [dQ, QdZ] = averaged_field(Q, Z, sp, eps, order);
  return {dQ * std::cos(Z) - QdZ * std::sin(Z), dQ * std::sin(Z) + QdZ * std::cos(Z)};
}

}  // namespace detail

inline AveragedRate averaged_rhs(const AveragedState& state, const ScaledParams& sp,
                                 double eps) {
  detail::check_order(state.order);
  if (!(state.Q > 0.0))
    throw Error(ErrorCode::singular_amplitude, "averaged phase equation needs Q > 0");
  const auto [dQ, QdZ] = detail::averaged_field(state.Q, state.Zeta, sp, eps, state.order);
  return {dQ, QdZ / state.Q};
}

/// Norm of the averaged field at a state; the trivial branch is measured in
/// Cartesian coordinates where it is regular.
inline double stationary_residual(const AveragedState& s, const ScaledParams& sp, double eps) {
  if (s.trivial || s.Q == 0.0) {
    const auto f = detail::cartesian_field(0.0, 0.0, sp, eps, s.order);
    return std::hypot(f[0], f[1]);
  }
  const auto r = averaged_rhs(s, sp, eps);
  return std::hypot(r.dQ, r.dZeta);
}

struct StationaryOptions {
  double residual_tol = 1e-12;
  int max_iterations = 100;
  int max_halvings = 20;
  double collapse = 1e-8;  // |Q| below this is the trivial branch
};

namespace detail {

inline AveragedState normalize(double Q, double Z, int order) {
  if (Q < 0.0) {
    Q = -Q;
    Z += std::numbers::pi;
  }
  return {Q, wrap_angle(Z), order, false};
}

// Damped Newton on (dQ, dZeta) from one start. Negative Q is allowed during
// the iteration: the field is invariant under (Q, Z) -> (-Q, Z + pi).
inline std::optional<AveragedState> newton_polar(double Q, double Z, const ScaledParams& sp,
                                                 double eps, int order,
                                                 const StationaryOptions& opt,
                                                 bool& collapsed) {
  auto F = [&](double q, double z) {
    const auto [dQ, QdZ] = averaged_field(q, z, sp, eps, order);
    return std::array<double, 2>{dQ, QdZ / q};
  };
  auto norm = [](const std::array<double, 2>& r) { return std::hypot(r[0], r[1]); };
  collapsed = false;
  if (std::abs(Q) < opt.collapse) return std::nullopt;
  auto r = F(Q, Z);
  double rn = norm(r);
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (!std::isfinite(rn)) return std::nullopt;
    if (rn < opt.residual_tol) return normalize(Q, Z, order);
    const double hq = 1e-7 * std::max(1.0, std::abs(Q)), hz = 1e-7;
    const auto fq1 = F(Q + hq, Z), fq0 = F(Q - hq, Z);
    const auto fz1 = F(Q, Z + hz), fz0 = F(Q, Z - hz);
    const double j00 = (fq1[0] - fq0[0]) / (2 * hq), j10 = (fq1[1] - fq0[1]) / (2 * hq);
    const double j01 = (fz1[0] - fz0[0]) / (2 * hz), j11 = (fz1[1] - fz0[1]) / (2 * hz);
    const double det = j00 * j11 - j01 * j10;
    if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
    const double dq = -(r[0] * j11 - r[1] * j01) / det;
    const double dz = -(j00 * r[1] - j10 * r[0]) / det;
    double lambda = 1.0;
    bool improved = false;
    for (int k = 0; k <= opt.max_halvings; ++k, lambda *= 0.5) {
      const double q = Q + lambda * dq, z = Z + lambda * dz;
      if (std::abs(q) < opt.collapse) {
        collapsed = true;
        return std::nullopt;
      }
      const auto rt = F(q, z);
      const double rtn = norm(rt);
      if (std::isfinite(rtn) && rtn < rn) {
        Q = q;
        Z = z;
        r = rt;
        rn = rtn;
        improved = true;
        break;
      }
    }
    if (!improved) {
      // Accept a round-off level plateau.
      if (rn < 1e3 * opt.residual_tol) return normalize(Q, Z, order);
      return std::nullopt;
    }
  }
  return rn < opt.residual_tol ? std::optional(normalize(Q, Z, order)) : std::nullopt;
}

inline std::vector<std::array<double, 2>> phase_starts(const AveragedState& guess) {
  std::vector<std::array<double, 2>> starts{{guess.Q, guess.Zeta}};
  const double q = std::max(std::abs(guess.Q), 1.0);
  for (int k = 0; k < 8; ++k) starts.push_back({q, k * std::numbers::pi / 4.0});
  return starts;
}

}  // namespace detail

/// Stationary point of the averaged field: the guess first, then eight phase
/// starts. With zero gravity the Q = 0 branch is returned (flagged trivial)
/// when no nontrivial root is found.
inline AveragedState stationary_state(const ScaledParams& sp, double eps, int order,
                                      const AveragedState& guess,
                                      const StationaryOptions& opt = {}) {
  detail::check_order(order);
  if (!std::isfinite(guess.Q) || !std::isfinite(guess.Zeta))
    throw Error(ErrorCode::invalid_parameter, "stationary-state guess must be finite");
  bool any_collapse = false;
  for (const auto& s : detail::phase_starts(guess)) {
    bool collapsed = false;
    if (auto st = detail::newton_polar(s[0], s[1], sp, eps, order, opt, collapsed)) return *st;
    any_collapse = any_collapse || collapsed;
  }
  if (sp.w == 0.0) return {0.0, 0.0, order, true};
  throw Error(ErrorCode::no_stationary_state,
              any_collapse ? "Newton iterates collapsed to Q = 0"
                           : "no stationary state of the averaged equations found");
}

/// Every distinct nontrivial root reachable from the standard starts, in
/// start order.
inline std::vector<AveragedState> stationary_states(const ScaledParams& sp, double eps,
                                                    int order, const AveragedState& guess,
                                                    const StationaryOptions& opt = {}) {
  detail::check_order(order);
  std::vector<AveragedState> roots;
  for (const auto& s : detail::phase_starts(guess)) {
    bool collapsed = false;
    auto st = detail::newton_polar(s[0], s[1], sp, eps, order, opt, collapsed);
    if (!st) continue;
    const bool seen = std::any_of(roots.begin(), roots.end(), [&](const AveragedState& r) {
      return std::abs(r.Q - st->Q) < 1e-8 && std::abs(wrap_angle(r.Zeta - st->Zeta)) < 1e-8;
    });
    if (!seen) roots.push_back(*st);
  }
  return roots;
}

/// First-order stationary amplitude and phase as printed in closed form,
///   Q^2 = (omega^2/eps) / (mu (4 (sqrt(mu) - 1)^2 + beta^2)),
///   Zeta = arctan(2 (mu - 1) / beta) taken in (0, pi).
/// Advisory only: used as a Newton start and reported next to the root.
inline AveragedState stationary_closed_form_first(const ScaledParams& sp, double eps) {
  const double beta = sp.beta_hat * std::sqrt(eps);
  if (!(beta > 0.0)) throw Error(ErrorCode::degenerate_parameters, "closed form needs beta > 0");
  const double mu = sp.mu();
  const double den = mu * (4.0 * sp.detuning * sp.detuning + beta * beta);
  if (!(den > 0.0)) throw Error(ErrorCode::degenerate_parameters, "zero denominator in Q^2");
  double Z = std::atan(2.0 * (mu - 1.0) / beta);
  if (Z <= 0.0) Z += std::numbers::pi;
  return {std::sqrt(sp.w / den), Z, 1, false};
}

/// Linear stability of a stationary state: both eigenvalues of the averaged
/// Jacobian (central differences, step 1e-7, in u = Q cos Zeta, v = Q sin Zeta)
/// have negative real part.
inline bool averaged_stability(const AveragedState& state, const ScaledParams& sp, double eps) {
  detail::check_order(state.order);
  if (stationary_residual(state, sp, eps) >= 1e-10)
    throw Error(ErrorCode::no_stationary_state, "state is not stationary");
  const double u = state.Q * std::cos(state.Zeta), v = state.Q * std::sin(state.Zeta);
  constexpr double h = 1e-7;
  const auto fu1 = detail::cartesian_field(u + h, v, sp, eps, state.order);
  const auto fu0 = detail::cartesian_field(u - h, v, sp, eps, state.order);
  const auto fv1 = detail::cartesian_field(u, v + h, sp, eps, state.order);
  const auto fv0 = detail::cartesian_field(u, v - h, sp, eps, state.order);
  const Matrix2 J{(fu1[0] - fu0[0]) / (2 * h), (fv1[0] - fv0[0]) / (2 * h),
                  (fu1[1] - fu0[1]) / (2 * h), (fv1[1] - fv0[1]) / (2 * h)};
  const auto ev = eigenvalues(J);
  return ev[0].real() < 0.0 && ev[1].real() < 0.0;
}

/// Preferred steady state for reconstruction: first stable nontrivial root,
/// else the trivial branch (zero gravity), else the first root.
inline AveragedState select_stationary_state(const ScaledParams& sp, double eps, int order) {
  AveragedState guess{1.0, 0.0, order, false};
  if (sp.beta_hat > 0.0 && sp.w > 0.0) {
    const auto adv = stationary_closed_form_first(sp, eps);
    if (std::isfinite(adv.Q) && adv.Q > 0.0) guess = {adv.Q, adv.Zeta, order, false};
  }
  const auto roots = stationary_states(sp, eps, order, guess);
  for (const auto& r : roots)
    if (averaged_stability(r, sp, eps)) return r;
  if (sp.w == 0.0) return {0.0, 0.0, order, true};
  if (!roots.empty()) return roots.front();
  throw Error(ErrorCode::no_stationary_state, "no stationary state of the averaged equations");
}

/// Second-order averaging rotation
///   theta = -tau + beta/mu + sqrt(eps) Q cos(Zeta + tau) + sqrt(eps) (beta Q / 4) sin(Zeta)
///         + omega^2 sin(tau) / (4 sqrt(mu)) - eps sin(2 tau) / (3 sqrt(mu)).
inline AsymptoticSolution averaging_solution(const DimensionlessParams& d,
                                             const AveragedState& st) {
  const double se = std::sqrt(d.eps), sm = std::sqrt(d.mu);
  AsymptoticSolution sol;
  sol.method = Method::Averaging2;
  sol.eps = d.eps;
  sol.theta0 = d.beta / d.mu + se * d.beta * st.Q / 4.0 * std::sin(st.Zeta);
  sol.weight1 = 1.0;
  HarmonicSeries s;
  const double c1 = se * st.Q * std::cos(st.Zeta);
  const double s1 = -se * st.Q * std::sin(st.Zeta) + d.omega * d.omega / (4.0 * sm);
  if (c1 != 0.0 || s1 != 0.0) s.add(1, c1, s1);
  s.add(2, 0.0, -d.eps / (3.0 * sm));
  sol.series1 = s;
  return sol;
}

inline AsymptoticSolution averaging_solution(const DimensionlessParams& d) {
  const auto sp = scale(d);
  return averaging_solution(d, select_stationary_state(sp, d.eps, 2));
}

inline nlohmann::json stationary_report(const AveragedState& st, const ScaledParams& sp,
                                        double eps) {
  nlohmann::json j{{"order", st.order},
                   {"Q", st.Q},
                   {"Zeta", st.Zeta},
                   {"trivial", st.trivial},
                   {"residual", stationary_residual(st, sp, eps)},
                   {"stable", averaged_stability(st, sp, eps)}};
  if (sp.beta_hat > 0.0) {
    const auto adv = stationary_closed_form_first(sp, eps);
    j["advisory_Q"] = adv.Q;
    j["advisory_Zeta"] = adv.Zeta;
  } else {
    j["advisory_Q"] = nullptr;
    j["advisory_Zeta"] = nullptr;
  }
  return j;
}

}  // namespace eep
