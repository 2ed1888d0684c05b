#pragma once

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>

#include "eep/error.hpp"

namespace eep {

/// Physical description of the pendulum and its pivot ellipse
/// x = X sin(Omega t), y = Y cos(Omega t). SI units.
struct PhysicalParams {
  double m = 1.0;      // mass [kg]
  double l = 1.0;      // length [m]
  double c = 0.0;      // viscous damping [N m s]
  double g = 9.81;     // gravity [m/s^2]
  double X = 0.0;      // horizontal semiaxis [m]
  double Y = 0.0;      // vertical semiaxis [m]
  double Omega = 1.0;  // excitation frequency [rad/s]
};

inline void validate(const PhysicalParams& p) {
  if (!(p.m > 0.0)) throw Error(ErrorCode::invalid_parameter, "mass m must be positive");
  if (!(p.l > 0.0)) throw Error(ErrorCode::invalid_parameter, "length l must be positive");
  if (!(p.Omega > 0.0))
    throw Error(ErrorCode::invalid_parameter, "excitation frequency Omega must be positive");
  if (!(p.X >= 0.0) || !(p.Y >= 0.0))
    throw Error(ErrorCode::invalid_parameter, "semiaxes X and Y must be nonnegative");
  if (!std::isfinite(p.c) || !std::isfinite(p.g))
    throw Error(ErrorCode::invalid_parameter, "c and g must be finite");
}

/// The four governing numbers of the dimensionless equation of motion
///   theta'' + beta theta' + mu sin(tau + theta) = eps sin(tau - theta) - omega^2 sin(theta)
/// with tau = Omega t.
struct DimensionlessParams {
  double eps = 0.0;    // semiaxis half-difference (Y - X) / 2l
  double mu = 1.0;     // semiaxis half-sum (Y + X) / 2l
  double omega = 0.0;  // sqrt(g/l) / Omega
  double beta = 0.0;   // c / (m l^2 Omega)

  /// Gravity-to-ellipticity ratio omega^2 / eps.
  double w() const {
    if (eps == 0.0) {
      if (omega == 0.0) return 0.0;
      throw Error(ErrorCode::undefined_ratio, "w = omega^2/eps is undefined for eps = 0");
    }
    return omega * omega / eps;
  }

  /// Damping on the sqrt(eps) scale.
  double beta_hat() const {
    if (!(eps > 0.0))
      throw Error(ErrorCode::undefined_ratio, "beta_hat = beta/sqrt(eps) needs eps > 0");
    return beta / std::sqrt(eps);
  }

  /// mu cos(theta0) on the stable exact branch.
  double stiffness() const { return std::sqrt(mu * mu - beta * beta); }
};

inline void validate(const DimensionlessParams& d) {
  if (!(d.mu > 0.0)) throw Error(ErrorCode::invalid_parameter, "mu must be positive");
  if (!std::isfinite(d.eps) || !std::isfinite(d.omega) || !std::isfinite(d.beta))
    throw Error(ErrorCode::invalid_parameter, "eps, omega and beta must be finite");
}

inline DimensionlessParams nondimensionalize(const PhysicalParams& p) {
  validate(p);
  if (!(p.X + p.Y > 0.0))
    throw Error(ErrorCode::invalid_parameter, "X + Y must be positive (mu > 0)");
  DimensionlessParams d;
  d.eps = (p.Y - p.X) / (2.0 * p.l);
  d.mu = (p.Y + p.X) / (2.0 * p.l);
  d.omega = std::sqrt(p.g / p.l) / p.Omega;
  d.beta = p.c / (p.m * p.l * p.l * p.Omega);
  return d;
}

enum class Regime {
  SmallDampingSmallMu,        // covered by classical small-excitation theory
  NoRotations,                // generating system has only constant solutions
  SmallDampingOrderOneMu,     // averaging applies
  OrderOneDampingOrderOneMu,  // multiple scales applies
};

constexpr std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::SmallDampingSmallMu: return "small-damping-small-mu";
    case Regime::NoRotations: return "no-rotations";
    case Regime::SmallDampingOrderOneMu: return "small-damping-order-one-mu";
    case Regime::OrderOneDampingOrderOneMu: return "order-one-damping-order-one-mu";
  }
  return "unknown";
}

struct RegimeThresholds {
  double small_threshold = 1.0;  // beta is small when beta <= small_threshold * sqrt(eps)
  double small_mu = 0.2;         // mu is small when mu <= small_mu
};

inline Regime classify_regime(const DimensionlessParams& d, const RegimeThresholds& t = {}) {
  if (!(t.small_threshold > 0.0))
    throw Error(ErrorCode::invalid_parameter, "small_threshold must be positive");
  if (!(d.eps > 0.0))
    throw Error(ErrorCode::classification_undefined,
                "regime classification needs eps > 0 (beta is measured on the sqrt(eps) scale)");
  const bool small_beta = std::abs(d.beta) <= t.small_threshold * std::sqrt(d.eps);
  const bool small_mu = d.mu <= t.small_mu;
  if (small_mu) return small_beta ? Regime::SmallDampingSmallMu : Regime::NoRotations;
  return small_beta ? Regime::SmallDampingOrderOneMu : Regime::OrderOneDampingOrderOneMu;
}

using ParamSet = std::variant<PhysicalParams, DimensionlessParams>;

/// Parses `key=value` lines. Blank lines and lines starting with '#' are
/// ignored. The key set must be exactly {m,l,c,g,X,Y,Omega} or
/// {eps,mu,omega,beta}.
inline ParamSet parse_params(std::string_view text) {
  static constexpr std::string_view physical_keys[] = {"m", "l", "c", "g", "X", "Y", "Omega"};
  static constexpr std::string_view dimensionless_keys[] = {"eps", "mu", "omega", "beta"};

  auto trim = [](std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return std::string_view{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };

  std::map<std::string, double, std::less<>> values;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::invalid_parameter,
                  "line " + std::to_string(line_no) + ": expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string raw(trim(line.substr(eq + 1)));
    bool known = false;
    for (auto k : physical_keys) known = known || k == key;
    for (auto k : dimensionless_keys) known = known || k == key;
    if (!known) throw Error(ErrorCode::invalid_parameter, "unknown parameter key '" + key + "'");
    if (values.count(key))
      throw Error(ErrorCode::invalid_parameter, "duplicate parameter key '" + key + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(raw, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != raw.size())
      throw Error(ErrorCode::invalid_parameter, "bad number for '" + key + "': '" + raw + "'");
    values.emplace(key, v);
  }

  auto has_all = [&](const auto& keys) {
    for (auto k : keys)
      if (!values.count(k)) return false;
    return values.size() == std::size(keys);
  };
  if (has_all(physical_keys)) {
    PhysicalParams p{values.at("m"), values.at("l"), values.at("c"), values.at("g"),
                     values.at("X"), values.at("Y"), values.at("Omega")};
    validate(p);
    return p;
  }
  if (has_all(dimensionless_keys)) {
    DimensionlessParams d{values.at("eps"), values.at("mu"), values.at("omega"),
                          values.at("beta")};
    validate(d);
    return d;
  }
  throw Error(ErrorCode::invalid_parameter,
              "parameter file must set exactly m,l,c,g,X,Y,Omega or eps,mu,omega,beta");
}

inline DimensionlessParams to_dimensionless(const ParamSet& set) {
  if (const auto* p = std::get_if<PhysicalParams>(&set)) return nondimensionalize(*p);
  return std::get<DimensionlessParams>(set);
}

}  // namespace eep
