#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "eep/error.hpp"

namespace eep {

/// mean + sum_n (cos_amp cos(n tau) + sin_amp sin(n tau)); harmonic indices
/// are positive, unique and kept sorted.
class HarmonicSeries {
 public:
  struct Term {
    int n = 1;
    double cos_amp = 0.0;
    double sin_amp = 0.0;
  };

  HarmonicSeries() = default;
  explicit HarmonicSeries(double mean) : mean_(mean) {}

  double mean() const noexcept { return mean_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  HarmonicSeries& set_mean(double m) {
    mean_ = m;
    return *this;
  }

  /// Adds amplitudes to harmonic n (merging with an existing term).
  HarmonicSeries& add(int n, double cos_amp, double sin_amp) {
    if (n < 0) throw Error(ErrorCode::invalid_parameter, "negative harmonic index");
    if (n == 0) {
      mean_ += cos_amp;
      return *this;
    }
    auto it = std::lower_bound(terms_.begin(), terms_.end(), n,
                               [](const Term& t, int k) { return t.n < k; });
    if (it != terms_.end() && it->n == n) {
      it->cos_amp += cos_amp;
      it->sin_amp += sin_amp;
    } else {
      terms_.insert(it, Term{n, cos_amp, sin_amp});
    }
    return *this;
  }

  /// Amplitudes of harmonic n, zero when absent.
  std::pair<double, double> coefficient(int n) const {
    for (const auto& t : terms_)
      if (t.n == n) return {t.cos_amp, t.sin_amp};
    return {0.0, 0.0};
  }

  int max_harmonic() const noexcept { return terms_.empty() ? 0 : terms_.back().n; }

  double evaluate(double tau) const {
    double s = mean_;
    for (const auto& t : terms_) s += t.cos_amp * std::cos(t.n * tau) + t.sin_amp * std::sin(t.n * tau);
    return s;
  }

  double derivative(double tau) const {
    double s = 0.0;
    for (const auto& t : terms_)
      s += t.n * (-t.cos_amp * std::sin(t.n * tau) + t.sin_amp * std::cos(t.n * tau));
    return s;
  }

  double second_derivative(double tau) const {
    double s = 0.0;
    for (const auto& t : terms_)
      s -= t.n * t.n * (t.cos_amp * std::cos(t.n * tau) + t.sin_amp * std::sin(t.n * tau));
    return s;
  }

  friend HarmonicSeries operator+(HarmonicSeries a, const HarmonicSeries& b) {
    a.mean_ += b.mean_;
    for (const auto& t : b.terms_) a.add(t.n, t.cos_amp, t.sin_amp);
    return a;
  }

  friend HarmonicSeries operator*(double k, HarmonicSeries a) {
    a.mean_ *= k;
    for (auto& t : a.terms_) {
      t.cos_amp *= k;
      t.sin_amp *= k;
    }
    return a;
  }

 private:
  double mean_ = 0.0;
  std::vector<Term> terms_;
};

inline double evaluate(const HarmonicSeries& s, double tau) { return s.evaluate(tau); }
inline double evaluate_derivative(const HarmonicSeries& s, double tau) { return s.derivative(tau); }

inline nlohmann::json to_json(const HarmonicSeries& s) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : s.terms()) terms.push_back({t.n, t.cos_amp, t.sin_amp});
  return {{"mean", s.mean()}, {"terms", terms}};
}

inline HarmonicSeries series_from_json(const nlohmann::json& j) {
  HarmonicSeries s(j.at("mean").get<double>());
  for (const auto& t : j.at("terms")) {
    if (!t.is_array() || t.size() != 3)
      throw Error(ErrorCode::invalid_parameter, "series term must be [n, cosAmp, sinAmp]");
    const int n = t[0].get<int>();
    if (n < 1) throw Error(ErrorCode::invalid_parameter, "series harmonic index must be >= 1");
    if (std::any_of(s.terms().begin(), s.terms().end(), [n](const auto& x) { return x.n == n; }))
      throw Error(ErrorCode::invalid_parameter, "duplicate harmonic index in series");
    s.add(n, t[1].get<double>(), t[2].get<double>());
  }
  return s;
}

/// Resonance cutoff on the response denominator.
inline double denominator_guard(double mu) { return 1e-8 * (1.0 + mu * mu); }

/// (n^2 - s)^2 + n^2 beta^2 written as in the closed-form response, with
/// s = sqrt(mu^2 - beta^2).
inline double response_denominator(int n, double beta, double mu) {
  const double s = std::sqrt(mu * mu - beta * beta);
  const double n2 = static_cast<double>(n) * n;
  return (n2 - 1.0) * beta * beta + mu * mu + n2 * (n2 - 2.0 * s);
}

/// Steady periodic response of
///   x'' + beta x' + sqrt(mu^2 - beta^2) x = A cos(n tau) + B sin(n tau).
/// Returns (cos amplitude, sin amplitude); for n = 0 the forcing is the
/// constant A and the response is the constant A / sqrt(mu^2 - beta^2).
inline std::pair<double, double> harmonic_response(int n, double A, double B, double beta,
                                                   double mu) {
  if (n < 0) throw Error(ErrorCode::invalid_parameter, "negative harmonic index");
  if (!(mu > 0.0) || !(std::abs(beta) < mu))
    throw Error(ErrorCode::invalid_parameter, "harmonic response needs |beta| < mu");
  const double s = std::sqrt(mu * mu - beta * beta);
  if (n == 0) return {A / s, 0.0};
  const double D = response_denominator(n, beta, mu);
  if (std::abs(D) <= denominator_guard(mu))
    throw Error(ErrorCode::resonance,
                "resonant denominator for harmonic " + std::to_string(n));
  const double n2 = static_cast<double>(n) * n;
  const double nb = n * beta;
  return {-((n2 - s) * A + nb * B) / D, -(-nb * A + (n2 - s) * B) / D};
}

/// Term-wise response to a whole forcing series.
inline HarmonicSeries respond(const HarmonicSeries& forcing, double beta, double mu) {
  HarmonicSeries out(harmonic_response(0, forcing.mean(), 0.0, beta, mu).first);
  for (const auto& t : forcing.terms()) {
    const auto [c, s] = harmonic_response(t.n, t.cos_amp, t.sin_amp, beta, mu);
    out.add(t.n, c, s);
  }
  return out;
}

/// max over a uniform grid on [0, 2 pi) of
/// |x'' + beta x' + sqrt(mu^2 - beta^2) x - forcing|.
inline double residual(const HarmonicSeries& series, const HarmonicSeries& forcing, double beta,
                       double mu, std::size_t grid = 64) {
  if (grid < 16) throw Error(ErrorCode::invalid_parameter, "residual grid needs >= 16 points");
  const double s = std::sqrt(mu * mu - beta * beta);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid; ++k) {
    const double tau = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid);
    const double r = series.second_derivative(tau) + beta * series.derivative(tau) +
                     s * series.evaluate(tau) - forcing.evaluate(tau);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace eep
