#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eep.hpp"
#include "oracles.hpp"

using namespace eep;
using std::numbers::pi;

TEST(Harmonic, MeanResponse) {
  const auto [c, s] = harmonic_response(0, 2.0, 7.0, 0.6, 1.0);
  EXPECT_NEAR(c, 2.5, 1e-15);
  EXPECT_EQ(s, 0.0);
}

TEST(Harmonic, ResonanceIsReported) {
  try {
    harmonic_response(1, 1.0, 0.0, 0.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::resonance);
  }
}

TEST(Harmonic, SecondHarmonicFrozenOracle) {
  // Values from oracle::steady_fourier on this forcing (see OracleAgreement).
  const auto [c, s] = harmonic_response(2, -0.5, std::sqrt(0.75), 0.5, 1.0);
  EXPECT_NEAR(c, 0.0647732, 1e-6);
  EXPECT_NEAR(s, -0.2970026, 1e-6);
}

TEST(Harmonic, OracleAgreement) {
  const double A = -0.5, B = std::sqrt(0.75), beta = 0.5, mu = 1.0;
  const auto fo = oracle::steady_fourier(
      [&](double t) { return A * std::cos(2 * t) + B * std::sin(2 * t); }, beta,
      std::sqrt(mu * mu - beta * beta), 3);
  const auto [c, s] = harmonic_response(2, A, B, beta, mu);
  EXPECT_NEAR(fo.cos_amp[2], c, 1e-6);
  EXPECT_NEAR(fo.sin_amp[2], s, 1e-6);
  EXPECT_NEAR(fo.cos_amp[1], 0.0, 1e-6);
  EXPECT_NEAR(fo.mean, 0.0, 1e-6);
}

TEST(Harmonic, EvaluateExamples) {
  const HarmonicSeries empty;
  EXPECT_EQ(evaluate(empty, 1.3), 0.0);
  EXPECT_EQ(evaluate_derivative(empty, 1.3), 0.0);
  const HarmonicSeries mean_only(0.7);
  EXPECT_EQ(evaluate(mean_only, 2.0), 0.7);
  EXPECT_EQ(evaluate_derivative(mean_only, 2.0), 0.0);
  HarmonicSeries one;
  one.add(2, 1.0, 0.0);
  EXPECT_NEAR(evaluate(one, pi / 4), 0.0, 1e-15);
  EXPECT_NEAR(evaluate_derivative(one, pi / 4), -2.0, 1e-15);
}

TEST(Harmonic, SeriesBookkeeping) {
  HarmonicSeries s;
  s.add(3, 1.0, 2.0).add(1, 0.5, 0.0).add(3, 1.0, -2.0).add(0, 0.25, 0.0);
  ASSERT_EQ(s.terms().size(), 2u);
  EXPECT_EQ(s.terms()[0].n, 1);
  EXPECT_EQ(s.coefficient(3), std::make_pair(2.0, 0.0));
  EXPECT_EQ(s.coefficient(2), std::make_pair(0.0, 0.0));
  EXPECT_EQ(s.mean(), 0.25);
  EXPECT_EQ(s.max_harmonic(), 3);
  EXPECT_THROW(s.add(-1, 1.0, 1.0), Error);
}

TEST(Harmonic, JsonRoundTrip) {
  HarmonicSeries s(0.1);
  s.add(1, 0.2, -0.3).add(4, 1e-17, 5.0);
  const auto j = to_json(s);
  EXPECT_EQ(j.dump(), R"({"mean":0.1,"terms":[[1,0.2,-0.3],[4,1e-17,5.0]]})");
  const auto back = series_from_json(j);
  EXPECT_EQ(back.mean(), s.mean());
  EXPECT_EQ(back.coefficient(4), s.coefficient(4));
  EXPECT_THROW(series_from_json(nlohmann::json::parse(R"({"mean":0,"terms":[[1,0,0],[1,0,0]]})")),
               Error);
}

TEST(Harmonic, ResidualProperties) {
  HarmonicSeries f(0.3);
  f.add(1, 0.4, -0.2).add(2, -0.5, 0.8).add(3, 0.1, 0.1);
  const auto x = respond(f, 0.5, 1.0);
  EXPECT_LT(residual(x, f, 0.5, 1.0), 1e-12);
  EXPECT_EQ(residual(HarmonicSeries{}, HarmonicSeries{}, 0.5, 1.0), 0.0);
  HarmonicSeries bumped = x;
  bumped.add(1, 0.1, 0.0);
  EXPECT_GT(residual(bumped, f, 0.5, 1.0), 0.01);
  EXPECT_THROW(residual(x, f, 0.5, 1.0, 8), Error);
}

TEST(Harmonic, Superposition) {
  HarmonicSeries f1, f2;
  f1.add(1, 0.3, 0.2).add(2, -0.1, 0.0);
  f2.add(2, 0.5, 0.7).add(4, 1.0, -1.0).set_mean(0.2);
  const auto sum = respond(f1 + f2, 0.4, 1.3);
  const auto parts = respond(f1, 0.4, 1.3) + respond(f2, 0.4, 1.3);
  EXPECT_NEAR(sum.mean(), parts.mean(), 1e-14);
  for (int n = 1; n <= 4; ++n) {
    EXPECT_NEAR(sum.coefficient(n).first, parts.coefficient(n).first, 1e-14);
    EXPECT_NEAR(sum.coefficient(n).second, parts.coefficient(n).second, 1e-14);
  }
}

TEST(Harmonic, HomogeneousRootsDecay) {
  for (double mu = 0.2; mu < 3.0; mu += 0.3)
    for (double frac = 0.02; frac < 1.0; frac += 0.1) {
      const double beta = frac * mu, k = std::sqrt(mu * mu - beta * beta);
      const auto disc = std::sqrt(std::complex<double>(beta * beta - 4 * k));
      EXPECT_LT(((-beta + disc) / 2.0).real(), 0.0);
      EXPECT_LT(((-beta - disc) / 2.0).real(), 0.0);
    }
}

TEST(Harmonic, RandomOracleAgreement) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int done = 0;
  while (done < 5) {
    const int n = static_cast<int>(U(rng) * 5);
    const double mu = 0.5 + 1.5 * U(rng), beta = mu * (0.1 + 0.8 * U(rng));
    const double A = 2 * U(rng) - 1, B = 2 * U(rng) - 1;
    if (std::abs(response_denominator(n, beta, mu)) < 0.05) continue;
    const auto fo = oracle::steady_fourier(
        [&](double t) { return A * std::cos(n * t) + B * std::sin(n * t); }, beta,
        std::sqrt(mu * mu - beta * beta), std::max(n, 1));
    const auto [c, s] = harmonic_response(n, A, B, beta, mu);
    if (n == 0) {
      EXPECT_NEAR(fo.mean, c, 1e-6);
    } else {
      EXPECT_NEAR(fo.cos_amp[n], c, 1e-6);
      EXPECT_NEAR(fo.sin_amp[n], s, 1e-6);
    }
    ++done;
  }
}
