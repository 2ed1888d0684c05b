#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "eep.hpp"
#include "oracles.hpp"

using namespace eep;

namespace {

DimensionlessParams gravity_case(double eps) { return {eps, 1.0, std::sqrt(0.3 * eps), 0.5}; }

// Second-order right-hand side evaluated pointwise from theta1.
double second_order_rhs(const DimensionlessParams& d, const HarmonicSeries& t1, double tau) {
  const double th0 = std::asin(d.beta / d.mu);
  const double x = t1.evaluate(tau);
  return d.beta * x * x / 2.0 - (std::cos(2 * tau - th0) + d.w() * std::cos(tau - th0)) * x;
}

// Max over a period of the defect of the full equation of motion.
double full_defect(const AsymptoticSolution& sol, const DimensionlessParams& d) {
  double worst = 0.0;
  for (int k = 0; k < 256; ++k) {
    const double tau = two_pi * k / 256.0;
    const double th = sol.theta(tau), thd = sol.theta_dot(tau);
    const double r = sol.theta_ddot(tau) - rhs(tau, {th, thd}, d).theta_ddot;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace

TEST(Multiscale, FirstOrderForcing) {
  const auto no_gravity = first_order_forcing({0.04, 1.0, 0.0, 0.5});
  EXPECT_EQ(no_gravity.coefficient(1), std::make_pair(0.0, 0.0));
  EXPECT_NEAR(no_gravity.coefficient(2).first, -0.5, 1e-15);
  EXPECT_NEAR(no_gravity.coefficient(2).second, std::sqrt(0.75), 1e-15);

  const auto near_edge = first_order_forcing({0.04, 1.0, 0.0, 1.0 - 1e-12});
  EXPECT_NEAR(near_edge.coefficient(2).first, -1.0, 1e-11);
  EXPECT_NEAR(near_edge.coefficient(2).second, 0.0, 1e-5);

  const auto with_gravity = first_order_forcing(gravity_case(0.04));
  EXPECT_NEAR(with_gravity.coefficient(1).first, -0.3 * 0.5, 1e-15);
  EXPECT_NEAR(with_gravity.coefficient(1).second, 0.3 * std::sqrt(0.75), 1e-15);
}

TEST(Multiscale, WindowAndRatioErrors) {
  EXPECT_THROW(first_order_forcing({0.04, 1.0, 0.0, 1.2}), Error);
  EXPECT_THROW(first_order_forcing({0.04, 1.0, 0.0, 0.0}), Error);
  try {
    first_order_forcing({0.0, 1.0, 0.3, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::undefined_ratio);
  }
  EXPECT_THROW(multiscale_solution({0.04, 1.0, 0.0, 0.5}, 3), Error);
}

TEST(Multiscale, Theta1FrozenAndResidual) {
  const DimensionlessParams d{0.04, 1.0, 0.0, 0.5};
  const auto t1 = theta1_series(d);
  ASSERT_EQ(t1.terms().size(), 1u);
  EXPECT_EQ(t1.terms()[0].n, 2);
  EXPECT_EQ(t1.mean(), 0.0);
  EXPECT_NEAR(t1.coefficient(2).first, 0.0647732, 1e-6);
  EXPECT_NEAR(t1.coefficient(2).second, -0.2970026, 1e-6);
  EXPECT_LT(residual(t1, first_order_forcing(d), d.beta, d.mu), 1e-12);
}

TEST(Multiscale, Theta1MatchesIntegratedOracle) {
  const auto d = gravity_case(0.04);
  const auto f = first_order_forcing(d);
  const auto fo = oracle::steady_fourier([&](double t) { return f.evaluate(t); }, d.beta,
                                         d.stiffness(), 3);
  const auto t1 = theta1_series(d);
  for (int n = 1; n <= 3; ++n) {
    EXPECT_NEAR(fo.cos_amp[n], t1.coefficient(n).first, 1e-6) << n;
    EXPECT_NEAR(fo.sin_amp[n], t1.coefficient(n).second, 1e-6) << n;
  }
}

TEST(Multiscale, SecondOrderForcingFrozen) {
  // Brute-force projection of beta theta1^2/2 - (cos(2tau-theta0) + w cos(tau-theta0)) theta1
  // for beta = 0.5, mu = 1, w = 0.3.
  const auto d = gravity_case(0.04);
  const auto f2 = second_order_forcing(d, theta1_series(d));
  EXPECT_NEAR(f2.mean(), 0.183710525264, 1e-9);
  const double expect[4][2] = {{0.317557072897, 0.005504367604},
                               {0.022500000000, 0.125956714755},
                               {0.007245913158, 0.337419939467},
                               {-0.112800115877, 0.107603155194}};
  for (int n = 1; n <= 4; ++n) {
    EXPECT_NEAR(f2.coefficient(n).first, expect[n - 1][0], 1e-9) << n;
    EXPECT_NEAR(f2.coefficient(n).second, expect[n - 1][1], 1e-9) << n;
  }
  EXPECT_EQ(f2.max_harmonic(), 4);
}

TEST(Multiscale, SecondOrderForcingMatchesProjection) {
  for (const DimensionlessParams& d :
       {gravity_case(0.04), DimensionlessParams{0.05, 1.3, 0.2, 0.3},
        DimensionlessParams{0.02, 0.8, 0.05, 0.7}, DimensionlessParams{0.04, 1.0, 0.0, 0.5}}) {
    const auto t1 = theta1_series(d);
    const auto f2 = second_order_forcing(d, t1);
    const auto fo = oracle::project([&](double t) { return second_order_rhs(d, t1, t); }, 6, 256);
    EXPECT_NEAR(f2.mean(), fo.mean, 1e-13);
    for (int n = 1; n <= 6; ++n) {
      EXPECT_NEAR(f2.coefficient(n).first, fo.cos_amp[n], 1e-13) << n;
      EXPECT_NEAR(f2.coefficient(n).second, fo.sin_amp[n], 1e-13) << n;
    }
  }
}

TEST(Multiscale, SecondOrderForcingStructure) {
  const DimensionlessParams no_gravity{0.04, 1.0, 0.0, 0.5};
  const auto f2 = second_order_forcing(no_gravity, theta1_series(no_gravity));
  EXPECT_EQ(f2.coefficient(1), std::make_pair(0.0, 0.0));
  EXPECT_EQ(f2.coefficient(3), std::make_pair(0.0, 0.0));

  // Vanishing damping: only the cross term A2 b2 - B2 a2 survives in the mean.
  const DimensionlessParams tiny{0.04, 1.0, 0.0, 1e-9};
  const auto t1 = theta1_series(tiny);
  const auto f = first_order_forcing(tiny);
  const auto [A2, B2] = f.coefficient(2);
  const auto [a2, b2] = t1.coefficient(2);
  EXPECT_NEAR(2.0 * second_order_forcing(tiny, t1).mean(), A2 * b2 - B2 * a2, 1e-9);
}

TEST(Multiscale, Theta2Residual) {
  for (const DimensionlessParams& d :
       {gravity_case(0.04), DimensionlessParams{0.05, 1.3, 0.2, 0.3}}) {
    const auto t1 = theta1_series(d);
    const auto t2 = theta2_series(d);
    EXPECT_LT(residual(t2, second_order_forcing(d, t1), d.beta, d.mu), 1e-12);
    EXPECT_NEAR(t2.mean(), second_order_forcing(d, t1).mean() / d.stiffness(), 1e-15);
  }
}

TEST(Multiscale, ReducesToExactRotation) {
  const DimensionlessParams d{0.0, 1.0, 0.0, 0.5};
  const auto sol = multiscale_solution(d, 2);
  for (double tau = 0.0; tau < 7.0; tau += 0.3) {
    EXPECT_EQ(sol.theta(tau), -tau + std::asin(0.5));
    EXPECT_EQ(sol.theta_dot(tau), -1.0);
  }
}

TEST(Multiscale, ClosedFormMatchesSeries) {
  for (const DimensionlessParams& d :
       {gravity_case(0.04), DimensionlessParams{0.05, 1.3, 0.2, 0.3},
        DimensionlessParams{0.1, 0.7, 0.3, 0.69}}) {
    const auto t1 = theta1_series(d);
    const double th0 = std::asin(d.beta / d.mu);
    for (int k = 0; k < 64; ++k) {
      const double tau = two_pi * k / 64.0;
      EXPECT_NEAR(first_order_closed_form(d, tau), -tau + th0 + d.eps * t1.evaluate(tau),
                  1e-13);
    }
  }
}

TEST(Multiscale, DefectIsThirdOrder) {
  const double r1 = full_defect(multiscale_solution(gravity_case(0.04), 2), gravity_case(0.04));
  const double r2 = full_defect(multiscale_solution(gravity_case(0.02), 2), gravity_case(0.02));
  const double r3 = full_defect(multiscale_solution(gravity_case(0.01), 2), gravity_case(0.01));
  EXPECT_GE(r1 / r2, 6.0);
  EXPECT_LE(r1 / r2, 10.0);
  EXPECT_GE(r2 / r3, 6.0);
  EXPECT_LE(r2 / r3, 10.0);
}

TEST(Multiscale, ConvergenceAgainstIntegration) {
  double e1[3], e2[3];
  const double eps[3] = {0.04, 0.02, 0.01};
  for (int i = 0; i < 3; ++i) {
    const auto d = gravity_case(eps[i]);
    e1[i] = oracle::steady_velocity_error(multiscale_solution(d, 1), d).max_abs_err;
    e2[i] = oracle::steady_velocity_error(multiscale_solution(d, 2), d).max_abs_err;
  }
  for (int i = 0; i < 2; ++i) {
    EXPECT_GE(e1[i] / e1[i + 1], 3.0);
    EXPECT_LE(e1[i] / e1[i + 1], 5.0);
    EXPECT_GE(e2[i] / e2[i + 1], 6.0);
    EXPECT_LE(e2[i] / e2[i + 1], 10.0);
    EXPECT_LT(e2[i], e1[i]);
  }
}

TEST(Multiscale, JsonDump) {
  const auto j = to_json(multiscale_solution(gravity_case(0.04), 2));
  EXPECT_EQ(j.at("method"), "multiscale2");
  EXPECT_EQ(j.at("series1").at("terms").size(), 2u);
  EXPECT_EQ(j.at("series2").at("terms").size(), 4u);
}
