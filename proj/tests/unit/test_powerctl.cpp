#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "ialab/powerctl.hpp"
#include "test_util.hpp"

using namespace ialab;

namespace {

NetworkConfig net(int k, int m, double n0 = 1.0, double p_max = 1.0) {
  NetworkConfig c;
  c.k_users = k;
  c.m_antennas = m;
  c.streams = 1;
  c.noise_power = n0;
  c.p_max = p_max;
  return c;
}

InterferenceChannel random_channel(std::mt19937_64& rng, int k, int m, double cross = 1.0) {
  InterferenceChannel ch(k, m);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) ch.forward(a, b) = testutil::gaussian(rng, m, m) * (a == b ? 1.0 : cross);
  }
  return ch;
}

ComplexMatrix scalar(Complex z) { return ComplexMatrix::Constant(1, 1, z); }

double db(double x) { return 10.0 * std::log10(x); }

}  // namespace

TEST(Sinr, SingleLinkExample) {
  InterferenceChannel ch(1, 2);
  ch.forward(0, 0) = identity(2);
  ComplexMatrix e1 = ComplexMatrix::Zero(2, 1);
  e1(0, 0) = 1.0;
  TransceiverState st{{e1}, {e1}, {2.0}};
  EXPECT_DOUBLE_EQ(compute_sinr(st, ch, 0, net(1, 2)), 2.0);
  ComplexMatrix e2 = ComplexMatrix::Zero(2, 1);
  e2(1, 0) = 1.0;
  st.u[0] = e2;
  EXPECT_EQ(compute_sinr(st, ch, 0, net(1, 2)), 0.0);
  EXPECT_THROW(required_power(st, ch, 0, 1.0, net(1, 2)), InfeasibleLink);
}

TEST(Sinr, MatchesSymbolMonteCarlo) {
  std::mt19937_64 rng(3);
  const auto cfg = net(3, 2, 0.7);
  const auto ch = random_channel(rng, 3, 2);
  auto st = random_state(cfg, 4, 1.0);
  st.p = {1.5, 0.8, 2.2};
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  std::uniform_int_distribution<int> bit(0, 1);
  const int n = 100000;
  for (int k = 0; k < 3; ++k) {
    double sig = 0.0, rest = 0.0;
    for (int t = 0; t < n; ++t) {
      ComplexVector y = ComplexVector::Zero(2);
      Complex desired;
      for (int j = 0; j < 3; ++j) {
        const Complex x = Complex(bit(rng) ? 1 : -1, bit(rng) ? 1 : -1) / std::sqrt(2.0);
        const ComplexVector contrib = std::sqrt(st.p[j]) * ch.forward(k, j) * st.v[j].col(0) * x;
        y += contrib;
        if (j == k) desired = st.u[k].col(0).dot(contrib);
      }
      for (int a = 0; a < 2; ++a) y[a] += std::sqrt(cfg.noise_power) * Complex(g(rng), g(rng));
      const Complex z = st.u[k].col(0).dot(y);
      sig += std::norm(desired);
      rest += std::norm(z - desired);
    }
    const double mc = sig / rest;
    EXPECT_NEAR(mc / compute_sinr(st, ch, k, cfg), 1.0, 0.02) << "user " << k;
  }
}

TEST(RequiredPower, Examples) {
  const auto cfg = net(2, 1);
  InterferenceChannel ch(2, 1);
  ch.forward(0, 0) = scalar(1.0);
  ch.forward(0, 1) = scalar(1.0);
  ch.forward(1, 0) = scalar(0.0);
  ch.forward(1, 1) = scalar(2.0);
  TransceiverState st{{scalar(1.0), scalar(1.0)}, {scalar(1.0), scalar(1.0)}, {1.0, 1.0}};
  EXPECT_DOUBLE_EQ(required_power(st, ch, 0, 3.0, cfg), 6.0);
  EXPECT_DOUBLE_EQ(required_power(st, ch, 1, 4.0, cfg), 1.0);
}

TEST(RequiredPower, InvertsSinr) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto cfg = net(3, 2, 0.5);
    const auto ch = random_channel(rng, 3, 2);
    auto st = random_state(cfg, trial, 1.0);
    const double gamma = std::pow(10.0, std::uniform_real_distribution<double>(-1, 3)(rng));
    st.p[1] = required_power(st, ch, 1, gamma, cfg);
    EXPECT_NEAR(compute_sinr(st, ch, 1, cfg) / gamma, 1.0, 1e-10);
  }
}

TEST(PowerControlConfigTest, GammaFromRates) {
  const auto g = PowerControlConfig::gamma_from_rates({1.0, 3.0, 0.5});
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_DOUBLE_EQ(g[1], 7.0);
  EXPECT_NEAR(g[2], std::sqrt(2.0) - 1.0, 1e-15);
}

TEST(InterferenceFunction, StandardProperties) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 5.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + trial % 3;
    const auto cfg = net(k, 2, 0.1 + unif(rng));
    const auto ch = random_channel(rng, k, 2);
    const auto st = random_state(cfg, static_cast<std::uint64_t>(trial), 1.0);
    std::vector<double> gamma(k), p(k), lower(k), scaled(k);
    for (int i = 0; i < k; ++i) {
      gamma[i] = 0.1 + unif(rng);
      p[i] = unif(rng);
      lower[i] = p[i] * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    }
    const double c = 1.0 + unif(rng);
    for (int i = 0; i < k; ++i) scaled[i] = c * p[i];
    const auto bp = interference_function(st, ch, cfg, gamma, p);
    const auto bl = interference_function(st, ch, cfg, gamma, lower);
    const auto bc = interference_function(st, ch, cfg, gamma, scaled);
    for (int i = 0; i < k; ++i) {
      EXPECT_GT(bp[i], 0.0);
      EXPECT_GE(bp[i], bl[i]);
      EXPECT_GT(c * bp[i], bc[i]);
    }
  }
}

TEST(FixedPowerIteration, NoInterferenceOneStep) {
  std::mt19937_64 rng(9);
  const auto cfg = net(2, 2, 0.5, 100.0);
  auto ch = random_channel(rng, 2, 2, 0.0);
  const auto st = random_state(cfg, 1, 1.0);
  const auto trace = fixed_power_iteration(st, ch, cfg, {2.0, 3.0}, 100.0, 3, {5.0, 7.0});
  ASSERT_EQ(trace.size(), 4u);
  EXPECT_DOUBLE_EQ(trace[0][0], 5.0);
  for (int k = 0; k < 2; ++k) {
    const double expected = (k == 0 ? 2.0 : 3.0) * 0.5 / effective_gain(st, ch, k);
    EXPECT_NEAR(trace[1][k] / expected, 1.0, 1e-14);
    EXPECT_NEAR(trace[3][k] / expected, 1.0, 1e-14);
  }
}

TEST(FixedPowerIteration, TwoUserLinearSystem) {
  // scalar links: g_kk = 1, g_kj = 0.3, N0 = 0.2, gamma = (2, 1.5)
  const auto cfg = net(2, 1, 0.2, 1e6);
  InterferenceChannel ch(2, 1);
  ch.forward(0, 0) = scalar(1.0);
  ch.forward(1, 1) = scalar(Complex(0.0, 1.0));
  ch.forward(0, 1) = scalar(0.3);
  ch.forward(1, 0) = scalar(Complex(0.3, 0.0));
  TransceiverState st{{scalar(1.0), scalar(1.0)}, {scalar(1.0), scalar(1.0)}, {1.0, 1.0}};
  const std::vector<double> gamma{2.0, 1.5};
  const auto trace = fixed_power_iteration(st, ch, cfg, gamma, 1e6, 200, {0.0, 0.0});

  // (I - gamma G) P = gamma eta, solved by Cramer's rule
  const double g = 0.09;
  const double a11 = 1.0, a12 = -gamma[0] * g, a21 = -gamma[1] * g, a22 = 1.0;
  const double b1 = gamma[0] * 0.2, b2 = gamma[1] * 0.2;
  const double det = a11 * a22 - a12 * a21;
  const double p1 = (b1 * a22 - a12 * b2) / det;
  const double p2 = (a11 * b2 - a21 * b1) / det;
  EXPECT_NEAR(trace.back()[0], p1, 1e-8);
  EXPECT_NEAR(trace.back()[1], p2, 1e-8);
}

TEST(FixedPowerIteration, UniqueFixedPointFromRandomStarts) {
  std::mt19937_64 rng(10);
  const auto cfg = net(3, 2, 1.0, 1e6);
  const auto ch = random_channel(rng, 3, 2, 0.1);
  const auto st = random_state(cfg, 2, 1.0);
  const std::vector<double> gamma{1.0, 1.0, 1.0};
  std::vector<double> reference;
  for (int s = 0; s < 10; ++s) {
    std::vector<double> start(3);
    for (double& p : start) p = std::uniform_real_distribution<double>(0.0, 100.0)(rng);
    const auto fp = fixed_power_iteration(st, ch, cfg, gamma, 1e6, 500, start).back();
    for (double p : fp) EXPECT_LT(p, 1e6);
    if (reference.empty()) {
      reference = fp;
    } else {
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(fp[k], reference[k], 1e-8);
    }
  }
}

TEST(JointIaPc, InterferenceFreeFixedPoint) {
  const auto cfg = net(3, 2, 0.5, 100.0);
  InterferenceChannel ch(3, 2);
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) ch.forward(k, l) = k == l ? identity(2) : ComplexMatrix::Zero(2, 2);
  }
  PowerControlConfig pc;
  pc.gamma = {1.0, 4.0, 10.0};
  pc.p_max = 100.0;
  const auto res = run_joint_ia_pc(ch, cfg, pc, 3);
  EXPECT_TRUE(res.converged);
  EXPECT_FALSE(res.saturated);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(res.state.p[k] / (pc.gamma[k] * 0.5), 1.0, 1e-12);
}

TEST(JointIaPc, FeasibleDropHitsTarget) {
  std::mt19937_64 rng(33);
  const auto cfg = net(3, 2, 1.0, 1e4);
  PowerControlConfig pc;
  pc.gamma.assign(3, std::pow(10.0, 1.8));
  pc.p_max = 1e4;
  int checked = 0;
  for (int drop = 0; drop < 10; ++drop) {
    const auto ch = random_channel(rng, 3, 2);
    const auto res = run_joint_ia_pc(ch, cfg, pc, 50u + drop);
    if (res.saturated) continue;
    ++checked;
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(db(compute_sinr(res.state, ch, k, cfg)), 18.0, 0.1);
      EXPECT_LT(res.state.p[k], pc.p_max);
    }
    ASSERT_FALSE(res.trace.empty());
    const auto rows = trace_to_json(res);
    EXPECT_EQ(rows.size(), res.trace.size() * 3);
    EXPECT_TRUE(rows[0].contains("power_dbm"));
    EXPECT_TRUE(rows[0].contains("sinr_db"));
  }
  EXPECT_GE(checked, 8);
}

TEST(JointIaPc, AbsurdTargetSaturates) {
  std::mt19937_64 rng(34);
  const auto cfg = net(3, 2, 1.0, 1.0);
  PowerControlConfig pc;
  pc.gamma.assign(3, 1e6);
  pc.p_max = 1.0;
  pc.max_iters = 50;
  const auto ch = random_channel(rng, 3, 2);
  const auto res = run_joint_ia_pc(ch, cfg, pc, 1);
  EXPECT_FALSE(res.converged);
  EXPECT_TRUE(res.saturated);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(res.state.p[k], 1.0);
    EXPECT_LT(compute_sinr(res.state, ch, k, cfg), 1e6);
  }
}
