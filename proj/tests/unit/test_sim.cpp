#include <gtest/gtest.h>

#include <set>

#include "ialab/sim.hpp"
#include "test_util.hpp"

using namespace ialab;

namespace {

NetworkConfig net(int k, int m, int subs = 1, double n0 = 1.0, double p_max = 100.0) {
  NetworkConfig c;
  c.k_users = k;
  c.m_antennas = m;
  c.streams = std::max(1, m / 2);
  c.subcarriers = subs;
  c.noise_power = n0;
  c.p_max = p_max;
  return c;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

SchemeResult fake_result(Scheme s, int drop, std::vector<double> powers) {
  SchemeResult r;
  r.scheme = s;
  r.drop = drop;
  for (double p : powers) {
    UserOutcome u;
    u.tx_power = p;
    u.sinr_samples_db = {18.0};
    u.sinr_db = 18.0;
    r.users.push_back(u);
  }
  return r;
}

}  // namespace

TEST(Frame, AlphaScaling) {
  const auto cfg = net(3, 2, 1, 1.0, 8.0);
  auto f = build_frame(cfg, {{8.0}, {8.0}, {8.0}}, true);
  EXPECT_DOUBLE_EQ(f.alpha_scale, 1.0);
  f = build_frame(cfg, {{2.0}, {1.0}, {0.5}}, true);
  EXPECT_GT(f.alpha_scale, 1.0);
  EXPECT_LE(f.alpha_scale, 2.0);
  EXPECT_NEAR(f.alpha_db, 6.0, 1e-12);
  EXPECT_NEAR(std::fmod(f.alpha_db, 0.5), 0.0, 1e-12);
}

TEST(Frame, ReferenceSignalLayout) {
  const auto cfg = net(3, 2, 1, 1.0, 1.0);
  const auto f = build_frame(cfg, {{1.0}, {0.5}, {0.25}}, true);
  ASSERT_EQ(f.csi_rs_symbols.size(), 6u);
  ASSERT_TRUE(f.p_rs_symbol.has_value());
  EXPECT_EQ(f.payload_symbols.size(), 20u);
  std::set<int> used(f.csi_rs_symbols.begin(), f.csi_rs_symbols.end());
  EXPECT_EQ(used.size(), 6u);
  used.insert(f.dm_rs_symbols.begin(), f.dm_rs_symbols.end());
  used.insert(*f.p_rs_symbol);
  used.insert(f.payload_symbols.begin(), f.payload_symbols.end());
  EXPECT_EQ(static_cast<int>(used.size()), f.total_symbols());
  EXPECT_FALSE(build_frame(cfg, {{1.0}, {1.0}, {1.0}}, false).p_rs_symbol.has_value());
}

TEST(Mcs, StandardTable) {
  const auto t = McsTable::standard();
  ASSERT_EQ(t.entries.size(), 10u);
  const std::vector<double> expected{1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 3.75, 4.0, 4.5, 5.0};
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_DOUBLE_EQ(t.entries[i].spectral_efficiency, expected[i]);
    EXPECT_DOUBLE_EQ(std::log2(t.entries[i].modulation_order) * t.entries[i].code_rate, expected[i]);
    if (i) EXPECT_GT(t.entries[i].spectral_efficiency, t.entries[i - 1].spectral_efficiency);
  }
  EXPECT_EQ(t.entries[5].modulation_order, 16);
}

TEST(Probe, Examples) {
  const auto t = McsTable::standard();
  EXPECT_DOUBLE_EQ(probe_throughput({std::exp2(3.2) - 1.0}, t), 3.0);
  EXPECT_DOUBLE_EQ(probe_throughput({0.0}, t), 0.0);
  EXPECT_DOUBLE_EQ(probe_throughput({1e9}, t), 5.0);
  EXPECT_DOUBLE_EQ(probe_throughput({1e9, std::exp2(3.2) - 1.0}, t), 8.0);
  double prev = 0.0;
  for (double db = -10; db < 40; db += 0.05) {
    const double r = probe_throughput({std::pow(10.0, db / 10.0)}, t);
    EXPECT_GE(r, prev);
    prev = r;
  }
}

TEST(Ber, Limits) {
  for (int order : {4, 16, 64, 256}) {
    EXPECT_NEAR(ber_for_sinr(0.0, order), 0.5, 0.02);
    EXPECT_LT(ber_for_sinr(1e6, order), 1e-12);
    double prev = 1.0;
    for (double db = -10; db < 40; db += 0.5) {
      const double b = ber_for_sinr(std::pow(10.0, db / 10.0), order);
      EXPECT_LE(b, prev);
      EXPECT_GE(b, 0.0);
      EXPECT_LE(b, 0.5);
      prev = b;
    }
  }
}

TEST(Ber, QpskIsExact) {
  for (double g : {0.1, 1.0, 4.0, 20.0}) EXPECT_NEAR(ber_for_sinr(g, 4) / q_function(std::sqrt(g)), 1.0, 1e-12);
}

TEST(Ber, SixteenQamMatchesMonteCarlo) {
  // Gray-mapped 16QAM: two bits per axis, levels -3,-1,1,3 <-> 00,01,11,10
  const double sinr = std::pow(10.0, 1.85);
  const double scale = std::sqrt(10.0);  // mean symbol energy of the +-1,+-3 grid
  const double sigma = std::sqrt(1.0 / sinr / 2.0);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> noise(0.0, sigma);
  std::uniform_int_distribution<int> level(0, 3);
  const int gray[4] = {0b00, 0b01, 0b11, 0b10};
  auto slice = [](double y) {
    if (y < -2.0) return 0;
    if (y < 0.0) return 1;
    if (y < 2.0) return 2;
    return 3;
  };
  const long symbols = 10'000'000;
  long errors = 0;
  for (long n = 0; n < symbols; ++n) {
    for (int axis = 0; axis < 2; ++axis) {
      const int tx = level(rng);
      const double y = (2 * tx - 3) / scale + noise(rng);
      const int rx = slice(y * scale);
      errors += __builtin_popcount(gray[tx] ^ gray[rx]);
    }
  }
  const double mc = static_cast<double>(errors) / (4.0 * symbols);
  EXPECT_NEAR(ber_for_sinr(sinr, 16) / mc, 1.0, 0.05) << "mc=" << mc;
}

TEST(Mmse, MatchesExplicitInverse) {
  std::mt19937_64 rng(4);
  const auto cfg = net(3, 4, 1, 0.3);
  const auto set = sample_channels(cfg, 11);
  const auto& ch = set.at(0);
  const auto st = random_state(cfg, 2, 5.0);
  for (int k = 0; k < 3; ++k) {
    for (int d = 0; d < 2; ++d) {
      ComplexMatrix q = cfg.noise_power * identity(4);
      for (int j = 0; j < 3; ++j) {
        for (int l = 0; l < 2; ++l) {
          if (j == k && l == d) continue;
          const ComplexVector x = ch.forward(k, j) * st.v[j].col(l);
          q += st.p[j] / 2.0 * x * x.adjoint();
        }
      }
      const ComplexVector h = ch.forward(k, k) * st.v[k].col(d);
      const double expected = st.p[k] / 2.0 * (h.adjoint() * q.inverse() * h)(0, 0).real();
      EXPECT_NEAR(mmse_stream_sinr(st, ch, k, d, cfg) / expected, 1.0, 1e-10);
    }
  }
}

TEST(Schemes, TdmaRateIsIsolatedRateOverK) {
  const auto cfg = net(3, 2, 4, 1.0, 100.0);
  const auto set = sample_channels(cfg, 5);
  SchemeKnobs knobs;
  const auto r = simulate_scheme(Scheme::tdma_mimo, set, cfg, knobs, 1);
  const auto mcs = McsTable::standard();
  for (int k = 0; k < 3; ++k) {
    double isolated = 0.0;
    for (int s = 0; s < 4; ++s) {
      // SVD precoding on an isolated link leaves parallel channels sigma_i^2 P / M
      Eigen::JacobiSVD<ComplexMatrix> sv(set.at(s).forward(k, k));
      std::vector<double> sinrs;
      for (int i = 0; i < 2; ++i) sinrs.push_back(100.0 / 2.0 * std::pow(sv.singularValues()[i], 2));
      isolated += probe_throughput(sinrs, mcs);
    }
    isolated /= 4.0;
    EXPECT_NEAR(r.users[k].rate * 3.0, isolated, 1e-12);
  }
}

TEST(Schemes, FullReuseLosesOnSymmetricStrongInterference) {
  const auto cfg = net(3, 2, 4, 1.0, 1000.0);
  auto set = sample_channels(cfg, 6);
  for (auto& ch : set.per_subcarrier) {
    for (int k = 0; k < 3; ++k) {
      for (int l = 0; l < 3; ++l) ch.forward(k, l) = ch.forward(0, 0);
    }
  }
  SchemeKnobs knobs;
  const auto full = simulate_scheme(Scheme::fullreuse_mimo, set, cfg, knobs, 1);
  const auto tdma = simulate_scheme(Scheme::tdma_mimo, set, cfg, knobs, 1);
  EXPECT_LT(full.sum_throughput, tdma.sum_throughput);
}

TEST(Schemes, LosslessFeedbackMatchesIdealCsi) {
  const auto cfg = net(3, 2, 6, 1.0, 1000.0);
  SchemeKnobs knobs;
  knobs.quantized_feedback = false;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto set = sample_channels(cfg, 100 + seed);
    const auto ideal = simulate_scheme(Scheme::nopc, set, cfg, knobs, seed);
    const auto fed = simulate_scheme(Scheme::ia_feedback, set, cfg, knobs, seed);
    EXPECT_NEAR(fed.sum_throughput, ideal.sum_throughput, 1e-6);
    EXPECT_EQ(fed.feedback_bits, 0u);
  }
}

TEST(Schemes, QuantizedFeedbackCountsBits) {
  const auto cfg = net(3, 2, 38, 1.0, 1000.0);
  const auto set = sample_channels(cfg, 8);
  SchemeKnobs knobs;
  knobs.feedback.n_g = 4;
  const auto r = simulate_scheme(Scheme::ia_feedback, set, cfg, knobs, 3);
  const std::size_t rep = apply_granularity(38, 4).size();
  EXPECT_EQ(r.feedback_bits, 3 * (29 + 130 * rep + 16 + 8 * rep));
  EXPECT_EQ(r.n_g, 4);
}

TEST(Schemes, OutputsStayInRange) {
  const auto cfg = net(3, 2, 2, 1.0, 1000.0);
  const auto set = sample_channels(cfg, 9);
  SchemeKnobs knobs;
  knobs.pc.gamma.assign(3, std::pow(10.0, 1.8));
  knobs.pc.p_max = 1000.0;
  for (Scheme s : {Scheme::pc, Scheme::nopc, Scheme::ia_feedback, Scheme::tdma_mimo, Scheme::fullreuse_mimo,
                   Scheme::fullreuse_simo}) {
    const auto r = simulate_scheme(s, set, cfg, knobs, 4);
    ASSERT_EQ(r.users.size(), 3u);
    for (const auto& u : r.users) {
      EXPECT_GE(u.rate, 0.0);
      EXPECT_GE(u.ber, 0.0);
      EXPECT_LE(u.ber, 0.5);
      EXPECT_GT(u.tx_power, 0.0);
    }
    EXPECT_EQ(scheme_from_name(scheme_name(s)), s);
  }
  EXPECT_THROW(scheme_from_name("bogus"), ContractViolation);
}

TEST(Metrics, PowerSavingGain) {
  std::vector<SchemeResult> rs{fake_result(Scheme::pc, 0, {1.0, 1.0}), fake_result(Scheme::nopc, 0, {1.0, 1.0}),
                               fake_result(Scheme::pc, 1, {0.5, 0.5}), fake_result(Scheme::nopc, 1, {2.0, 2.0})};
  const auto m = compute_metrics(rs, {});
  ASSERT_EQ(m.power_saving_gain_db.x.size(), 2u);
  EXPECT_NEAR(m.power_saving_gain_db.x[0], 0.0, 1e-15);
  EXPECT_NEAR(m.power_saving_gain_db.x[1], 10 * std::log10(4.0), 1e-12);
  EXPECT_NEAR(m.power_saving_gain_db.x[1], 6.02, 0.001);

  rs.push_back(fake_result(Scheme::pc, 2, {1.0, 1.0}));
  EXPECT_THROW(compute_metrics(rs, {}), ContractViolation);
}

TEST(Metrics, SingleDropCdfIsUnitStep) {
  const auto m = compute_metrics({fake_result(Scheme::pc, 0, {1.0}), fake_result(Scheme::nopc, 0, {3.0})}, {});
  const auto& c = m.power_saving_gain_db;
  ASSERT_EQ(c.x.size(), 1u);
  EXPECT_EQ(c.p[0], 1.0);
  EXPECT_EQ(c.at(c.x[0] - 1e-9), 0.0);
  EXPECT_EQ(c.at(c.x[0]), 1.0);
}

TEST(Metrics, FerAndThroughputVsNg) {
  auto a = fake_result(Scheme::ia_feedback, 0, {1.0});
  a.n_g = 2;
  a.sum_throughput = 4.0;
  a.users[0].sinr_samples_db = {10.0, 20.0};
  auto b = fake_result(Scheme::ia_feedback, 0, {1.0});
  b.n_g = 8;
  b.sum_throughput = 3.0;
  const auto m = compute_metrics({a, b}, {15.0});
  EXPECT_EQ(m.throughput_vs_ng.at(2), 4.0);
  EXPECT_EQ(m.throughput_vs_ng.at(8), 3.0);
  EXPECT_EQ(m.per_scheme.at("ia_feedback/ng=2").fer, 1.0);
  EXPECT_EQ(m.per_scheme.at("ia_feedback/ng=8").fer, 0.0);
  const auto doc = to_json(m);
  EXPECT_EQ(doc.at("throughput_vs_ng").size(), 2u);
}

TEST(Seeds, DeriveSeedIsDeterministicAndSpread) {
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(7, i));
  EXPECT_EQ(seen.size(), 1000u);
}
