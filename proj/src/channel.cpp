#include "ialab/channel.hpp"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

namespace ialab {

namespace {

Complex draw_cn(std::mt19937_64& rng, double variance) {
  std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

}  // namespace

void NetworkConfig::validate() const {
  if (k_users < 1) throw ContractViolation("k_users must be >= 1");
  if (m_antennas < 1) throw ContractViolation("m_antennas must be >= 1");
  if (streams < 1 || streams > m_antennas) {
    throw ContractViolation("streams must lie in [1, m_antennas]");
  }
  if (!(noise_power > 0.0)) throw ContractViolation("noise_power must be > 0");
  if (!(p_max > 0.0)) throw ContractViolation("p_max must be > 0");
  if (subcarriers < 1) throw ContractViolation("subcarriers must be >= 1");
}

InterferenceChannel::InterferenceChannel(int k_users, int m_antennas)
    : k_(k_users),
      m_(m_antennas),
      h_(static_cast<std::size_t>(k_users * k_users), ComplexMatrix::Zero(m_antennas, m_antennas)) {}

InterferenceChannel InterferenceChannel::reversed() const {
  InterferenceChannel out(k_, m_);
  for (int k = 0; k < k_; ++k) {
    for (int l = 0; l < k_; ++l) out.forward(k, l) = reverse(k, l);
  }
  return out;
}

void TrainingConfig::validate(const NetworkConfig& cfg) const {
  if (coherence_time < 1) throw ContractViolation("coherence_time must be >= 1");
  const double lo = static_cast<double>(cfg.k_users) / coherence_time;
  if (!(sharing_factor >= lo) || !(sharing_factor < 1.0)) {
    throw ContractViolation("sharing_factor must lie in [K/T, 1)");
  }
  if (!(avg_power > 0.0)) throw ContractViolation("avg_power must be > 0");
}

ChannelSet sample_channels(const NetworkConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  ChannelSet set;
  set.k_users = cfg.k_users;
  set.m_antennas = cfg.m_antennas;
  set.seed = seed;
  set.per_subcarrier.reserve(static_cast<std::size_t>(cfg.subcarriers));
  for (int s = 0; s < cfg.subcarriers; ++s) {
    InterferenceChannel ch(cfg.k_users, cfg.m_antennas);
    for (int k = 0; k < cfg.k_users; ++k) {
      for (int l = 0; l < cfg.k_users; ++l) {
        ComplexMatrix& h = ch.forward(k, l);
        for (int r = 0; r < cfg.m_antennas; ++r) {
          for (int c = 0; c < cfg.m_antennas; ++c) h(r, c) = draw_cn(rng, 1.0);
        }
      }
    }
    set.per_subcarrier.push_back(std::move(ch));
  }
  return set;
}

PowerSplit optimal_power_split(const TrainingConfig& train, const NetworkConfig& cfg) {
  const double alpha = train.sharing_factor;
  if (alpha >= 1.0) throw ContractViolation("optimal_power_split: sharing_factor must be < 1");
  train.validate(cfg);
  const double k = cfg.k_users;
  const double p = train.avg_power;
  const double t = train.coherence_time;
  const double ratio = (1.0 + k * p / (1.0 - alpha)) / (1.0 + p * t / cfg.noise_power);
  const double beta = 1.0 / ((1.0 - alpha) * (1.0 + std::sqrt(ratio)));
  return {beta, beta * p, k * (1.0 - (1.0 - alpha) * beta) / alpha * p};
}

double approx_power_split(const TrainingConfig& train, const NetworkConfig& cfg) {
  const double alpha = train.sharing_factor;
  const double root = std::sqrt(cfg.k_users * cfg.noise_power / (train.coherence_time * (1.0 - alpha)));
  return (1.0 / (1.0 - alpha)) / (1.0 + root);
}

ChannelEstimate estimate_channels(const ChannelSet& truth, const TrainingConfig& train,
                                  const NetworkConfig& cfg, std::uint64_t seed,
                                  std::optional<double> pilot_power) {
  const int slots = static_cast<int>(std::floor(train.pilot_symbols() / cfg.k_users + 1e-12));
  if (slots < 1) throw InfeasibleTraining("estimate_channels: fewer than one pilot symbol per source");
  const double p_tau = pilot_power ? *pilot_power : optimal_power_split(train, cfg).p_pilot;
  if (p_tau < 0.0) throw ContractViolation("estimate_channels: negative pilot power");
  if (cfg.noise_power < 0.0) throw ContractViolation("estimate_channels: negative noise power");

  const double n0 = cfg.noise_power;
  const double amp = std::sqrt(p_tau);
  const double denom = p_tau * slots + n0;
  std::mt19937_64 rng(seed);

  ChannelEstimate out{truth, denom > 0.0 ? n0 / denom : 1.0};
  for (auto& ch : out.estimates.per_subcarrier) {
    for (int k = 0; k < truth.k_users; ++k) {
      for (int l = 0; l < truth.k_users; ++l) {
        ComplexMatrix& h = ch.forward(k, l);
        for (Eigen::Index i = 0; i < h.size(); ++i) {
          Complex& coeff = h.data()[i];
          // matched sum over unit pilots: sum_t x_t^* y_t
          Complex acc = 0.0;
          for (int t = 0; t < slots; ++t) acc += amp * coeff + (n0 > 0.0 ? draw_cn(rng, n0) : Complex{});
          coeff = denom > 0.0 ? amp * acc / denom : Complex{};
        }
      }
    }
  }
  return out;
}

DofLimits dof_limits(int k_users, int coherence_time) {
  if (coherence_time < 2) throw ContractViolation("dof_limits: coherence_time must be >= 2");
  const double k = k_users;
  const double t = coherence_time;
  const double first = std::max(0.0, k * (1.0 - k / t) / 2.0);
  return {std::min(first, t / 8.0), std::min(k_users, coherence_time / 2)};
}

nlohmann::json to_json(const ChannelSet& set) {
  nlohmann::json h = nlohmann::json::array();
  for (const auto& ch : set.per_subcarrier) {
    for (int k = 0; k < set.k_users; ++k) {
      for (int l = 0; l < set.k_users; ++l) {
        const ComplexMatrix& m = ch.forward(k, l);
        nlohmann::json entries = nlohmann::json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
          for (Eigen::Index c = 0; c < m.cols(); ++c) entries.push_back({m(r, c).real(), m(r, c).imag()});
        }
        h.push_back(std::move(entries));
      }
    }
  }
  return {{"k", set.k_users},
          {"m", set.m_antennas},
          {"subcarriers", set.subcarriers()},
          {"seed", set.seed},
          {"h", std::move(h)}};
}

ChannelSet channel_set_from_json(const nlohmann::json& doc) {
  ChannelSet set;
  set.k_users = doc.at("k").get<int>();
  set.m_antennas = doc.at("m").get<int>();
  set.seed = doc.value("seed", std::uint64_t{0});
  const int subcarriers = doc.at("subcarriers").get<int>();
  if (set.k_users < 1 || set.m_antennas < 1 || subcarriers < 1) {
    throw ContractViolation("channel set: k, m and subcarriers must be >= 1");
  }
  const auto& h = doc.at("h");
  const std::size_t blocks = static_cast<std::size_t>(subcarriers) * set.k_users * set.k_users;
  if (h.size() != blocks) throw ContractViolation("channel set: h has the wrong number of matrices");

  std::size_t b = 0;
  for (int s = 0; s < subcarriers; ++s) {
    InterferenceChannel ch(set.k_users, set.m_antennas);
    for (int k = 0; k < set.k_users; ++k) {
      for (int l = 0; l < set.k_users; ++l, ++b) {
        const auto& entries = h[b];
        if (entries.size() != static_cast<std::size_t>(set.m_antennas * set.m_antennas)) {
          throw ContractViolation("channel set: matrix entry count mismatch");
        }
        ComplexMatrix& m = ch.forward(k, l);
        for (int r = 0; r < set.m_antennas; ++r) {
          for (int c = 0; c < set.m_antennas; ++c) {
            const auto& z = entries[static_cast<std::size_t>(r * set.m_antennas + c)];
            m(r, c) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
          }
        }
      }
    }
    set.per_subcarrier.push_back(std::move(ch));
  }
  return set;
}

}  // namespace ialab
