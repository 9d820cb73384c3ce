#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ialab/numerics.hpp"

namespace ialab {

class InfeasibleTraining : public std::runtime_error {
 public:
  explicit InfeasibleTraining(const std::string& what) : std::runtime_error(what) {}
};

struct NetworkConfig {
  int k_users = 3;
  int m_antennas = 2;
  int streams = 1;          // per user
  double noise_power = 1.0;  // N0, linear
  double p_max = 1.0;        // linear
  int subcarriers = 1;

  /// Throws ContractViolation naming the first offending field.
  void validate() const;
};

/// All K x K channel matrices of one subcarrier.
///
/// forward(k, l) is the M x M channel from source l to destination k.
/// The reverse channel is never stored; reverse(k, l) returns forward(l, k)^*.
class InterferenceChannel {
 public:
  InterferenceChannel() = default;
  InterferenceChannel(int k_users, int m_antennas);

  int k_users() const { return k_; }
  int m_antennas() const { return m_; }

  const ComplexMatrix& forward(int k, int l) const { return h_[index(k, l)]; }
  ComplexMatrix& forward(int k, int l) { return h_[index(k, l)]; }
  ComplexMatrix reverse(int k, int l) const { return forward(l, k).adjoint(); }

  /// Channel set of the reverse (destination -> source) direction.
  InterferenceChannel reversed() const;

 private:
  std::size_t index(int k, int l) const { return static_cast<std::size_t>(k * k_ + l); }

  int k_ = 0;
  int m_ = 0;
  std::vector<ComplexMatrix> h_;
};

struct ChannelSet {
  int k_users = 0;
  int m_antennas = 0;
  std::uint64_t seed = 0;
  std::vector<InterferenceChannel> per_subcarrier;

  int subcarriers() const { return static_cast<int>(per_subcarrier.size()); }
  const InterferenceChannel& at(int s) const { return per_subcarrier.at(static_cast<std::size_t>(s)); }
};

struct TrainingConfig {
  int coherence_time = 100;     // T, symbols
  double sharing_factor = 0.1;  // alpha
  double avg_power = 1.0;       // P, linear

  double pilot_symbols() const { return sharing_factor * coherence_time; }
  double data_symbols() const { return (1.0 - sharing_factor) * coherence_time; }

  void validate(const NetworkConfig& cfg) const;
};

struct PowerSplit {
  double beta;
  double p_data;
  double p_pilot;
};

struct ChannelEstimate {
  ChannelSet estimates;
  double error_variance;
};

struct DofLimits {
  double d_sum;
  int k_opt;
};

/// i.i.d. CN(0, 1) entries, independent across subcarriers.
ChannelSet sample_channels(const NetworkConfig& cfg, std::uint64_t seed);

/// Exact optimal pilot/data power split. Throws ContractViolation when
/// alpha >= 1 or alpha < K/T.
PowerSplit optimal_power_split(const TrainingConfig& train, const NetworkConfig& cfg);

/// High-power approximation of the optimal data power fraction.
double approx_power_split(const TrainingConfig& train, const NetworkConfig& cfg);

/// Pilot-based MMSE estimate of every channel coefficient.
///
/// Each source owns floor(alpha T / K) orthogonal unit pilots sent at power
/// pilot_power (defaults to the optimal split). Throws InfeasibleTraining when
/// that slot count is below one.
ChannelEstimate estimate_channels(const ChannelSet& truth, const TrainingConfig& train,
                                  const NetworkConfig& cfg, std::uint64_t seed,
                                  std::optional<double> pilot_power = std::nullopt);

DofLimits dof_limits(int k_users, int coherence_time);

nlohmann::json to_json(const ChannelSet& set);
ChannelSet channel_set_from_json(const nlohmann::json& doc);

}  // namespace ialab
