#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ialab/alignment.hpp"

namespace ialab {

class InfeasibleLink : public std::runtime_error {
 public:
  explicit InfeasibleLink(const std::string& what) : std::runtime_error(what) {}
};

struct PowerControlConfig {
  std::vector<double> gamma;   // per-user target SINR, linear
  double p_max = 1.0;
  double p_forward_probe = 0.0;  // P_F for reverse sweeps; <= 0 means p_max
  int max_iters = 300;
  double tol = 1e-10;

  /// gamma_k = 2^{R_k} - 1 for every target rate.
  static std::vector<double> gamma_from_rates(const std::vector<double>& target_rates);

  double probe_power() const { return p_forward_probe > 0.0 ? p_forward_probe : p_max; }
  void validate(int k_users) const;
};

struct PowerControlStep {
  int iter;
  std::vector<double> power;
  std::vector<double> sinr;
};

struct PowerControlResult {
  TransceiverState state;
  std::vector<PowerControlStep> trace;
  bool converged = false;
  bool saturated = false;  // some user pinned at p_max below its target
};

/// |u_k^* H_kk v_k|^2 for the single stream of user k.
double effective_gain(const TransceiverState& state, const InterferenceChannel& ch, int k);

/// Single-stream SINR at destination k; zero when the effective channel vanishes.
double compute_sinr(const TransceiverState& state, const InterferenceChannel& ch, int k,
                    const NetworkConfig& cfg);

/// Minimum power that meets gamma_k at the current interference level.
/// Throws InfeasibleLink when the effective channel is zero.
double required_power(const TransceiverState& state, const InterferenceChannel& ch, int k,
                      double gamma_k, const NetworkConfig& cfg);

/// Joint Max-SINR transceiver design and power control. Each iteration updates
/// receive filters, then powers (capped at p_max), then beamformers through a
/// reverse sweep at probe power. Starts at p_max.
PowerControlResult run_joint_ia_pc(const InterferenceChannel& ch, const NetworkConfig& cfg,
                                   const PowerControlConfig& pc, std::uint64_t seed);

/// Power iteration P <- min(beta(P), p_max) with the filters in `state` held
/// fixed, starting from `start`. Returns every iterate, `start` first.
std::vector<std::vector<double>> fixed_power_iteration(const TransceiverState& state,
                                                       const InterferenceChannel& ch,
                                                       const NetworkConfig& cfg,
                                                       const std::vector<double>& gamma,
                                                       double p_max, int iters,
                                                       const std::vector<double>& start);

/// beta(P) evaluated for all users at once (filters fixed).
std::vector<double> interference_function(const TransceiverState& state, const InterferenceChannel& ch,
                                          const NetworkConfig& cfg, const std::vector<double>& gamma,
                                          const std::vector<double>& powers);

nlohmann::json trace_to_json(const PowerControlResult& result);

}  // namespace ialab
