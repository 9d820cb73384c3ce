#include "ialab/powerctl.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace ialab {

std::vector<double> PowerControlConfig::gamma_from_rates(const std::vector<double>& target_rates) {
  std::vector<double> out;
  out.reserve(target_rates.size());
  for (double r : target_rates) out.push_back(std::exp2(r) - 1.0);
  return out;
}

void PowerControlConfig::validate(int k_users) const {
  if (gamma.size() != static_cast<std::size_t>(k_users)) {
    throw ContractViolation("power_control.gamma needs one entry per user");
  }
  for (double g : gamma) {
    if (!(g > 0.0)) throw ContractViolation("power_control.gamma entries must be > 0");
  }
  if (!(p_max > 0.0)) throw ContractViolation("power_control.p_max must be > 0");
  if (max_iters < 1) throw ContractViolation("power_control.max_iters must be >= 1");
  if (!(tol > 0.0)) throw ContractViolation("power_control.tol must be > 0");
}

double effective_gain(const TransceiverState& state, const InterferenceChannel& ch, int k) {
  const Complex g = state.u[k].col(0).dot(ch.forward(k, k) * state.v[k].col(0));
  return std::norm(g);
}

double compute_sinr(const TransceiverState& state, const InterferenceChannel& ch, int k,
                    const NetworkConfig& cfg) {
  if (cfg.streams != 1) throw ContractViolation("compute_sinr: single-stream transmission only");
  const double gain = effective_gain(state, ch, k);
  if (gain == 0.0) return 0.0;
  return state.p[k] * gain / (leakage(state, ch, k, cfg) + cfg.noise_power);
}

double required_power(const TransceiverState& state, const InterferenceChannel& ch, int k,
                      double gamma_k, const NetworkConfig& cfg) {
  if (cfg.streams != 1) throw ContractViolation("required_power: single-stream transmission only");
  const double gain = effective_gain(state, ch, k);
  if (gain == 0.0) throw InfeasibleLink("required_power: effective channel is zero");
  return gamma_k * (leakage(state, ch, k, cfg) + cfg.noise_power) / gain;
}

std::vector<double> interference_function(const TransceiverState& state, const InterferenceChannel& ch,
                                          const NetworkConfig& cfg, const std::vector<double>& gamma,
                                          const std::vector<double>& powers) {
  TransceiverState probe = state;
  probe.p = powers;
  std::vector<double> out(powers.size());
  for (int k = 0; k < probe.k_users(); ++k) out[k] = required_power(probe, ch, k, gamma[k], cfg);
  return out;
}

std::vector<std::vector<double>> fixed_power_iteration(const TransceiverState& state,
                                                       const InterferenceChannel& ch,
                                                       const NetworkConfig& cfg,
                                                       const std::vector<double>& gamma,
                                                       double p_max, int iters,
                                                       const std::vector<double>& start) {
  if (start.size() != state.v.size() || gamma.size() != state.v.size()) {
    throw ContractViolation("fixed_power_iteration: one power and one target per user required");
  }
  std::vector<std::vector<double>> trace{start};
  for (int n = 0; n < iters; ++n) {
    std::vector<double> next = interference_function(state, ch, cfg, gamma, trace.back());
    for (double& p : next) p = std::min(p, p_max);
    trace.push_back(std::move(next));
  }
  return trace;
}

PowerControlResult run_joint_ia_pc(const InterferenceChannel& ch, const NetworkConfig& cfg,
                                   const PowerControlConfig& pc, std::uint64_t seed) {
  if (cfg.streams != 1) throw ContractViolation("run_joint_ia_pc: single-stream transmission only");
  pc.validate(cfg.k_users);

  const int k_users = cfg.k_users;
  const InterferenceChannel rev = ch.reversed();
  PowerControlResult out{random_state(cfg, seed, pc.p_max), {}, false, false};
  TransceiverState& state = out.state;

  auto receive_update = [&](TransceiverState& s, const InterferenceChannel& c) {
    std::vector<ComplexMatrix> u(static_cast<std::size_t>(k_users));
    for (int k = 0; k < k_users; ++k) u[k] = max_sinr_filter_update(s, c, k, 0, cfg);
    s.u = std::move(u);
  };

  bool settled = false;
  for (int n = 1; n <= pc.max_iters && !settled; ++n) {
    const std::vector<ComplexMatrix> prev_v = state.v;
    const std::vector<ComplexMatrix> prev_u = state.u;
    const std::vector<double> prev_p = state.p;

    receive_update(state, ch);

    std::vector<double> next(static_cast<std::size_t>(k_users));
    for (int k = 0; k < k_users; ++k) {
      const double gain = effective_gain(state, ch, k);
      next[k] = gain > 0.0 ? std::min(required_power(state, ch, k, pc.gamma[k], cfg), pc.p_max) : pc.p_max;
    }
    state.p = next;

    TransceiverState back{state.u, state.v, std::vector<double>(static_cast<std::size_t>(k_users), pc.probe_power())};
    receive_update(back, rev);
    state.v = std::move(back.u);

    PowerControlStep step{n, state.p, {}};
    for (int k = 0; k < k_users; ++k) step.sinr.push_back(compute_sinr(state, ch, k, cfg));
    out.trace.push_back(std::move(step));

    double dp = 0.0;
    for (int k = 0; k < k_users; ++k) dp = std::max(dp, std::abs(state.p[k] - prev_p[k]) / prev_p[k]);
    const double df = std::max(filter_change(prev_v, state.v), filter_change(prev_u, state.u));
    settled = dp < pc.tol && df < pc.tol;
  }

  // receivers track the final beamformers and powers
  receive_update(state, ch);
  for (int k = 0; k < k_users; ++k) {
    if (state.p[k] >= pc.p_max && compute_sinr(state, ch, k, cfg) < pc.gamma[k] * (1.0 - 1e-9)) {
      out.saturated = true;
    }
  }
  out.converged = settled && !out.saturated;
  return out;
}

nlohmann::json trace_to_json(const PowerControlResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& step : result.trace) {
    for (std::size_t k = 0; k < step.power.size(); ++k) {
      const double sinr = step.sinr[k];
      rows.push_back({{"iter", step.iter},
                      {"user", k},
                      {"power_dbm", 10.0 * std::log10(step.power[k])},
                      {"sinr_db", sinr > 0.0 ? 10.0 * std::log10(sinr) : -300.0}});
    }
  }
  return rows;
}

}  // namespace ialab
