#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ialab/alignment.hpp"
#include "ialab/channel.hpp"
#include "ialab/csifb.hpp"
#include "ialab/powerctl.hpp"

namespace ialab {

enum class Scheme { pc, nopc, ia_feedback, tdma_mimo, fullreuse_mimo, fullreuse_simo };

std::string_view scheme_name(Scheme s);
/// Throws ContractViolation for unknown names.
Scheme scheme_from_name(std::string_view name);

struct FrameLayout {
  std::vector<int> dm_rs_symbols;   // one per stream
  std::vector<int> csi_rs_symbols;  // one per transmit antenna
  std::optional<int> p_rs_symbol;
  std::vector<int> payload_symbols;
  double alpha_scale = 1.0;
  double alpha_db = 0.0;

  int total_symbols() const;
};

inline constexpr int kPayloadSymbols = 20;
inline constexpr double kAlphaLatticeDb = 0.5;

/// powers[k][s] is the transmit power of source k on subcarrier s. The
/// DM-RS scaling sqrt(p_max / max power) is floored onto a 0.5 dB lattice.
FrameLayout build_frame(const NetworkConfig& cfg, const std::vector<std::vector<double>>& powers,
                        bool with_power_rs);

struct McsEntry {
  int modulation_order;
  double code_rate;
  double spectral_efficiency;  // bits / symbol / subcarrier
};

struct McsTable {
  std::vector<McsEntry> entries;  // strictly increasing efficiency

  /// Ten lowest distinct efficiencies of {4,16,64,256}-QAM x {1/2, 5/8, 3/4}.
  static McsTable standard();
};

/// Uncoded Gray-mapped square QAM bit error rate at the given symbol SINR.
double ber_for_sinr(double sinr_linear, int modulation_order);

/// Highest MCS rate not above margin * log2(1 + sinr), summed over streams.
double probe_throughput(const std::vector<double>& per_stream_sinr, const McsTable& mcs,
                        double margin = 1.0);

struct SchemeKnobs {
  PowerControlConfig pc;
  double fixed_power = 0.0;  // nopc / ia_feedback / baselines; <= 0 means p_max
  FeedbackConfig feedback;
  bool quantized_feedback = true;
  bool estimate_channels = false;
  TrainingConfig training;
  AlignmentOptions alignment{AlignmentVariant::max_sinr, 100, 1e-6, 0};
  McsTable mcs = McsTable::standard();
  double rate_margin = 1.0;
  int ber_modulation_order = 16;

  double transmit_power(const NetworkConfig& cfg) const { return fixed_power > 0.0 ? fixed_power : cfg.p_max; }
};

struct UserOutcome {
  double sinr_db = 0.0;  // mean of the per-sample dB values
  double rate = 0.0;     // bits / symbol / subcarrier, averaged over subcarriers
  double ber = 0.0;
  double tx_power = 0.0;  // per-subcarrier average, linear
  std::vector<double> sinr_samples_db;  // one per subcarrier and stream
};

struct SchemeResult {
  Scheme scheme = Scheme::nopc;
  int drop = 0;
  int n_g = 0;  // ia_feedback only
  std::vector<UserOutcome> users;
  double sum_throughput = 0.0;
  std::size_t feedback_bits = 0;
  bool feasible = true;  // pc: no user saturated on any subcarrier
  nlohmann::json trace;  // convergence diagnostics of subcarrier 0

  double total_power() const;
};

/// SINR of stream `stream` of user k under a linear MMSE receiver.
double mmse_stream_sinr(const TransceiverState& state, const InterferenceChannel& ch, int k, int stream,
                        const NetworkConfig& cfg);

/// Scales every cross link H_kl (k != l) by sqrt(gain).
void apply_cross_gain(ChannelSet& set, double gain);

SchemeResult simulate_scheme(Scheme scheme, const ChannelSet& channels, const NetworkConfig& cfg,
                             const SchemeKnobs& knobs, std::uint64_t seed);

struct EmpiricalCdf {
  std::vector<double> x;  // sorted samples
  std::vector<double> p;  // (i + 1) / n

  static EmpiricalCdf from_samples(std::vector<double> samples);
  double at(double value) const;
};

struct SchemeMetrics {
  EmpiricalCdf sinr_db;
  double mean_ber = 0.0;
  double fer = 0.0;  // fraction of (drop, user) whose worst sample misses the threshold
  double mean_sum_throughput = 0.0;
  double mean_feedback_bits = 0.0;
  int drops = 0;
};

struct MetricsOptions {
  double fer_threshold_db = 0.0;
};

struct Metrics {
  std::map<std::string, SchemeMetrics> per_scheme;  // keyed by result label
  EmpiricalCdf power_saving_gain_db;                // nopc total / pc total, per drop
  std::map<int, double> throughput_vs_ng;           // ia_feedback mean sum throughput
};

/// Label used in reports: scheme name, plus "/ng=N" for ia_feedback results.
std::string result_label(const SchemeResult& r);

/// Throws ContractViolation when pc and nopc drop counts differ.
Metrics compute_metrics(const std::vector<SchemeResult>& results, const MetricsOptions& opts);

nlohmann::json to_json(const Metrics& m);

/// splitmix64-style seed derivation shared by the harness.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace ialab
