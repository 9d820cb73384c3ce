#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ialab/sim.hpp"

namespace ialab {

/// Invalid experiment configuration. `what()` carries a
/// "<source>:<line>: <field>: <problem>" diagnostic.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string field) : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class OutputError : public std::runtime_error {
 public:
  explicit OutputError(const std::string& what) : std::runtime_error(what) {}
};

struct ExperimentConfig {
  NetworkConfig network;
  TrainingConfig training;
  PowerControlConfig power_control;
  FeedbackConfig feedback;
  std::vector<int> n_g_sweep{1};
  bool quantized_feedback = true;
  bool estimate_channels = false;
  AlignmentOptions alignment{AlignmentVariant::max_sinr, 100, 1e-6, 0};
  double cross_gain = 1.0;
  double fixed_power = 0.0;
  std::vector<Scheme> schemes;
  int drops = 1;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "results";
  int threads = -1;  // -1: IA_LAB_THREADS or auto; 0: auto

  SchemeKnobs knobs() const;
};

/// Parses and validates a JSON experiment description. `source` names the
/// document in diagnostics.
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source = "config");

struct ExperimentOutput {
  std::string results_csv;
  nlohmann::json summary;
  nlohmann::json traces;
  std::vector<SchemeResult> results;  // drop-major, scheme order as configured
};

inline constexpr const char* kResultsCsvHeader = "drop,scheme,user,sinr_db,rate,ber,power_dbm";

/// Worker count: explicit value if >= 0, else IA_LAB_THREADS, else hardware
/// concurrency. 0 always means auto.
int resolve_threads(int requested);

/// Runs every drop (possibly in parallel) and assembles ordered outputs.
ExperimentOutput run_experiment(const ExperimentConfig& cfg, int threads);

/// Writes results.csv, summary.json and convergence_traces.json.
/// Throws OutputError on any I/O failure.
void write_outputs(const ExperimentOutput& out, const std::filesystem::path& dir);

}  // namespace ialab
