#include "ialab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

namespace ialab {

namespace {

class ConfigReader {
 public:
  ConfigReader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& problem) const {
    const std::string leaf = field.substr(field.find_last_of('.') + 1);
    throw ConfigError(source_ + ":" + std::to_string(line_of_key(leaf)) + ": " + field + ": " + problem, field);
  }

  void check(bool ok, const std::string& field, const std::string& problem) const {
    if (!ok) fail(field, problem);
  }

  template <typename T>
  T get(const nlohmann::json& obj, const std::string& key, const std::string& path, T fallback) const {
    if (!obj.contains(key)) return fallback;
    try {
      return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(path + key, "has the wrong type");
    }
  }

  const nlohmann::json& section(const nlohmann::json& root, const std::string& key) const {
    static const nlohmann::json empty = nlohmann::json::object();
    if (!root.contains(key)) return empty;
    if (!root.at(key).is_object()) fail(key, "must be an object");
    return root.at(key);
  }

  int line_of(std::size_t byte) const {
    byte = std::min(byte, text_.size());
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
  }

 private:
  int line_of_key(const std::string& key) const {
    const std::size_t pos = text_.find("\"" + key + "\"");
    return pos == std::string::npos ? 1 : line_of(pos);
  }

  const std::string& text_;
  std::string source_;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double to_dbm(double p) { return p > 0.0 ? 10.0 * std::log10(p) : -300.0; }

}  // namespace

SchemeKnobs ExperimentConfig::knobs() const {
  SchemeKnobs k;
  k.pc = power_control;
  k.fixed_power = fixed_power;
  k.feedback = feedback;
  k.quantized_feedback = quantized_feedback;
  k.estimate_channels = estimate_channels;
  k.training = training;
  k.alignment = alignment;
  return k;
}

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source) {
  ConfigReader rd(text, source);
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(source + ":" + std::to_string(rd.line_of(e.byte == 0 ? 0 : e.byte - 1)) + ": malformed JSON: " + e.what(), "");
  }
  if (!root.is_object()) throw ConfigError(source + ":1: top level must be an object", "");

  ExperimentConfig cfg;

  const auto& net = rd.section(root, "network");
  NetworkConfig& n = cfg.network;
  n.k_users = rd.get(net, "k_users", "network.", n.k_users);
  n.m_antennas = rd.get(net, "m_antennas", "network.", n.m_antennas);
  n.streams = rd.get(net, "streams", "network.", std::max(1, n.m_antennas / 2));
  n.noise_power = rd.get(net, "noise_power", "network.", n.noise_power);
  n.p_max = rd.get(net, "p_max", "network.", 1000.0);
  n.subcarriers = rd.get(net, "subcarriers", "network.", 38);
  cfg.cross_gain = rd.get(net, "cross_gain", "network.", 1.0);
  rd.check(n.k_users >= 1 && n.k_users <= 15, "network.k_users", "must lie in [1, 15]");
  rd.check(n.m_antennas >= 1 && n.m_antennas <= 7, "network.m_antennas", "must lie in [1, 7]");
  rd.check(n.streams >= 1 && n.streams <= n.m_antennas, "network.streams", "must lie in [1, m_antennas]");
  rd.check(n.noise_power > 0.0, "network.noise_power", "must be > 0");
  rd.check(n.p_max > 0.0, "network.p_max", "must be > 0");
  rd.check(n.subcarriers >= 1, "network.subcarriers", "must be >= 1");
  rd.check(cfg.cross_gain >= 0.0, "network.cross_gain", "must be >= 0");

  const auto& tr = rd.section(root, "training");
  TrainingConfig& t = cfg.training;
  t.coherence_time = rd.get(tr, "coherence_time", "training.", t.coherence_time);
  t.sharing_factor = rd.get(tr, "sharing_factor", "training.", t.sharing_factor);
  t.avg_power = rd.get(tr, "avg_power", "training.", n.p_max);
  rd.check(t.coherence_time >= 1, "training.coherence_time", "must be >= 1");
  rd.check(t.sharing_factor >= static_cast<double>(n.k_users) / t.coherence_time && t.sharing_factor < 1.0,
           "training.sharing_factor", "must lie in [K/T, 1)");
  rd.check(t.avg_power > 0.0, "training.avg_power", "must be > 0");

  const auto& pcj = rd.section(root, "power_control");
  PowerControlConfig& pc = cfg.power_control;
  pc.p_max = n.p_max;
  pc.p_forward_probe = rd.get(pcj, "p_forward_probe", "power_control.", 0.0);
  pc.max_iters = rd.get(pcj, "max_iters", "power_control.", pc.max_iters);
  pc.tol = rd.get(pcj, "tol", "power_control.", pc.tol);
  if (pcj.contains("target_rates")) {
    const auto rates = rd.get(pcj, "target_rates", "power_control.", std::vector<double>{});
    rd.check(rates.size() == static_cast<std::size_t>(n.k_users), "power_control.target_rates",
             "needs one rate per user");
    for (double r : rates) rd.check(r > 0.0, "power_control.target_rates", "rates must be > 0");
    pc.gamma = PowerControlConfig::gamma_from_rates(rates);
  } else {
    const double db = rd.get(pcj, "target_sinr_db", "power_control.", 18.0);
    pc.gamma.assign(static_cast<std::size_t>(n.k_users), std::pow(10.0, db / 10.0));
  }
  rd.check(pc.max_iters >= 1, "power_control.max_iters", "must be >= 1");
  rd.check(pc.tol > 0.0, "power_control.tol", "must be > 0");

  const auto& fbj = rd.section(root, "feedback");
  FeedbackConfig& fb = cfg.feedback;
  fb.b_phi = rd.get(fbj, "b_phi", "feedback.", fb.b_phi);
  fb.b_psi = rd.get(fbj, "b_psi", "feedback.", fb.b_psi);
  fb.snr_ref_power = rd.get(fbj, "snr_ref_power", "feedback.", n.p_max);
  if (fbj.contains("n_g") && fbj.at("n_g").is_array()) {
    cfg.n_g_sweep = rd.get(fbj, "n_g", "feedback.", std::vector<int>{});
  } else {
    cfg.n_g_sweep = {rd.get(fbj, "n_g", "feedback.", 1)};
  }
  rd.check(!cfg.n_g_sweep.empty(), "feedback.n_g", "must not be empty");
  for (int g : cfg.n_g_sweep) rd.check(g >= 1 && g <= 63, "feedback.n_g", "values must lie in [1, 63]");
  fb.n_g = cfg.n_g_sweep.front();
  cfg.quantized_feedback = rd.get(fbj, "quantized", "feedback.", true);
  cfg.estimate_channels = rd.get(fbj, "estimate_channels", "feedback.", false);
  rd.check(fb.b_phi >= 1 && fb.b_phi <= 15, "feedback.b_phi", "must lie in [1, 15]");
  rd.check(fb.b_psi >= 1 && fb.b_psi <= 15, "feedback.b_psi", "must lie in [1, 15]");
  rd.check(fb.snr_ref_power > 0.0, "feedback.snr_ref_power", "must be > 0");

  const auto& al = rd.section(root, "alignment");
  const std::string variant = rd.get(al, "variant", "alignment.", std::string("max_sinr"));
  rd.check(variant == "max_sinr" || variant == "leakage_min", "alignment.variant", "must be max_sinr or leakage_min");
  cfg.alignment.variant = variant == "max_sinr" ? AlignmentVariant::max_sinr : AlignmentVariant::leakage_min;
  cfg.alignment.max_iters = rd.get(al, "max_iters", "alignment.", cfg.alignment.max_iters);
  cfg.alignment.tol = rd.get(al, "tol", "alignment.", cfg.alignment.tol);
  rd.check(cfg.alignment.max_iters >= 1, "alignment.max_iters", "must be >= 1");
  rd.check(cfg.alignment.tol > 0.0, "alignment.tol", "must be > 0");

  cfg.fixed_power = rd.get(root, "fixed_power", "", 0.0);
  rd.check(cfg.fixed_power >= 0.0 && cfg.fixed_power <= n.p_max, "fixed_power", "must lie in [0, p_max]");

  const auto names = rd.get(root, "schemes", "", std::vector<std::string>{});
  rd.check(!names.empty(), "schemes", "must list at least one scheme");
  for (const auto& s : names) {
    try {
      cfg.schemes.push_back(scheme_from_name(s));
    } catch (const ContractViolation&) {
      rd.fail("schemes", "unknown scheme '" + s + "'");
    }
  }
  cfg.drops = rd.get(root, "drops", "", 1);
  rd.check(cfg.drops >= 1, "drops", "must be >= 1");
  cfg.seed = rd.get(root, "seed", "", std::uint64_t{0});
  cfg.output_dir = rd.get(root, "output_dir", "", std::string("results"));
  cfg.threads = rd.get(root, "threads", "", -1);
  return cfg;
}

int resolve_threads(int requested) {
  int n = requested;
  if (n < 0) {
    n = 0;
    if (const char* env = std::getenv("IA_LAB_THREADS")) n = std::max(0, std::atoi(env));
  }
  if (n == 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return n;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, int threads) {
  const SchemeKnobs base = cfg.knobs();

  // one slot per drop; workers fill them in any order, output is drop-ordered
  std::vector<std::vector<SchemeResult>> per_drop(static_cast<std::size_t>(cfg.drops));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (int d = next++; d < cfg.drops; d = next++) {
      try {
        const std::uint64_t drop_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(d));
        ChannelSet channels = sample_channels(cfg.network, derive_seed(drop_seed, 1));
        if (cfg.cross_gain != 1.0) apply_cross_gain(channels, cfg.cross_gain);
        const std::uint64_t algo_seed = derive_seed(drop_seed, 2);
        auto& out = per_drop[static_cast<std::size_t>(d)];
        for (Scheme s : cfg.schemes) {
          if (s == Scheme::ia_feedback) {
            for (int g : cfg.n_g_sweep) {
              SchemeKnobs k = base;
              k.feedback.n_g = g;
              out.push_back(simulate_scheme(s, channels, cfg.network, k, algo_seed));
              out.back().drop = d;
            }
          } else {
            out.push_back(simulate_scheme(s, channels, cfg.network, base, algo_seed));
            out.back().drop = d;
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const int n = std::min(std::max(1, threads), cfg.drops);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentOutput out;
  std::string csv = std::string(kResultsCsvHeader) + "\n";
  nlohmann::json traces = nlohmann::json::array();
  int feasible = 0;
  for (auto& drop : per_drop) {
    for (auto& r : drop) {
      const std::string label = result_label(r);
      for (std::size_t u = 0; u < r.users.size(); ++u) {
        const auto& o = r.users[u];
        csv += std::to_string(r.drop) + "," + label + "," + std::to_string(u) + "," + format_double(o.sinr_db) + "," +
               format_double(o.rate) + "," + format_double(o.ber) + "," + format_double(to_dbm(o.tx_power)) + "\n";
      }
      if (r.scheme == Scheme::pc && r.feasible) ++feasible;
      if (!r.trace.is_null()) traces.push_back({{"drop", r.drop}, {"scheme", label}, {"trace", r.trace}});
      out.results.push_back(std::move(r));
    }
  }
  out.results_csv = std::move(csv);
  out.traces = std::move(traces);

  MetricsOptions mo;
  if (!cfg.power_control.gamma.empty()) mo.fer_threshold_db = 10.0 * std::log10(cfg.power_control.gamma.front()) - 0.5;
  nlohmann::json schemes = nlohmann::json::array();
  for (Scheme s : cfg.schemes) schemes.push_back(std::string(scheme_name(s)));
  out.summary = {{"seed", cfg.seed},
                 {"drops", cfg.drops},
                 {"schemes", std::move(schemes)},
                 {"feasible_pc_drops", feasible},
                 {"metrics", to_json(compute_metrics(out.results, mo))}};
  return out;
}

void write_outputs(const ExperimentOutput& out, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create output directory " + dir.string() + ": " + ec.message());

  auto write = [&](const std::string& name, const std::string& body) {
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw OutputError("cannot open " + path.string() + " for writing");
    f << body;
    f.flush();
    if (!f) throw OutputError("write failed for " + path.string());
  };
  write("results.csv", out.results_csv);
  write("summary.json", out.summary.dump(2) + "\n");
  write("convergence_traces.json", out.traces.dump(2) + "\n");
}

}  // namespace ialab
