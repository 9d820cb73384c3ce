#include "ialab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ialab {

namespace {

constexpr double kDbFloor = -300.0;

double to_db(double linear) { return linear > 0.0 ? 10.0 * std::log10(linear) : kDbFloor; }

NetworkConfig with_streams(NetworkConfig cfg, int streams) {
  cfg.streams = streams;
  return cfg;
}

// Per-user, per-subcarrier stream SINRs collected while sweeping the band.
struct BandSamples {
  explicit BandSamples(int k_users) : sinr(static_cast<std::size_t>(k_users)), power(static_cast<std::size_t>(k_users)) {}
  std::vector<std::vector<std::vector<double>>> sinr;  // [user][subcarrier][stream]
  std::vector<std::vector<double>> power;              // [user][subcarrier]
};

SchemeResult summarize(Scheme scheme, const BandSamples& band, const SchemeKnobs& knobs, double rate_scale) {
  SchemeResult out;
  out.scheme = scheme;
  for (std::size_t k = 0; k < band.sinr.size(); ++k) {
    UserOutcome u;
    double ber_sum = 0.0;
    for (const auto& streams : band.sinr[k]) {
      u.rate += rate_scale * probe_throughput(streams, knobs.mcs, knobs.rate_margin);
      for (double s : streams) {
        u.sinr_samples_db.push_back(to_db(s));
        ber_sum += ber_for_sinr(s, knobs.ber_modulation_order);
      }
    }
    const double subcarriers = static_cast<double>(band.sinr[k].size());
    u.rate /= subcarriers;
    u.ber = ber_sum / static_cast<double>(u.sinr_samples_db.size());
    u.sinr_db = std::accumulate(u.sinr_samples_db.begin(), u.sinr_samples_db.end(), 0.0) /
                static_cast<double>(u.sinr_samples_db.size());
    u.tx_power = std::accumulate(band.power[k].begin(), band.power[k].end(), 0.0) / subcarriers;
    out.sum_throughput += u.rate;
    out.users.push_back(std::move(u));
  }
  return out;
}

std::vector<double> mmse_user_sinrs(const TransceiverState& state, const InterferenceChannel& ch, int k,
                                    const NetworkConfig& cfg) {
  std::vector<double> out;
  for (int d = 0; d < cfg.streams; ++d) out.push_back(mmse_stream_sinr(state, ch, k, d, cfg));
  return out;
}

ComplexMatrix own_svd_precoder(const InterferenceChannel& ch, int k) { return svd(ch.forward(k, k)).f; }

SchemeResult run_pc(const ChannelSet& channels, const NetworkConfig& cfg, const SchemeKnobs& knobs,
                    std::uint64_t seed) {
  const NetworkConfig single = with_streams(cfg, 1);
  BandSamples band(cfg.k_users);
  bool feasible = true;
  nlohmann::json trace;
  for (int s = 0; s < channels.subcarriers(); ++s) {
    const auto& ch = channels.at(s);
    const PowerControlResult r = run_joint_ia_pc(ch, single, knobs.pc, derive_seed(seed, static_cast<std::uint64_t>(s)));
    feasible = feasible && !r.saturated;
    if (s == 0) trace = {{"converged", r.converged}, {"saturated", r.saturated}, {"rows", trace_to_json(r)}};
    for (int k = 0; k < cfg.k_users; ++k) {
      band.sinr[k].push_back({compute_sinr(r.state, ch, k, single)});
      band.power[k].push_back(r.state.p[k]);
    }
  }
  SchemeResult out = summarize(Scheme::pc, band, knobs, 1.0);
  out.feasible = feasible;
  out.trace = std::move(trace);
  return out;
}

SchemeResult run_nopc(const ChannelSet& channels, const NetworkConfig& cfg, const SchemeKnobs& knobs,
                      std::uint64_t seed) {
  const double p = knobs.transmit_power(cfg);
  const std::vector<double> powers(static_cast<std::size_t>(cfg.k_users), p);
  BandSamples band(cfg.k_users);
  nlohmann::json trace;
  for (int s = 0; s < channels.subcarriers(); ++s) {
    const auto& ch = channels.at(s);
    AlignmentOptions opts = knobs.alignment;
    opts.seed = derive_seed(seed, static_cast<std::uint64_t>(s));
    const AlignmentResult r = run_iterative_alignment(ch, cfg, opts, &powers);
    if (s == 0) trace = to_json(r.report);
    for (int k = 0; k < cfg.k_users; ++k) {
      band.sinr[k].push_back(mmse_user_sinrs(r.state, ch, k, cfg));
      band.power[k].push_back(p);
    }
  }
  SchemeResult out = summarize(Scheme::nopc, band, knobs, 1.0);
  out.trace = std::move(trace);
  return out;
}

SchemeResult run_ia_feedback(const ChannelSet& channels, const NetworkConfig& cfg, const SchemeKnobs& knobs,
                             std::uint64_t seed) {
  const double p = knobs.transmit_power(cfg);
  const std::vector<double> powers(static_cast<std::size_t>(cfg.k_users), p);

  ChannelSet known = channels;
  if (knobs.estimate_channels) {
    known = estimate_channels(channels, knobs.training, cfg, derive_seed(seed, 0xE57ULL)).estimates;
  }

  std::size_t bits = 0;
  std::vector<ReconstructedCsi> csi;
  for (int k = 0; k < cfg.k_users; ++k) {
    if (knobs.quantized_feedback) {
      const CompressedCsi code = encode_csi(known, k, cfg, knobs.feedback, cfg.noise_power);
      bits += kHeaderBits + payload_bits(code);
      csi.push_back(decode_csi(code, cfg, knobs.feedback));
    } else {
      csi.push_back(decode_csi_float(encode_csi_float(known, k, knobs.feedback)));
    }
  }

  // beamformers designed by the sources on the fed-back channels
  const std::vector<int>& reported = csi.front().reported;
  std::vector<std::vector<ComplexMatrix>> designed;
  nlohmann::json trace;
  for (std::size_t r = 0; r < reported.size(); ++r) {
    InterferenceChannel rebuilt(cfg.k_users, cfg.m_antennas);
    for (int k = 0; k < cfg.k_users; ++k) {
      for (int l = 0; l < cfg.k_users; ++l) rebuilt.forward(k, l) = csi[k].block(r, l);
    }
    AlignmentOptions opts = knobs.alignment;
    opts.seed = derive_seed(seed, static_cast<std::uint64_t>(reported[r]));
    const AlignmentResult a = run_iterative_alignment(rebuilt, cfg, opts, &powers);
    if (r == 0) trace = to_json(a.report);
    designed.push_back(a.state.v);
  }

  BandSamples band(cfg.k_users);
  for (int s = 0; s < channels.subcarriers(); ++s) {
    const auto& ch = channels.at(s);
    TransceiverState state{designed[csi.front().nearest(s)], {}, powers};
    for (int k = 0; k < cfg.k_users; ++k) {
      band.sinr[k].push_back(mmse_user_sinrs(state, ch, k, cfg));
      band.power[k].push_back(p);
    }
  }
  SchemeResult out = summarize(Scheme::ia_feedback, band, knobs, 1.0);
  out.n_g = knobs.feedback.n_g;
  out.feedback_bits = bits;
  out.trace = std::move(trace);
  return out;
}

SchemeResult run_single_user_baseline(Scheme scheme, const ChannelSet& channels, const NetworkConfig& cfg,
                                      const SchemeKnobs& knobs) {
  const double p = knobs.transmit_power(cfg);
  const int k_users = cfg.k_users;
  const int m = cfg.m_antennas;
  const bool simo = scheme == Scheme::fullreuse_simo;
  const NetworkConfig scfg = with_streams(cfg, simo ? 1 : m);
  BandSamples band(k_users);

  for (int s = 0; s < channels.subcarriers(); ++s) {
    const auto& ch = channels.at(s);
    TransceiverState state;
    for (int k = 0; k < k_users; ++k) {
      if (simo) {
        ComplexMatrix e = ComplexMatrix::Zero(m, 1);
        e(0, 0) = 1.0;
        state.v.push_back(e);
      } else {
        state.v.push_back(own_svd_precoder(ch, k));
      }
    }
    if (scheme == Scheme::tdma_mimo) {
      // one source at a time; the others are silent during its slot
      for (int k = 0; k < k_users; ++k) {
        state.p.assign(static_cast<std::size_t>(k_users), 0.0);
        state.p[k] = p;
        band.sinr[k].push_back(mmse_user_sinrs(state, ch, k, scfg));
        band.power[k].push_back(p / k_users);  // time-averaged
      }
    } else {
      state.p.assign(static_cast<std::size_t>(k_users), p);
      for (int k = 0; k < k_users; ++k) {
        band.sinr[k].push_back(mmse_user_sinrs(state, ch, k, scfg));
        band.power[k].push_back(p);
      }
    }
  }
  const double scale = scheme == Scheme::tdma_mimo ? 1.0 / k_users : 1.0;
  return summarize(scheme, band, knobs, scale);
}

}  // namespace

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::pc: return "pc";
    case Scheme::nopc: return "nopc";
    case Scheme::ia_feedback: return "ia_feedback";
    case Scheme::tdma_mimo: return "tdma_mimo";
    case Scheme::fullreuse_mimo: return "fullreuse_mimo";
    case Scheme::fullreuse_simo: return "fullreuse_simo";
  }
  return "unknown";
}

Scheme scheme_from_name(std::string_view name) {
  for (Scheme s : {Scheme::pc, Scheme::nopc, Scheme::ia_feedback, Scheme::tdma_mimo, Scheme::fullreuse_mimo,
                   Scheme::fullreuse_simo}) {
    if (scheme_name(s) == name) return s;
  }
  throw ContractViolation("unknown scheme '" + std::string(name) + "'");
}

int FrameLayout::total_symbols() const {
  return static_cast<int>(dm_rs_symbols.size() + csi_rs_symbols.size() + payload_symbols.size()) +
         (p_rs_symbol ? 1 : 0);
}

FrameLayout build_frame(const NetworkConfig& cfg, const std::vector<std::vector<double>>& powers,
                        bool with_power_rs) {
  double peak = 0.0;
  for (const auto& user : powers) {
    for (double p : user) {
      if (!(p >= 0.0) || p > cfg.p_max * (1.0 + 1e-12)) {
        throw ContractViolation("build_frame: powers must lie in [0, p_max]");
      }
      peak = std::max(peak, p);
    }
  }
  if (!(peak > 0.0)) throw ContractViolation("build_frame: at least one positive power required");

  FrameLayout f;
  int next = 0;
  for (int i = 0; i < cfg.k_users * cfg.streams; ++i) f.dm_rs_symbols.push_back(next++);
  for (int i = 0; i < cfg.k_users * cfg.m_antennas; ++i) f.csi_rs_symbols.push_back(next++);
  if (with_power_rs) f.p_rs_symbol = next++;
  for (int i = 0; i < kPayloadSymbols; ++i) f.payload_symbols.push_back(next++);

  const double alpha = std::sqrt(cfg.p_max / peak);
  f.alpha_db = std::floor(20.0 * std::log10(alpha) / kAlphaLatticeDb + 1e-9) * kAlphaLatticeDb;
  f.alpha_scale = std::pow(10.0, f.alpha_db / 20.0);
  return f;
}

McsTable McsTable::standard() {
  std::vector<McsEntry> all;
  for (int order : {4, 16, 64, 256}) {
    for (double rate : {0.5, 0.625, 0.75}) all.push_back({order, rate, std::log2(order) * rate});
  }
  std::stable_sort(all.begin(), all.end(), [](const McsEntry& a, const McsEntry& b) {
    return a.spectral_efficiency < b.spectral_efficiency;
  });
  McsTable t;
  for (const auto& e : all) {
    if (!t.entries.empty() && e.spectral_efficiency <= t.entries.back().spectral_efficiency) continue;
    t.entries.push_back(e);
    if (t.entries.size() == 10) break;
  }
  return t;
}

double ber_for_sinr(double sinr_linear, int modulation_order) {
  if (modulation_order != 4 && modulation_order != 16 && modulation_order != 64 && modulation_order != 256) {
    throw ContractViolation("ber_for_sinr: modulation order must be 4, 16, 64 or 256");
  }
  if (sinr_linear < 0.0) throw ContractViolation("ber_for_sinr: sinr must be >= 0");
  // exact Gray-coded square QAM bit error probability (per-bit-position sum)
  const int side = static_cast<int>(std::lround(std::sqrt(modulation_order)));
  const int levels = static_cast<int>(std::lround(std::log2(side)));
  const double arg = std::sqrt(3.0 * sinr_linear / (2.0 * (modulation_order - 1)));
  double total = 0.0;
  for (int k = 1; k <= levels; ++k) {
    const int pk = 1 << (k - 1);
    const int terms = (side - (side >> k));
    double acc = 0.0;
    for (int i = 0; i < terms; ++i) {
      const int w = (i * pk) / side;
      const double weight = (w % 2 == 0 ? 1.0 : -1.0) * (pk - std::floor(static_cast<double>(i * pk) / side + 0.5));
      acc += weight * std::erfc((2 * i + 1) * arg);
    }
    total += acc / side;
  }
  return std::clamp(total / levels, 0.0, 0.5);
}

double probe_throughput(const std::vector<double>& per_stream_sinr, const McsTable& mcs, double margin) {
  double rate = 0.0;
  for (double sinr : per_stream_sinr) {
    const double capacity = std::log2(1.0 + std::max(0.0, sinr)) * margin;
    double best = 0.0;
    for (const auto& e : mcs.entries) {
      if (e.spectral_efficiency <= capacity) best = std::max(best, e.spectral_efficiency);
    }
    rate += best;
  }
  return rate;
}

double SchemeResult::total_power() const {
  double sum = 0.0;
  for (const auto& u : users) sum += u.tx_power;
  return sum;
}

double mmse_stream_sinr(const TransceiverState& state, const InterferenceChannel& ch, int k, int stream,
                        const NetworkConfig& cfg) {
  const ComplexMatrix q = stream_interference_plus_noise(state, ch, k, stream, cfg);
  const ComplexVector h = ch.forward(k, k) * state.v[k].col(stream);
  const Eigen::LLT<ComplexMatrix> llt(q);
  const Complex quad = h.dot(llt.solve(h));
  return std::max(0.0, stream_power(state.p[k], cfg) * quad.real());
}

void apply_cross_gain(ChannelSet& set, double gain) {
  const double amp = std::sqrt(gain);
  for (auto& ch : set.per_subcarrier) {
    for (int k = 0; k < set.k_users; ++k) {
      for (int l = 0; l < set.k_users; ++l) {
        if (k != l) ch.forward(k, l) *= amp;
      }
    }
  }
}

SchemeResult simulate_scheme(Scheme scheme, const ChannelSet& channels, const NetworkConfig& cfg,
                             const SchemeKnobs& knobs, std::uint64_t seed) {
  cfg.validate();
  if (channels.k_users != cfg.k_users || channels.m_antennas != cfg.m_antennas) {
    throw ContractViolation("simulate_scheme: channel set does not match the network configuration");
  }
  switch (scheme) {
    case Scheme::pc: return run_pc(channels, cfg, knobs, seed);
    case Scheme::nopc: return run_nopc(channels, cfg, knobs, seed);
    case Scheme::ia_feedback: return run_ia_feedback(channels, cfg, knobs, seed);
    case Scheme::tdma_mimo:
    case Scheme::fullreuse_mimo:
    case Scheme::fullreuse_simo: return run_single_user_baseline(scheme, channels, cfg, knobs);
  }
  throw ContractViolation("simulate_scheme: unhandled scheme");
}

EmpiricalCdf EmpiricalCdf::from_samples(std::vector<double> samples) {
  EmpiricalCdf c;
  std::sort(samples.begin(), samples.end());
  c.x = std::move(samples);
  const double n = static_cast<double>(c.x.size());
  for (std::size_t i = 0; i < c.x.size(); ++i) c.p.push_back(static_cast<double>(i + 1) / n);
  return c;
}

double EmpiricalCdf::at(double value) const {
  const auto it = std::upper_bound(x.begin(), x.end(), value);
  return x.empty() ? 0.0 : static_cast<double>(it - x.begin()) / static_cast<double>(x.size());
}

std::string result_label(const SchemeResult& r) {
  std::string label(scheme_name(r.scheme));
  if (r.scheme == Scheme::ia_feedback) label += "/ng=" + std::to_string(r.n_g);
  return label;
}

Metrics compute_metrics(const std::vector<SchemeResult>& results, const MetricsOptions& opts) {
  Metrics m;
  std::map<std::string, std::vector<const SchemeResult*>> groups;
  for (const auto& r : results) groups[result_label(r)].push_back(&r);

  for (const auto& [label, rs] : groups) {
    SchemeMetrics sm;
    std::vector<double> samples;
    double ber = 0.0;
    int user_drops = 0;
    int failures = 0;
    for (const SchemeResult* r : rs) {
      sm.mean_sum_throughput += r->sum_throughput;
      sm.mean_feedback_bits += static_cast<double>(r->feedback_bits);
      for (const auto& u : r->users) {
        samples.insert(samples.end(), u.sinr_samples_db.begin(), u.sinr_samples_db.end());
        ber += u.ber;
        ++user_drops;
        const double worst = *std::min_element(u.sinr_samples_db.begin(), u.sinr_samples_db.end());
        if (worst < opts.fer_threshold_db) ++failures;
      }
    }
    sm.drops = static_cast<int>(rs.size());
    sm.mean_sum_throughput /= sm.drops;
    sm.mean_feedback_bits /= sm.drops;
    sm.mean_ber = user_drops ? ber / user_drops : 0.0;
    sm.fer = user_drops ? static_cast<double>(failures) / user_drops : 0.0;
    sm.sinr_db = EmpiricalCdf::from_samples(std::move(samples));
    m.per_scheme.emplace(label, std::move(sm));

    if (!rs.empty() && rs.front()->scheme == Scheme::ia_feedback) {
      m.throughput_vs_ng[rs.front()->n_g] = m.per_scheme.at(label).mean_sum_throughput;
    }
  }

  const auto pc = groups.find("pc");
  const auto nopc = groups.find("nopc");
  if (pc != groups.end() && nopc != groups.end()) {
    if (pc->second.size() != nopc->second.size()) {
      throw ContractViolation("compute_metrics: pc and nopc drop counts differ");
    }
    std::vector<double> gains;
    for (std::size_t i = 0; i < pc->second.size(); ++i) {
      gains.push_back(10.0 * std::log10(nopc->second[i]->total_power() / pc->second[i]->total_power()));
    }
    m.power_saving_gain_db = EmpiricalCdf::from_samples(std::move(gains));
  }
  return m;
}

nlohmann::json to_json(const Metrics& m) {
  nlohmann::json schemes = nlohmann::json::object();
  for (const auto& [label, sm] : m.per_scheme) {
    schemes[label] = {{"drops", sm.drops},
                      {"mean_sum_throughput", sm.mean_sum_throughput},
                      {"mean_ber", sm.mean_ber},
                      {"fer", sm.fer},
                      {"mean_feedback_bits", sm.mean_feedback_bits},
                      {"sinr_cdf", {{"x", sm.sinr_db.x}, {"p", sm.sinr_db.p}}}};
  }
  nlohmann::json ng = nlohmann::json::array();
  for (const auto& [n_g, thr] : m.throughput_vs_ng) ng.push_back({{"n_g", n_g}, {"sum_throughput", thr}});
  return {{"schemes", std::move(schemes)},
          {"power_saving_gain_db", {{"x", m.power_saving_gain_db.x}, {"p", m.power_saving_gain_db.p}}},
          {"throughput_vs_ng", std::move(ng)}};
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace ialab
