#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ialab/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitOutput = 3;

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void dump(const std::string& path, const nlohmann::json& doc) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ialab::OutputError("cannot open " + path + " for writing");
  f << doc.dump(2) << "\n";
  if (!f) throw ialab::OutputError("write failed for " + path);
}

int cmd_run(const std::string& path) {
  ialab::ExperimentConfig cfg;
  try {
    cfg = ialab::parse_experiment_config(slurp(path), path);
  } catch (const ialab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  const auto out = ialab::run_experiment(cfg, ialab::resolve_threads(cfg.threads));
  ialab::write_outputs(out, cfg.output_dir);
  std::cout << "wrote " << out.results.size() << " scheme results to " << cfg.output_dir.string() << "\n";
  return 0;
}

struct CodecArgs {
  std::string mode, in, out;
  int b_phi = 7, b_psi = 9, n_g = 1, subcarriers = -1;
  double noise = 1.0, ref_power = 1.0;
};

int cmd_codec(const CodecArgs& a) {
  if (a.mode == "encode") {
    const ialab::ChannelSet set = ialab::channel_set_from_json(nlohmann::json::parse(slurp(a.in)));
    ialab::FeedbackConfig fb;
    fb.b_phi = a.b_phi;
    fb.b_psi = a.b_psi;
    fb.n_g = a.n_g;
    fb.snr_ref_power = a.ref_power;
    ialab::NetworkConfig net;
    net.k_users = set.k_users;
    net.m_antennas = set.m_antennas;
    net.noise_power = a.noise;
    net.subcarriers = set.subcarriers();
    nlohmann::json users = nlohmann::json::array();
    for (int k = 0; k < set.k_users; ++k) {
      const auto code = ialab::encode_csi(set, k, net, fb, a.noise);
      const auto bits = ialab::serialize(code);
      users.push_back({{"user", k},
                       {"bit_length", bits.bit_length},
                       {"payload", ialab::to_hex(bits.bytes)},
                       {"code", ialab::to_json(code)}});
    }
    dump(a.out, {{"subcarriers", set.subcarriers()},
                 {"noise_power", a.noise},
                 {"snr_ref_power", a.ref_power},
                 {"users", std::move(users)}});
    return 0;
  }
  const auto doc = nlohmann::json::parse(slurp(a.in));
  const int subs = a.subcarriers > 0 ? a.subcarriers : doc.at("subcarriers").get<int>();
  ialab::NetworkConfig net;
  net.noise_power = doc.value("noise_power", a.noise);
  ialab::FeedbackConfig fb;
  fb.snr_ref_power = doc.value("snr_ref_power", a.ref_power);
  nlohmann::json users = nlohmann::json::array();
  for (const auto& u : doc.at("users")) {
    ialab::Bitstream bits{ialab::from_hex(u.at("payload").get<std::string>()), u.at("bit_length").get<std::size_t>()};
    const auto code = ialab::deserialize(bits, subs);
    auto rec = ialab::to_json(ialab::decode_csi(code, net, fb));
    rec["user"] = u.value("user", static_cast<int>(users.size()));
    users.push_back(std::move(rec));
  }
  dump(a.out, {{"users", std::move(users)}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interference alignment simulation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("config", config_path, "Experiment config")->required();

  CodecArgs codec;
  auto* cod = app.add_subcommand("codec", "Encode channels to feedback bitstreams or decode them back");
  cod->add_option("mode", codec.mode, "encode or decode")->required()->check(CLI::IsMember({"encode", "decode"}));
  cod->add_option("input", codec.in, "Input JSON")->required();
  cod->add_option("output", codec.out, "Output JSON")->required();
  cod->add_option("--bphi", codec.b_phi, "Phase angle bits");
  cod->add_option("--bpsi", codec.b_psi, "Rotation angle bits");
  cod->add_option("--ng", codec.n_g, "Subcarrier grouping");
  cod->add_option("--noise", codec.noise, "Noise power");
  cod->add_option("--ref-power", codec.ref_power, "Reference power for SNR reports");
  cod->add_option("--subcarriers", codec.subcarriers, "Subcarrier count (decode)");

  int dof_k = 0, dof_t = 0;
  auto* dof = app.add_subcommand("dof", "Print sum-DoF limit and optimal user count");
  dof->add_option("--k", dof_k, "Users")->required();
  dof->add_option("--t", dof_t, "Coherence time")->required();

  int bk = 0, bm = 0, bphi = 0, bpsi = 0;
  auto* bits = app.add_subcommand("bits", "Print feedback bits per subcarrier");
  bits->add_option("--k", bk, "Users")->required();
  bits->add_option("--m", bm, "Antennas")->required();
  bits->add_option("--bphi", bphi, "Phase angle bits")->required();
  bits->add_option("--bpsi", bpsi, "Rotation angle bits")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*cod) return cmd_codec(codec);
    if (*dof) {
      const auto d = ialab::dof_limits(dof_k, dof_t);
      std::printf("d_sum=%.10g k_opt=%d\n", d.d_sum, d.k_opt);
      return 0;
    }
    if (*bits) {
      ialab::FeedbackConfig fb;
      fb.b_phi = bphi;
      fb.b_psi = bpsi;
      const auto n = ialab::feedback_bit_count(bk, bm, fb);
      std::printf("n_b=%d reduced=%d\n", n.n_b, n.n_b_reduced);
      return 0;
    }
  } catch (const ialab::OutputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOutput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}
