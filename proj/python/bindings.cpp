#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "ialab/experiment.hpp"

namespace py = pybind11;
using namespace ialab;

namespace {

using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

py::object from_json(const nlohmann::json& doc) { return py::module_::import("json").attr("loads")(doc.dump()); }

std::string to_json_text(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
  return py::module_::import("json").attr("dumps")(obj).cast<std::string>();
}

InterferenceChannel channel_from(const std::complex<double>* p, int k, int m) {
  InterferenceChannel ch(k, m);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      auto& h = ch.forward(a, b);
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) h(r, c) = *p++;
      }
    }
  }
  return ch;
}

// (S, K, K, M, M) or (K, K, M, M) complex array -> ChannelSet
ChannelSet channel_set_from(const CArray& arr) {
  const auto nd = arr.ndim();
  if (nd != 4 && nd != 5) throw py::value_error("channels must have shape (S, K, K, M, M) or (K, K, M, M)");
  const int off = nd == 5 ? 1 : 0;
  const int subs = nd == 5 ? static_cast<int>(arr.shape(0)) : 1;
  const int k = static_cast<int>(arr.shape(off));
  const int m = static_cast<int>(arr.shape(off + 2));
  if (arr.shape(off + 1) != k || arr.shape(off + 3) != m) throw py::value_error("channel blocks must be K x K of M x M");
  ChannelSet set;
  set.k_users = k;
  set.m_antennas = m;
  const std::complex<double>* p = arr.data();
  for (int s = 0; s < subs; ++s, p += static_cast<std::ptrdiff_t>(k) * k * m * m) {
    set.per_subcarrier.push_back(channel_from(p, k, m));
  }
  return set;
}

CArray channel_array(const ChannelSet& set) {
  const int k = set.k_users, m = set.m_antennas;
  CArray out({set.subcarriers(), k, k, m, m});
  auto* p = out.mutable_data();
  for (const auto& ch : set.per_subcarrier) {
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        for (int r = 0; r < m; ++r) {
          for (int c = 0; c < m; ++c) *p++ = ch.forward(a, b)(r, c);
        }
      }
    }
  }
  return out;
}

NetworkConfig net_for(const ChannelSet& set, int streams, double noise, double p_max) {
  NetworkConfig cfg;
  cfg.k_users = set.k_users;
  cfg.m_antennas = set.m_antennas;
  cfg.streams = streams;
  cfg.noise_power = noise;
  cfg.p_max = p_max;
  cfg.subcarriers = set.subcarriers();
  cfg.validate();
  return cfg;
}

py::bytes as_bytes(const std::vector<std::uint8_t>& b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Interference alignment simulation toolkit (C++ core)";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DecodeError>(m, "DecodeError", PyExc_ValueError);

  m.def(
      "feedback_bit_count",
      [](int k, int mm, int b_phi, int b_psi) {
        FeedbackConfig fb;
        fb.b_phi = b_phi;
        fb.b_psi = b_psi;
        const auto n = feedback_bit_count(k, mm, fb);
        return py::make_tuple(n.n_b, n.n_b_reduced);
      },
      py::arg("k"), py::arg("m"), py::arg("b_phi") = 7, py::arg("b_psi") = 9,
      "Feedback bits per subcarrier as (n_b, n_b_reduced).");

  m.def(
      "dof_limits",
      [](int k, int t) {
        const auto d = dof_limits(k, t);
        return py::make_tuple(d.d_sum, d.k_opt);
      },
      py::arg("k"), py::arg("t"), "(d_sum, k_opt) for K users and coherence time T.");

  m.def(
      "optimal_power_split",
      [](int k, int t, double alpha, double avg_power, double noise) {
        NetworkConfig cfg;
        cfg.k_users = k;
        cfg.noise_power = noise;
        const TrainingConfig train{t, alpha, avg_power};
        const auto s = optimal_power_split(train, cfg);
        py::dict d;
        d["beta"] = s.beta;
        d["p_data"] = s.p_data;
        d["p_pilot"] = s.p_pilot;
        d["approx_beta"] = approx_power_split(train, cfg);
        return d;
      },
      py::arg("k"), py::arg("coherence_time"), py::arg("sharing_factor"), py::arg("avg_power"),
      py::arg("noise_power") = 1.0);

  m.def(
      "sample_channels",
      [](int k, int mm, int subcarriers, std::uint64_t seed) {
        NetworkConfig cfg;
        cfg.k_users = k;
        cfg.m_antennas = mm;
        cfg.subcarriers = subcarriers;
        return channel_array(sample_channels(cfg, seed));
      },
      py::arg("k"), py::arg("m"), py::arg("subcarriers"), py::arg("seed"),
      "i.i.d. CN(0,1) channels, shape (S, K, K, M, M); [s, k, l] is source l -> destination k.");

  m.def(
      "run_alignment",
      [](const CArray& h, int streams, const std::string& variant, int max_iters, double tol, std::uint64_t seed,
         double noise, double power) {
        const ChannelSet set = channel_set_from(h);
        const auto cfg = net_for(set, streams, noise, power);
        AlignmentOptions opts;
        if (variant == "leakage_min") {
          opts.variant = AlignmentVariant::leakage_min;
        } else if (variant == "max_sinr") {
          opts.variant = AlignmentVariant::max_sinr;
        } else {
          throw py::value_error("variant must be 'leakage_min' or 'max_sinr'");
        }
        opts.max_iters = max_iters;
        opts.tol = tol;
        opts.seed = seed;
        const auto r = run_iterative_alignment(set.at(0), cfg, opts);
        const auto ia = alignment_residual(r.state, set.at(0), cfg);
        py::dict d;
        d["v"] = r.state.v;
        d["u"] = r.state.u;
        d["iterations"] = r.report.iterations;
        d["residual"] = r.report.residual;
        d["converged"] = r.report.converged;
        d["leakage_trace"] = r.report.leakage_trace;
        d["cross_leakage"] = ia.cross_leakage;
        d["desired_rank_ok"] = ia.desired_rank_ok;
        return d;
      },
      py::arg("channels"), py::arg("streams") = 1, py::arg("variant") = "leakage_min", py::arg("max_iters") = 500,
      py::arg("tol") = 1e-6, py::arg("seed") = 0, py::arg("noise_power") = 1.0, py::arg("power") = 1.0,
      "Iterative alignment on the first subcarrier of `channels`.");

  m.def(
      "run_power_control",
      [](const CArray& h, double target_sinr_db, double p_max, double noise, std::uint64_t seed) {
        const ChannelSet set = channel_set_from(h);
        const auto cfg = net_for(set, 1, noise, p_max);
        PowerControlConfig pc;
        pc.gamma.assign(static_cast<std::size_t>(cfg.k_users), std::pow(10.0, target_sinr_db / 10.0));
        pc.p_max = p_max;
        const auto r = run_joint_ia_pc(set.at(0), cfg, pc, seed);
        std::vector<double> sinr_db;
        for (int k = 0; k < cfg.k_users; ++k) {
          sinr_db.push_back(10.0 * std::log10(compute_sinr(r.state, set.at(0), k, cfg)));
        }
        py::dict d;
        d["powers"] = r.state.p;
        d["sinr_db"] = sinr_db;
        d["converged"] = r.converged;
        d["saturated"] = r.saturated;
        d["iterations"] = r.trace.size();
        return d;
      },
      py::arg("channels"), py::arg("target_sinr_db"), py::arg("p_max"), py::arg("noise_power") = 1.0,
      py::arg("seed") = 0, "Joint Max-SINR design and power control on the first subcarrier.");

  m.def(
      "encode_feedback",
      [](const CArray& h, int user, int b_phi, int b_psi, int n_g, double noise, double ref_power) {
        const ChannelSet set = channel_set_from(h);
        const auto cfg = net_for(set, 1, noise, 1.0);
        FeedbackConfig fb;
        fb.b_phi = b_phi;
        fb.b_psi = b_psi;
        fb.n_g = n_g;
        fb.snr_ref_power = ref_power;
        const auto code = encode_csi(set, user, cfg, fb, noise);
        const auto bits = serialize(code);
        py::dict d;
        d["payload"] = as_bytes(bits.bytes);
        d["bit_length"] = bits.bit_length;
        d["code"] = from_json(to_json(code));
        return d;
      },
      py::arg("channels"), py::arg("user"), py::arg("b_phi") = 7, py::arg("b_psi") = 9, py::arg("n_g") = 1,
      py::arg("noise_power") = 1.0, py::arg("snr_ref_power") = 1.0,
      "Quantized CSI report of destination `user`, serialized to bytes.");

  m.def(
      "decode_feedback",
      [](const py::bytes& payload, std::size_t bit_length, int subcarriers, double noise, double ref_power) {
        const std::string raw = payload;
        const Bitstream bits{std::vector<std::uint8_t>(raw.begin(), raw.end()), bit_length};
        const auto code = deserialize(bits, subcarriers);
        NetworkConfig cfg;
        cfg.noise_power = noise;
        FeedbackConfig fb;
        fb.snr_ref_power = ref_power;
        const auto rec = decode_csi(code, cfg, fb);
        py::dict d;
        d["reported"] = rec.reported;
        d["snr_db"] = rec.snr_db;
        d["effective"] = rec.effective;
        return d;
      },
      py::arg("payload"), py::arg("bit_length"), py::arg("subcarriers"), py::arg("noise_power") = 1.0,
      py::arg("snr_ref_power") = 1.0, "Effective channels Lambda F^* at the reported subcarriers.");

  m.def(
      "run_experiment",
      [](const py::object& config, int threads) {
        const auto cfg = parse_experiment_config(to_json_text(config), "config");
        ExperimentOutput out;
        {
          py::gil_scoped_release nogil;
          out = run_experiment(cfg, resolve_threads(threads));
        }
        py::dict d;
        d["results_csv"] = out.results_csv;
        d["summary"] = from_json(out.summary);
        d["traces"] = from_json(out.traces);
        return d;
      },
      py::arg("config"), py::arg("threads") = 1,
      "Run an experiment from a JSON string or dict; nothing is written to disk.");
}
