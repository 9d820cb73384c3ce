#include "ialab/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

namespace ialab {

namespace {

ComplexMatrix random_orthonormal(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  ComplexMatrix a(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      const double re = g(rng);
      const double im = g(rng);
      a(r, c) = Complex(re, im);
    }
  }
  return orthonormalize_columns(a);
}

// Forward receive update for every destination, at fixed beamformers.
void update_receivers(TransceiverState& state, const InterferenceChannel& ch,
                      const NetworkConfig& cfg, AlignmentVariant variant) {
  const int k_users = state.k_users();
  std::vector<ComplexMatrix> next(static_cast<std::size_t>(k_users));
  for (int k = 0; k < k_users; ++k) {
    if (variant == AlignmentVariant::leakage_min) {
      next[k] = leakage_filter_update(interference_covariance(state, ch, k, cfg), cfg.streams);
    } else {
      ComplexMatrix u(cfg.m_antennas, cfg.streams);
      for (int d = 0; d < cfg.streams; ++d) u.col(d) = max_sinr_filter_update(state, ch, k, d, cfg);
      next[k] = std::move(u);
    }
  }
  state.u = std::move(next);
}

}  // namespace

TransceiverState random_state(const NetworkConfig& cfg, std::uint64_t seed, double power) {
  std::mt19937_64 rng(seed);
  TransceiverState s;
  for (int k = 0; k < cfg.k_users; ++k) s.v.push_back(random_orthonormal(rng, cfg.m_antennas, cfg.streams));
  for (int k = 0; k < cfg.k_users; ++k) s.u.push_back(random_orthonormal(rng, cfg.m_antennas, cfg.streams));
  s.p.assign(static_cast<std::size_t>(cfg.k_users), power);
  return s;
}

ComplexMatrix interference_covariance(const TransceiverState& state, const InterferenceChannel& ch,
                                      int k, const NetworkConfig& cfg) {
  ComplexMatrix q = ComplexMatrix::Zero(cfg.m_antennas, cfg.m_antennas);
  for (int j = 0; j < state.k_users(); ++j) {
    if (j == k) continue;
    const ComplexMatrix hv = ch.forward(k, j) * state.v[j];
    q += stream_power(state.p[j], cfg) * (hv * hv.adjoint());
  }
  return (q + q.adjoint()) * 0.5;
}

double leakage(const TransceiverState& state, const InterferenceChannel& ch, int k,
               const NetworkConfig& cfg) {
  const ComplexMatrix q = interference_covariance(state, ch, k, cfg);
  const Complex tr = (state.u[k].adjoint() * q * state.u[k]).trace();
  if (std::abs(tr.imag()) > 1e-10 * std::max(1.0, std::abs(tr.real()))) {
    throw ContractViolation("leakage: trace has a non-negligible imaginary part");
  }
  return std::max(0.0, tr.real());
}

double total_leakage(const TransceiverState& state, const InterferenceChannel& ch,
                     const NetworkConfig& cfg) {
  double sum = 0.0;
  for (int k = 0; k < state.k_users(); ++k) sum += leakage(state, ch, k, cfg);
  return sum;
}

ComplexMatrix leakage_filter_update(const ComplexMatrix& q, int d) {
  if (d < 1 || d > q.rows()) throw ContractViolation("leakage_filter_update: d out of range");
  return hermitian_eig(q).vectors.leftCols(d);
}

ComplexMatrix stream_interference_plus_noise(const TransceiverState& state,
                                             const InterferenceChannel& ch, int k, int stream,
                                             const NetworkConfig& cfg) {
  const int m = cfg.m_antennas;
  ComplexMatrix q = cfg.noise_power * ComplexMatrix::Identity(m, m);
  for (int j = 0; j < state.k_users(); ++j) {
    const ComplexMatrix hv = ch.forward(k, j) * state.v[j];
    q += stream_power(state.p[j], cfg) * (hv * hv.adjoint());
  }
  const ComplexVector own = ch.forward(k, k) * state.v[k].col(stream);
  q -= stream_power(state.p[k], cfg) * (own * own.adjoint());
  return (q + q.adjoint()) * 0.5;
}

ComplexVector max_sinr_filter_update(const TransceiverState& state, const InterferenceChannel& ch,
                                     int k, int stream, const NetworkConfig& cfg) {
  const int m = cfg.m_antennas;
  ComplexMatrix q = stream_interference_plus_noise(state, ch, k, stream, cfg);
  const ComplexVector target = ch.forward(k, k) * state.v[k].col(stream);

  ComplexVector x;
  Eigen::LLT<ComplexMatrix> llt(q);
  if (llt.info() == Eigen::Success) {
    x = llt.solve(target);
  }
  if (llt.info() != Eigen::Success || !x.allFinite() || x.norm() == 0.0) {
    const double ridge = 1e-12 * std::abs(q.trace().real()) / m;
    q += (ridge > 0.0 ? ridge : 1e-300) * ComplexMatrix::Identity(m, m);
    x = q.completeOrthogonalDecomposition().solve(target);
  }
  const double n = x.norm();
  if (n == 0.0 || !std::isfinite(n)) {
    // no signal reaches the receiver; any unit vector is equally good
    ComplexVector e = ComplexVector::Zero(m);
    e[0] = 1.0;
    return e;
  }
  return x / n;
}

double filter_change(const std::vector<ComplexMatrix>& prev, const std::vector<ComplexMatrix>& next) {
  double worst = 0.0;
  for (std::size_t k = 0; k < prev.size(); ++k) {
    ComplexMatrix aligned = next[k];
    for (Eigen::Index c = 0; c < aligned.cols(); ++c) {
      const Complex inner = aligned.col(c).dot(prev[k].col(c));
      if (std::abs(inner) > 0.0) aligned.col(c) *= inner / std::abs(inner);
    }
    worst = std::max(worst, (aligned - prev[k]).norm());
  }
  return worst;
}

AlignmentResult run_iterative_alignment(const InterferenceChannel& ch, const NetworkConfig& cfg,
                                        const AlignmentOptions& opts,
                                        const std::vector<double>* powers) {
  if (opts.max_iters < 1) throw ContractViolation("run_iterative_alignment: max_iters must be >= 1");
  if (!(opts.tol > 0.0)) throw ContractViolation("run_iterative_alignment: tol must be > 0");

  AlignmentResult out{random_state(cfg, opts.seed, cfg.p_max), {}};
  TransceiverState& state = out.state;
  if (powers != nullptr) {
    if (powers->size() != static_cast<std::size_t>(cfg.k_users)) {
      throw ContractViolation("run_iterative_alignment: one power per user required");
    }
    state.p = *powers;
  }
  const InterferenceChannel rev = ch.reversed();

  auto residual_of = [&](const TransceiverState& s) {
    double worst = 0.0;
    for (int k = 0; k < s.k_users(); ++k) worst = std::max(worst, leakage(s, ch, k, cfg) / s.p[k]);
    return worst;
  };

  for (int it = 0; it < opts.max_iters; ++it) {
    const std::vector<ComplexMatrix> prev_v = state.v;
    update_receivers(state, ch, cfg, opts.variant);

    // reverse link: filters act as beamformers over H^r_kl = H_lk^*
    TransceiverState back = state.reversed();
    update_receivers(back, rev, cfg, opts.variant);
    state.v = std::move(back.u);

    AlignmentReport& rep = out.report;
    rep.iterations = it + 1;
    rep.leakage_trace.push_back(total_leakage(state, ch, cfg));
    rep.residual = residual_of(state);
    if (opts.variant == AlignmentVariant::leakage_min) {
      rep.converged = rep.residual <= opts.tol;
    } else {
      rep.converged = filter_change(prev_v, state.v) <= opts.tol;
    }
    if (rep.converged) break;
  }
  return out;
}

AlignmentResidual alignment_residual(const TransceiverState& state, const InterferenceChannel& ch,
                                     const NetworkConfig& cfg, double rank_tol) {
  (void)cfg;
  AlignmentResidual out{0.0, true};
  for (int k = 0; k < state.k_users(); ++k) {
    for (int j = 0; j < state.k_users(); ++j) {
      const ComplexMatrix term = state.u[k].adjoint() * ch.forward(k, j) * state.v[j];
      if (j != k) {
        out.cross_leakage = std::max(out.cross_leakage, term.norm());
      } else {
        Eigen::JacobiSVD<ComplexMatrix> s(term);
        const auto& sv = s.singularValues();
        if (sv.size() == 0 || sv.minCoeff() <= rank_tol) out.desired_rank_ok = false;
      }
    }
  }
  return out;
}

nlohmann::json to_json(const AlignmentReport& report) {
  return {{"iterations", report.iterations},
          {"leakage_trace", report.leakage_trace},
          {"residual", report.residual},
          {"converged", report.converged}};
}

}  // namespace ialab
