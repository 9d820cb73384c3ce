#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ialab/channel.hpp"
#include "ialab/numerics.hpp"

namespace ialab {

/// Per-user beamformers v (M x d), receive filters u (M x d) and powers.
struct TransceiverState {
  std::vector<ComplexMatrix> v;
  std::vector<ComplexMatrix> u;
  std::vector<double> p;

  int k_users() const { return static_cast<int>(v.size()); }

  /// Roles swapped for the reverse link: filters become beamformers.
  TransceiverState reversed() const { return {u, v, p}; }
};

enum class AlignmentVariant { leakage_min, max_sinr };

struct AlignmentOptions {
  AlignmentVariant variant = AlignmentVariant::leakage_min;
  int max_iters = 500;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

struct AlignmentReport {
  int iterations = 0;
  std::vector<double> leakage_trace;  // sum_k IF_k after every iteration
  double residual = 0.0;              // max_k IF_k / P_k
  bool converged = false;
};

struct AlignmentResult {
  TransceiverState state;
  AlignmentReport report;
};

struct AlignmentResidual {
  double cross_leakage;  // max_{k, j != k} ||U_k^* H_kj V_j||_F
  bool desired_rank_ok;
};

/// Power carried by each stream of a user transmitting total power p.
inline double stream_power(double p, const NetworkConfig& cfg) { return p / cfg.streams; }

/// Random orthonormal v and u (seeded complex Gaussian, Gram-Schmidt); powers
/// set to `power` for every user.
TransceiverState random_state(const NetworkConfig& cfg, std::uint64_t seed, double power);

/// Interference covariance at destination k: sum over j != k of
/// (P_j / d) H_kj V_j V_j^* H_kj^*.
ComplexMatrix interference_covariance(const TransceiverState& state, const InterferenceChannel& ch,
                                      int k, const NetworkConfig& cfg);

/// IF_k = tr(U_k^* Q_k U_k).
double leakage(const TransceiverState& state, const InterferenceChannel& ch, int k,
               const NetworkConfig& cfg);

double total_leakage(const TransceiverState& state, const InterferenceChannel& ch,
                     const NetworkConfig& cfg);

/// Eigenvectors of the d smallest eigenvalues of q, as columns.
ComplexMatrix leakage_filter_update(const ComplexMatrix& q, int d);

/// Covariance seen by stream `stream` of user k: every stream of every user
/// (own ones included) minus the desired stream, plus N0 I_M.
ComplexMatrix stream_interference_plus_noise(const TransceiverState& state,
                                             const InterferenceChannel& ch, int k, int stream,
                                             const NetworkConfig& cfg);

/// Unit-norm MMSE receive vector for one stream. A near-singular covariance is
/// ridge-regularized with 1e-12 tr(Q)/M.
ComplexVector max_sinr_filter_update(const TransceiverState& state, const InterferenceChannel& ch,
                                     int k, int stream, const NetworkConfig& cfg);

/// Alternating forward/reverse filter optimization at equal, fixed powers
/// (p_max unless `powers` is given). Never throws on non-convergence.
AlignmentResult run_iterative_alignment(const InterferenceChannel& ch, const NetworkConfig& cfg,
                                        const AlignmentOptions& opts,
                                        const std::vector<double>* powers = nullptr);

AlignmentResidual alignment_residual(const TransceiverState& state, const InterferenceChannel& ch,
                                     const NetworkConfig& cfg, double rank_tol = 1e-9);

/// Largest Frobenius distance between matching users' matrices after each
/// column of `next` is phase-aligned to `prev`.
double filter_change(const std::vector<ComplexMatrix>& prev, const std::vector<ComplexMatrix>& next);

nlohmann::json to_json(const AlignmentReport& report);

}  // namespace ialab
