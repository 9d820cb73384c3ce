#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ialab/bitstream.hpp"
#include "ialab/channel.hpp"
#include "ialab/numerics.hpp"

namespace ialab {

/// Compressed CSI feedback: each destination k reports the right singular
/// vectors F and singular values of its concatenated channel
/// H^[k] = [H_k1, ..., H_kK] (M x KM), so that sources can rebuild the
/// effective channel Lambda F^*. F is compressed into phase (phi) and real
/// Givens (psi) angles; singular values are sent as a per-stream SNR profile.
struct FeedbackConfig {
  int b_phi = 7;
  int b_psi = 9;
  int n_g = 1;
  double snr_ref_power = 1.0;  // probing power used to turn lambda^2 into SNR

  void validate() const;
};

// SNR profile quantizers.
inline constexpr int kSnrAvgBits = 8;
inline constexpr double kSnrAvgMinDb = 10.0;
inline constexpr double kSnrAvgMaxDb = 53.75;
inline constexpr int kSnrDeltaBits = 4;
inline constexpr int kSnrDeltaMinDb = -8;
inline constexpr int kSnrDeltaMaxDb = 7;
inline constexpr double kOffsetStepDb = 0.25;

// Header field widths of the serialized form.
inline constexpr int kHeaderKBits = 4;
inline constexpr int kHeaderMBits = 3;
inline constexpr int kHeaderNgBits = 6;
inline constexpr int kHeaderBPhiBits = 4;
inline constexpr int kHeaderBPsiBits = 4;
inline constexpr int kHeaderOffsetBits = 8;
inline constexpr int kHeaderBits =
    kHeaderKBits + kHeaderMBits + kHeaderNgBits + kHeaderBPhiBits + kHeaderBPsiBits + kHeaderOffsetBits;

/// Angle sequence in extraction order. For column i (0-based) of F the phases
/// of rows i..Nr-2 are followed by the Givens angles zeroing rows i+1..Nr-1,
/// for i < min(Nc, Nr - 1). phi and psi are stored separately.
struct GivensAngles {
  std::vector<double> phi;
  std::vector<double> psi;
};

struct SubcarrierReport {
  GivensAngles angles;
  RealVector lambda;  // descending, M entries
};

/// Unquantized feedback ("infinite resolution" path).
struct FloatCsi {
  int k_users = 0;
  int m_antennas = 0;
  int subcarrier_count = 0;
  int n_g = 1;
  bool phase_reduced = true;
  std::vector<int> reported;
  std::vector<SubcarrierReport> reports;
};

struct SnrCodes {
  std::vector<std::uint32_t> avg;                 // per stream
  std::vector<std::vector<std::uint32_t>> delta;  // [reported][stream]
  double offset_db = 0.0;
};

struct CompressedCsi {
  int k_users = 0;
  int m_antennas = 0;
  int subcarrier_count = 0;
  int n_g = 1;
  int b_phi = 7;
  int b_psi = 9;
  std::vector<int> reported;
  std::vector<std::vector<std::uint32_t>> phi;  // [reported], transmitted phases only
  std::vector<std::vector<std::uint32_t>> psi;  // [reported]
  std::vector<std::uint32_t> snr_avg;           // per stream
  std::vector<std::vector<std::uint32_t>> snr_delta;  // [reported][stream]
  double snr_offset_db = 0.0;

  friend bool operator==(const CompressedCsi&, const CompressedCsi&) = default;
};

/// Reconstructed effective channels Lambda F^* (M x KM) at reported subcarriers.
struct ReconstructedCsi {
  int k_users = 0;
  int m_antennas = 0;
  int subcarrier_count = 0;
  std::vector<int> reported;
  std::vector<ComplexMatrix> effective;
  std::vector<std::vector<double>> snr_db;  // [reported][stream]

  /// Index into `reported` of the reported subcarrier closest to s (lower on ties).
  std::size_t nearest(int s) const;
  /// Block H_kl of the effective channel at reported position r.
  ComplexMatrix block(std::size_t r, int l) const;
  /// Per-stream SNR at every subcarrier, linear in dB between reported ones.
  std::vector<std::vector<double>> interpolated_snr_db() const;
};

struct BitCount {
  int n_b;
  int n_b_reduced;
};

struct Bitstream {
  std::vector<std::uint8_t> bytes;
  std::size_t bit_length = 0;
};

ComplexMatrix concat_channels(const InterferenceChannel& ch, int k);
std::vector<ComplexMatrix> split_blocks(const ComplexMatrix& concatenated, int k_users);

/// Reported subcarriers {0, n_g, 2 n_g, ...} plus the last one.
std::vector<int> apply_granularity(int subcarrier_count, int n_g);

BitCount feedback_bit_count(int k_users, int m_antennas, const FeedbackConfig& fb);

/// Number of (phi, psi) pairs describing a rows x cols matrix.
int angle_pair_count(int rows, int cols);

/// Angles of a matrix with orthonormal columns whose last row is real and
/// nonnegative. compose_unitary is the exact inverse.
GivensAngles decompose_unitary(const ComplexMatrix& f);
ComplexMatrix compose_unitary(const GivensAngles& angles, int rows, int cols);

/// Canonical F of a concatenated channel: SVD, last row made real and
/// nonnegative, and (when reduce_phases) the first entry of every source
/// block but the last made real and nonnegative.
struct CanonicalSvd {
  RealVector lambda;
  ComplexMatrix f;
};
CanonicalSvd canonical_svd(const ComplexMatrix& concatenated, int k_users, bool reduce_phases);

// Uniform quantizers with reconstruction points k * step.
std::uint32_t quantize_phi(double angle, int bits);
double dequantize_phi(std::uint32_t code, int bits);
std::uint32_t quantize_psi(double angle, int bits);
double dequantize_psi(std::uint32_t code, int bits);

/// Average-plus-delta SNR quantization with global overflow offset.
SnrCodes quantize_snr_profile(const std::vector<std::vector<double>>& snr_db);
std::vector<std::vector<double>> dequantize_snr_profile(const SnrCodes& codes);

FloatCsi encode_csi_float(const ChannelSet& channels, int k, const FeedbackConfig& fb,
                          bool reduce_phases = true);
ReconstructedCsi decode_csi_float(const FloatCsi& csi);

CompressedCsi encode_csi(const ChannelSet& channels, int k, const NetworkConfig& cfg,
                         const FeedbackConfig& fb, double noise_power);
/// Throws DecodeError when a code exceeds its bit width or shapes disagree.
ReconstructedCsi decode_csi(const CompressedCsi& code, const NetworkConfig& cfg, const FeedbackConfig& fb);

/// Payload bits excluding the header:
/// n_b_reduced |reported| + 8 M + 4 M |reported|.
std::size_t payload_bits(const CompressedCsi& code);

Bitstream serialize(const CompressedCsi& code);
/// subcarrier_count is not part of the header and must come from the caller.
CompressedCsi deserialize(const Bitstream& stream, int subcarrier_count);

nlohmann::json to_json(const CompressedCsi& code);
CompressedCsi compressed_csi_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ReconstructedCsi& csi);

}  // namespace ialab
