#include "ialab/csifb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

namespace ialab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kSnrFloorDb = -100.0;

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double avg_step_db() { return (kSnrAvgMaxDb - kSnrAvgMinDb) / ((1 << kSnrAvgBits) - 1); }

// Positions inside column 0's phase list that the block phasors force to zero.
std::vector<bool> reduced_phi_mask(int k_users, int m_antennas) {
  const int rows = k_users * m_antennas;
  const int pairs = angle_pair_count(rows, m_antennas);
  std::vector<bool> skip(static_cast<std::size_t>(pairs), false);
  for (int l = 0; l + 1 < k_users; ++l) skip[static_cast<std::size_t>(l * m_antennas)] = true;
  return skip;
}

void check_fits(std::uint32_t code, int bits, const char* what) {
  if (bits < 32 && (code >> bits) != 0) {
    throw DecodeError(std::string("code exceeds its bit width: ") + what);
  }
}

}  // namespace

void FeedbackConfig::validate() const {
  if (b_phi < 1 || b_phi > 15) throw ContractViolation("feedback.b_phi must lie in [1, 15]");
  if (b_psi < 1 || b_psi > 15) throw ContractViolation("feedback.b_psi must lie in [1, 15]");
  if (n_g < 1 || n_g > 63) throw ContractViolation("feedback.n_g must lie in [1, 63]");
  if (!(snr_ref_power > 0.0)) throw ContractViolation("feedback.snr_ref_power must be > 0");
}

ComplexMatrix concat_channels(const InterferenceChannel& ch, int k) {
  const int m = ch.m_antennas();
  ComplexMatrix out(m, m * ch.k_users());
  for (int l = 0; l < ch.k_users(); ++l) out.middleCols(l * m, m) = ch.forward(k, l);
  return out;
}

std::vector<ComplexMatrix> split_blocks(const ComplexMatrix& concatenated, int k_users) {
  const Eigen::Index m = concatenated.cols() / k_users;
  std::vector<ComplexMatrix> out;
  for (int l = 0; l < k_users; ++l) out.emplace_back(concatenated.middleCols(l * m, m));
  return out;
}

std::vector<int> apply_granularity(int subcarrier_count, int n_g) {
  if (subcarrier_count < 1) throw ContractViolation("apply_granularity: subcarrier_count must be >= 1");
  if (n_g < 1) throw ContractViolation("apply_granularity: n_g must be >= 1");
  std::vector<int> out;
  for (int s = 0; s < subcarrier_count; s += n_g) out.push_back(s);
  if (out.back() != subcarrier_count - 1) out.push_back(subcarrier_count - 1);
  return out;
}

int angle_pair_count(int rows, int cols) {
  int n = 0;
  for (int i = 0; i < std::min(cols, rows - 1); ++i) n += rows - 1 - i;
  return n;
}

BitCount feedback_bit_count(int k_users, int m_antennas, const FeedbackConfig& fb) {
  if (k_users < 1 || m_antennas < 1) throw ContractViolation("feedback_bit_count: K and M must be >= 1");
  const int k = k_users;
  const int m = m_antennas;
  const int n_b = ((2 * k * m - 1) * m - m * m) * (fb.b_phi + fb.b_psi) / 2;
  return {n_b, n_b - (k - 1) * fb.b_phi};
}

GivensAngles decompose_unitary(const ComplexMatrix& f) {
  const auto rows = static_cast<int>(f.rows());
  const auto cols = static_cast<int>(f.cols());
  ComplexMatrix v = f;
  GivensAngles out;
  for (int i = 0; i < std::min(cols, rows - 1); ++i) {
    for (int r = i; r < rows - 1; ++r) {
      const double phi = wrap_angle(std::arg(v(r, i)));
      out.phi.push_back(phi);
      v.row(r) *= std::polar(1.0, -phi);
    }
    for (int l = i + 1; l < rows; ++l) {
      const double psi = std::clamp(std::atan2(v(l, i).real(), v(i, i).real()), 0.0, kHalfPi);
      out.psi.push_back(psi);
      const double c = std::cos(psi);
      const double s = std::sin(psi);
      const ComplexVector ri = v.row(i).transpose();
      const ComplexVector rl = v.row(l).transpose();
      v.row(i) = (c * ri + s * rl).transpose();
      v.row(l) = (-s * ri + c * rl).transpose();
    }
  }
  return out;
}

ComplexMatrix compose_unitary(const GivensAngles& angles, int rows, int cols) {
  const int pairs = angle_pair_count(rows, cols);
  if (angles.phi.size() != static_cast<std::size_t>(pairs) ||
      angles.psi.size() != static_cast<std::size_t>(pairs)) {
    throw ContractViolation("compose_unitary: angle count does not match the matrix shape");
  }
  ComplexMatrix v = ComplexMatrix::Identity(rows, cols);
  int offset = pairs;
  for (int i = std::min(cols, rows - 1) - 1; i >= 0; --i) {
    const int n = rows - 1 - i;
    offset -= n;
    for (int l = rows - 1; l > i; --l) {
      const double psi = angles.psi[static_cast<std::size_t>(offset + (l - i - 1))];
      const double c = std::cos(psi);
      const double s = std::sin(psi);
      const ComplexVector ri = v.row(i).transpose();
      const ComplexVector rl = v.row(l).transpose();
      v.row(i) = (c * ri - s * rl).transpose();
      v.row(l) = (s * ri + c * rl).transpose();
    }
    for (int r = i; r < rows - 1; ++r) {
      v.row(r) *= std::polar(1.0, angles.phi[static_cast<std::size_t>(offset + (r - i))]);
    }
  }
  return v;
}

CanonicalSvd canonical_svd(const ComplexMatrix& concatenated, int k_users, bool reduce_phases) {
  const SvdResult s = svd(concatenated);
  CanonicalSvd out{s.lambda, s.f};
  if (reduce_phases) {
    const Eigen::Index m = concatenated.rows();
    for (int l = 0; l + 1 < k_users; ++l) {
      const Complex lead = out.f(l * m, 0);
      const double mag = std::abs(lead);
      if (mag == 0.0) continue;
      out.f.middleRows(l * m, m) *= std::conj(lead) / mag;
      out.f(l * m, 0) = Complex(mag, 0.0);
    }
  }
  return out;
}

std::uint32_t quantize_phi(double angle, int bits) {
  const std::uint32_t levels = 1u << bits;
  const double step = kTwoPi / levels;
  const auto code = static_cast<std::uint64_t>(std::llround(wrap_angle(angle) / step));
  return static_cast<std::uint32_t>(code % levels);
}

double dequantize_phi(std::uint32_t code, int bits) { return code * (kTwoPi / (1u << bits)); }

std::uint32_t quantize_psi(double angle, int bits) {
  const std::uint32_t top = (1u << bits) - 1;
  const double step = kHalfPi / top;
  const long long code = std::llround(std::clamp(angle, 0.0, kHalfPi) / step);
  return static_cast<std::uint32_t>(std::clamp<long long>(code, 0, top));
}

double dequantize_psi(std::uint32_t code, int bits) {
  const std::uint32_t top = (1u << bits) - 1;
  return code == top ? kHalfPi : code * (kHalfPi / top);
}

SnrCodes quantize_snr_profile(const std::vector<std::vector<double>>& snr_db) {
  if (snr_db.empty()) throw ContractViolation("quantize_snr_profile: empty profile");
  const std::size_t streams = snr_db.front().size();
  SnrCodes out;

  std::vector<double> avg(streams, 0.0);
  for (const auto& row : snr_db) {
    if (row.size() != streams) throw ContractViolation("quantize_snr_profile: ragged profile");
    for (std::size_t i = 0; i < streams; ++i) avg[i] += row[i];
  }
  for (double& a : avg) a /= static_cast<double>(snr_db.size());

  const double top = *std::max_element(avg.begin(), avg.end());
  if (top > kSnrAvgMaxDb) {
    const double max_offset = ((1 << kHeaderOffsetBits) - 1) * kOffsetStepDb;
    const double steps = std::ceil((top - kSnrAvgMaxDb) / kOffsetStepDb - 1e-9);
    out.offset_db = std::min(steps * kOffsetStepDb, max_offset);
  }

  const double step = avg_step_db();
  const int avg_top = (1 << kSnrAvgBits) - 1;
  std::vector<double> avg_rec(streams);
  for (std::size_t i = 0; i < streams; ++i) {
    const long long c = std::llround((avg[i] - out.offset_db - kSnrAvgMinDb) / step);
    out.avg.push_back(static_cast<std::uint32_t>(std::clamp<long long>(c, 0, avg_top)));
    avg_rec[i] = kSnrAvgMinDb + out.avg.back() * step;
  }
  for (const auto& row : snr_db) {
    std::vector<std::uint32_t> codes;
    for (std::size_t i = 0; i < streams; ++i) {
      const long long d = std::llround(row[i] - out.offset_db - avg_rec[i]);
      codes.push_back(static_cast<std::uint32_t>(std::clamp<long long>(d, kSnrDeltaMinDb, kSnrDeltaMaxDb) - kSnrDeltaMinDb));
    }
    out.delta.push_back(std::move(codes));
  }
  return out;
}

std::vector<std::vector<double>> dequantize_snr_profile(const SnrCodes& codes) {
  const double step = avg_step_db();
  std::vector<std::vector<double>> out;
  for (const auto& row : codes.delta) {
    if (row.size() != codes.avg.size()) throw DecodeError("SNR delta row has the wrong stream count");
    std::vector<double> values;
    for (std::size_t i = 0; i < row.size(); ++i) {
      const double avg = kSnrAvgMinDb + codes.avg[i] * step;
      values.push_back(avg + (static_cast<int>(row[i]) + kSnrDeltaMinDb) + codes.offset_db);
    }
    out.push_back(std::move(values));
  }
  return out;
}

FloatCsi encode_csi_float(const ChannelSet& channels, int k, const FeedbackConfig& fb, bool reduce_phases) {
  if (k < 0 || k >= channels.k_users) throw ContractViolation("encode_csi_float: user index out of range");
  FloatCsi out;
  out.k_users = channels.k_users;
  out.m_antennas = channels.m_antennas;
  out.subcarrier_count = channels.subcarriers();
  out.n_g = fb.n_g;
  out.phase_reduced = reduce_phases;
  out.reported = apply_granularity(channels.subcarriers(), fb.n_g);
  for (int s : out.reported) {
    const CanonicalSvd c = canonical_svd(concat_channels(channels.at(s), k), channels.k_users, reduce_phases);
    out.reports.push_back({decompose_unitary(c.f), c.lambda});
  }
  return out;
}

ReconstructedCsi decode_csi_float(const FloatCsi& csi) {
  ReconstructedCsi out;
  out.k_users = csi.k_users;
  out.m_antennas = csi.m_antennas;
  out.subcarrier_count = csi.subcarrier_count;
  out.reported = csi.reported;
  const int rows = csi.k_users * csi.m_antennas;
  for (const auto& rep : csi.reports) {
    const ComplexMatrix f = compose_unitary(rep.angles, rows, csi.m_antennas);
    out.effective.push_back(rep.lambda.cast<Complex>().asDiagonal() * f.adjoint());
    std::vector<double> snr;
    for (Eigen::Index i = 0; i < rep.lambda.size(); ++i) {
      const double l2 = rep.lambda[i] * rep.lambda[i];
      snr.push_back(l2 > 0.0 ? 10.0 * std::log10(l2) : kSnrFloorDb);
    }
    out.snr_db.push_back(std::move(snr));
  }
  return out;
}

CompressedCsi encode_csi(const ChannelSet& channels, int k, const NetworkConfig& cfg,
                         const FeedbackConfig& fb, double noise_power) {
  fb.validate();
  (void)cfg;
  if (!(noise_power > 0.0)) throw ContractViolation("encode_csi: noise_power must be > 0");
  const FloatCsi fl = encode_csi_float(channels, k, fb, true);
  const std::vector<bool> skip = reduced_phi_mask(channels.k_users, channels.m_antennas);

  CompressedCsi out;
  out.k_users = channels.k_users;
  out.m_antennas = channels.m_antennas;
  out.subcarrier_count = channels.subcarriers();
  out.n_g = fb.n_g;
  out.b_phi = fb.b_phi;
  out.b_psi = fb.b_psi;
  out.reported = fl.reported;

  std::vector<std::vector<double>> snr;
  for (const auto& rep : fl.reports) {
    std::vector<std::uint32_t> phi;
    for (std::size_t i = 0; i < rep.angles.phi.size(); ++i) {
      if (!skip[i]) phi.push_back(quantize_phi(rep.angles.phi[i], fb.b_phi));
    }
    std::vector<std::uint32_t> psi;
    for (double a : rep.angles.psi) psi.push_back(quantize_psi(a, fb.b_psi));
    out.phi.push_back(std::move(phi));
    out.psi.push_back(std::move(psi));

    std::vector<double> row;
    for (Eigen::Index i = 0; i < rep.lambda.size(); ++i) {
      const double p = rep.lambda[i] * rep.lambda[i] * fb.snr_ref_power / noise_power;
      row.push_back(p > 0.0 ? std::max(10.0 * std::log10(p), kSnrFloorDb) : kSnrFloorDb);
    }
    snr.push_back(std::move(row));
  }
  SnrCodes q = quantize_snr_profile(snr);
  out.snr_avg = std::move(q.avg);
  out.snr_delta = std::move(q.delta);
  out.snr_offset_db = q.offset_db;
  return out;
}

ReconstructedCsi decode_csi(const CompressedCsi& code, const NetworkConfig& cfg, const FeedbackConfig& fb) {
  const int rows = code.k_users * code.m_antennas;
  const int pairs = angle_pair_count(rows, code.m_antennas);
  const std::vector<bool> skip = reduced_phi_mask(code.k_users, code.m_antennas);
  const auto sent_phi = static_cast<std::size_t>(std::count(skip.begin(), skip.end(), false));
  const std::size_t n_rep = code.reported.size();
  if (code.phi.size() != n_rep || code.psi.size() != n_rep || code.snr_delta.size() != n_rep ||
      code.snr_avg.size() != static_cast<std::size_t>(code.m_antennas)) {
    throw DecodeError("compressed CSI: section sizes disagree with the reported set");
  }

  ReconstructedCsi out;
  out.k_users = code.k_users;
  out.m_antennas = code.m_antennas;
  out.subcarrier_count = code.subcarrier_count;
  out.reported = code.reported;

  SnrCodes snr_codes{code.snr_avg, code.snr_delta, code.snr_offset_db};
  for (auto c : code.snr_avg) check_fits(c, kSnrAvgBits, "snr average");
  for (const auto& row : code.snr_delta) {
    for (auto c : row) check_fits(c, kSnrDeltaBits, "snr delta");
  }
  out.snr_db = dequantize_snr_profile(snr_codes);

  for (std::size_t r = 0; r < n_rep; ++r) {
    if (code.phi[r].size() != sent_phi || code.psi[r].size() != static_cast<std::size_t>(pairs)) {
      throw DecodeError("compressed CSI: angle count mismatch");
    }
    GivensAngles a;
    std::size_t next = 0;
    for (int i = 0; i < pairs; ++i) {
      if (skip[static_cast<std::size_t>(i)]) {
        a.phi.push_back(0.0);
      } else {
        const std::uint32_t c = code.phi[r][next++];
        check_fits(c, code.b_phi, "phi");
        a.phi.push_back(dequantize_phi(c, code.b_phi));
      }
    }
    for (std::uint32_t c : code.psi[r]) {
      check_fits(c, code.b_psi, "psi");
      a.psi.push_back(dequantize_psi(c, code.b_psi));
    }
    const ComplexMatrix f = compose_unitary(a, rows, code.m_antennas);
    RealVector lambda(code.m_antennas);
    for (int i = 0; i < code.m_antennas; ++i) {
      lambda[i] = std::sqrt(std::pow(10.0, out.snr_db[r][static_cast<std::size_t>(i)] / 10.0) *
                            cfg.noise_power / fb.snr_ref_power);
    }
    out.effective.push_back(lambda.cast<Complex>().asDiagonal() * f.adjoint());
  }
  return out;
}

std::size_t ReconstructedCsi::nearest(int s) const {
  std::size_t best = 0;
  for (std::size_t r = 1; r < reported.size(); ++r) {
    if (std::abs(reported[r] - s) < std::abs(reported[best] - s)) best = r;
  }
  return best;
}

ComplexMatrix ReconstructedCsi::block(std::size_t r, int l) const {
  return effective.at(r).middleCols(l * m_antennas, m_antennas);
}

std::vector<std::vector<double>> ReconstructedCsi::interpolated_snr_db() const {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(subcarrier_count));
  for (int s = 0; s < subcarrier_count; ++s) {
    auto hi = std::lower_bound(reported.begin(), reported.end(), s);
    if (hi == reported.end()) {
      out[s] = snr_db.back();
    } else if (*hi == s || hi == reported.begin()) {
      out[s] = snr_db[static_cast<std::size_t>(hi - reported.begin())];
    } else {
      const auto j = static_cast<std::size_t>(hi - reported.begin());
      const double t = static_cast<double>(s - reported[j - 1]) / (reported[j] - reported[j - 1]);
      for (std::size_t i = 0; i < snr_db[j].size(); ++i) {
        out[s].push_back((1.0 - t) * snr_db[j - 1][i] + t * snr_db[j][i]);
      }
    }
  }
  return out;
}

std::size_t payload_bits(const CompressedCsi& code) {
  FeedbackConfig fb;
  fb.b_phi = code.b_phi;
  fb.b_psi = code.b_psi;
  const auto per_sub = static_cast<std::size_t>(feedback_bit_count(code.k_users, code.m_antennas, fb).n_b_reduced);
  const std::size_t rep = code.reported.size();
  const auto m = static_cast<std::size_t>(code.m_antennas);
  return per_sub * rep + kSnrAvgBits * m + kSnrDeltaBits * m * rep;
}

Bitstream serialize(const CompressedCsi& code) {
  if (code.k_users < 1 || code.k_users >= (1 << kHeaderKBits)) throw ContractViolation("serialize: K does not fit the header");
  if (code.m_antennas < 1 || code.m_antennas >= (1 << kHeaderMBits)) throw ContractViolation("serialize: M does not fit the header");
  if (code.n_g < 1 || code.n_g >= (1 << kHeaderNgBits)) throw ContractViolation("serialize: n_g does not fit the header");
  if (code.b_phi < 1 || code.b_phi >= (1 << kHeaderBPhiBits)) throw ContractViolation("serialize: b_phi does not fit the header");
  if (code.b_psi < 1 || code.b_psi >= (1 << kHeaderBPsiBits)) throw ContractViolation("serialize: b_psi does not fit the header");
  const double offset_steps = code.snr_offset_db / kOffsetStepDb;
  const long long offset_code = std::llround(offset_steps);
  if (offset_code < 0 || offset_code >= (1 << kHeaderOffsetBits) || std::abs(offset_steps - offset_code) > 1e-9) {
    throw ContractViolation("serialize: offset is not representable");
  }

  BitWriter w;
  w.put(static_cast<std::uint32_t>(code.k_users), kHeaderKBits);
  w.put(static_cast<std::uint32_t>(code.m_antennas), kHeaderMBits);
  w.put(static_cast<std::uint32_t>(code.n_g), kHeaderNgBits);
  w.put(static_cast<std::uint32_t>(code.b_phi), kHeaderBPhiBits);
  w.put(static_cast<std::uint32_t>(code.b_psi), kHeaderBPsiBits);
  w.put(static_cast<std::uint32_t>(offset_code), kHeaderOffsetBits);
  try {
    for (std::size_t r = 0; r < code.reported.size(); ++r) {
      for (auto c : code.phi.at(r)) w.put(c, code.b_phi);
      for (auto c : code.psi.at(r)) w.put(c, code.b_psi);
    }
    for (auto c : code.snr_avg) w.put(c, kSnrAvgBits);
    for (const auto& row : code.snr_delta) {
      for (auto c : row) w.put(c, kSnrDeltaBits);
    }
  } catch (const std::invalid_argument& e) {
    throw ContractViolation(std::string("serialize: ") + e.what());
  }
  return {w.bytes(), w.bit_length()};
}

CompressedCsi deserialize(const Bitstream& stream, int subcarrier_count) {
  if (stream.bit_length > stream.bytes.size() * 8) throw DecodeError("bit length exceeds buffer");
  BitReader r(stream.bytes.data(), stream.bit_length);
  CompressedCsi out;
  out.k_users = static_cast<int>(r.get(kHeaderKBits));
  out.m_antennas = static_cast<int>(r.get(kHeaderMBits));
  out.n_g = static_cast<int>(r.get(kHeaderNgBits));
  out.b_phi = static_cast<int>(r.get(kHeaderBPhiBits));
  out.b_psi = static_cast<int>(r.get(kHeaderBPsiBits));
  out.snr_offset_db = r.get(kHeaderOffsetBits) * kOffsetStepDb;
  if (out.k_users < 1 || out.m_antennas < 1 || out.n_g < 1 || out.b_phi < 1 || out.b_psi < 1) {
    throw DecodeError("header field out of range");
  }
  if (subcarrier_count < 1) throw DecodeError("subcarrier count must be >= 1");
  out.subcarrier_count = subcarrier_count;
  out.reported = apply_granularity(subcarrier_count, out.n_g);

  const int rows = out.k_users * out.m_antennas;
  const int pairs = angle_pair_count(rows, out.m_antennas);
  const int sent_phi = pairs - (out.k_users - 1);
  for (std::size_t i = 0; i < out.reported.size(); ++i) {
    std::vector<std::uint32_t> phi;
    std::vector<std::uint32_t> psi;
    for (int j = 0; j < sent_phi; ++j) phi.push_back(r.get(out.b_phi));
    for (int j = 0; j < pairs; ++j) psi.push_back(r.get(out.b_psi));
    out.phi.push_back(std::move(phi));
    out.psi.push_back(std::move(psi));
  }
  for (int i = 0; i < out.m_antennas; ++i) out.snr_avg.push_back(r.get(kSnrAvgBits));
  for (std::size_t s = 0; s < out.reported.size(); ++s) {
    std::vector<std::uint32_t> row;
    for (int i = 0; i < out.m_antennas; ++i) row.push_back(r.get(kSnrDeltaBits));
    out.snr_delta.push_back(std::move(row));
  }
  if (r.remaining() != 0) throw DecodeError("trailing bits after the SNR section");
  return out;
}

nlohmann::json to_json(const CompressedCsi& code) {
  return {{"k_users", code.k_users},
          {"m", code.m_antennas},
          {"subcarriers", code.subcarrier_count},
          {"n_g", code.n_g},
          {"b_phi", code.b_phi},
          {"b_psi", code.b_psi},
          {"offset_db", code.snr_offset_db},
          {"reported", code.reported},
          {"phi", code.phi},
          {"psi", code.psi},
          {"snr_avg", code.snr_avg},
          {"snr_delta", code.snr_delta}};
}

CompressedCsi compressed_csi_from_json(const nlohmann::json& doc) {
  CompressedCsi c;
  c.k_users = doc.at("k_users").get<int>();
  c.m_antennas = doc.at("m").get<int>();
  c.subcarrier_count = doc.at("subcarriers").get<int>();
  c.n_g = doc.at("n_g").get<int>();
  c.b_phi = doc.at("b_phi").get<int>();
  c.b_psi = doc.at("b_psi").get<int>();
  c.snr_offset_db = doc.at("offset_db").get<double>();
  c.reported = doc.at("reported").get<std::vector<int>>();
  c.phi = doc.at("phi").get<std::vector<std::vector<std::uint32_t>>>();
  c.psi = doc.at("psi").get<std::vector<std::vector<std::uint32_t>>>();
  c.snr_avg = doc.at("snr_avg").get<std::vector<std::uint32_t>>();
  c.snr_delta = doc.at("snr_delta").get<std::vector<std::vector<std::uint32_t>>>();
  return c;
}

nlohmann::json to_json(const ReconstructedCsi& csi) {
  nlohmann::json h = nlohmann::json::array();
  for (const auto& m : csi.effective) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) rows.push_back({m(r, c).real(), m(r, c).imag()});
    }
    h.push_back(std::move(rows));
  }
  return {{"k_users", csi.k_users},
          {"m", csi.m_antennas},
          {"subcarriers", csi.subcarrier_count},
          {"reported", csi.reported},
          {"snr_db", csi.snr_db},
          {"h", std::move(h)}};
}

}  // namespace ialab
