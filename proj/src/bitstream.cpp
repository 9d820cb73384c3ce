#include "ialab/bitstream.hpp"

namespace ialab {

void BitWriter::put(std::uint32_t value, int width) {
  if (width < 0 || width > 32) throw std::invalid_argument("BitWriter::put: width out of range");
  if (width < 32 && (value >> width) != 0) {
    throw std::invalid_argument("BitWriter::put: value does not fit in " + std::to_string(width) + " bits");
  }
  for (int b = width - 1; b >= 0; --b) {
    if (bits_ % 8 == 0) buf_.push_back(0);
    if ((value >> b) & 1u) buf_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ % 8));
    ++bits_;
  }
}

std::uint32_t BitReader::get(int width) {
  if (width < 0 || width > 32) throw DecodeError("BitReader::get: width out of range");
  if (remaining() < static_cast<std::size_t>(width)) throw DecodeError("bitstream truncated");
  std::uint32_t v = 0;
  for (int b = 0; b < width; ++b, ++pos_) {
    const std::uint32_t bit = (data_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
    v = (v << 1) | bit;
  }
  return v;
}

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

std::vector<std::uint8_t> from_hex(const std::string& hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw DecodeError("invalid hex digit");
  };
  if (hex.size() % 2 != 0) throw DecodeError("hex string has odd length");
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  }
  return out;
}

}  // namespace ialab
