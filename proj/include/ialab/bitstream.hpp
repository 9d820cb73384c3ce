#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ialab {

class DecodeError : public std::runtime_error {
 public:
  explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

/// MSB-first bit packer; the final byte is zero-padded.
class BitWriter {
 public:
  void put(std::uint32_t value, int width);
  std::size_t bit_length() const { return bits_; }
  const std::vector<std::uint8_t>& bytes() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t bits_ = 0;
};

class BitReader {
 public:
  BitReader(const std::uint8_t* data, std::size_t bit_length) : data_(data), limit_(bit_length) {}
  explicit BitReader(const std::vector<std::uint8_t>& bytes) : BitReader(bytes.data(), bytes.size() * 8) {}

  /// Throws DecodeError when fewer than `width` bits remain.
  std::uint32_t get(int width);
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return limit_ - pos_; }

 private:
  const std::uint8_t* data_;
  std::size_t limit_;
  std::size_t pos_ = 0;
};

std::string to_hex(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> from_hex(const std::string& hex);

}  // namespace ialab
