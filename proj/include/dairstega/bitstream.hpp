#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dairstega {

// Packed bit sequence, most significant bit first within each byte.
class BitString {
 public:
  BitString() = default;

  static BitString from_string(std::string_view zeros_and_ones);
  static BitString from_bytes(std::span<const std::uint8_t> bytes);

  std::uint64_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool operator[](std::uint64_t i) const {
    return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u;
  }

  void push_back(bool bit);
  // Appends the low `count` bits of `value`, most significant first.
  void append(std::uint64_t value, unsigned count);
  void append(const BitString& other);

  // Reads `count` (<= 64) bits starting at `pos`; positions past the end
  // read as zero.
  std::uint64_t read(std::uint64_t pos, unsigned count) const;

  BitString prefix(std::uint64_t count) const;
  // Bytes of a byte-aligned string.
  std::vector<std::uint8_t> to_bytes() const;
  std::string to_string() const;

  bool operator==(const BitString& other) const;

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t size_ = 0;
};

inline constexpr std::uint8_t kFrameMagic = 0xDA;
inline constexpr std::uint8_t kFrameVersion = 0x01;
inline constexpr unsigned kFrameHeaderBits = 48;
inline constexpr std::uint64_t kMaxPayloadBytes = std::uint64_t{1} << 29;

// magic (8) | version (8) | payload bit length (32, big-endian) | payload.
class FramedBitstream {
 public:
  const BitString& bits() const noexcept { return bits_; }
  std::uint32_t payload_bit_length() const noexcept { return payload_bits_; }
  std::uint64_t total_bits() const noexcept { return bits_.size(); }

 private:
  friend FramedBitstream frame(std::span<const std::uint8_t> payload);
  BitString bits_;
  std::uint32_t payload_bits_ = 0;
};

FramedBitstream frame(std::span<const std::uint8_t> payload);

struct FrameHeader {
  std::uint8_t magic;
  std::uint8_t version;
  std::uint32_t payload_bit_length;
};

// Parses and validates the first 48 bits. Throws BadMagic / BadVersion /
// TruncatedPayload (fewer than 48 bits).
FrameHeader parse_header(const BitString& bits);

// Validates the header, drops trailing bits beyond the declared length and
// returns the payload bytes.
std::vector<std::uint8_t> deframe(const BitString& bits);

struct Window {
  std::uint64_t value = 0;
  unsigned padded_bits = 0;
};

// Read position over an immutable bit sequence. Copies share the
// underlying bits.
class BitCursor {
 public:
  explicit BitCursor(const FramedBitstream& stream);
  explicit BitCursor(BitString bits);

  // Next `alpha` bits (1..32) as a big-endian integer, zero padded past the
  // end. Does not move the cursor.
  Window read_window(unsigned alpha) const;
  // Bit at position() + offset, zero past the end.
  bool peek(std::uint64_t offset) const;

  void advance(std::uint64_t k);

  std::uint64_t position() const noexcept { return position_; }
  std::uint64_t size() const noexcept { return bits_->size(); }
  std::uint64_t remaining() const noexcept { return size() - position_; }
  bool exhausted() const noexcept { return position_ == size(); }

 private:
  std::shared_ptr<const BitString> bits_;
  std::uint64_t position_ = 0;
};

// ASCII dump, 64 bits per line.
std::string dump_bits(const BitString& bits);
BitString parse_bit_dump(std::string_view text);

}  // namespace dairstega
