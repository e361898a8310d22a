#include "dairstega/bitstream.hpp"

#include <algorithm>
#include <cctype>

#include "dairstega/error.hpp"

namespace dairstega {

BitString BitString::from_string(std::string_view zeros_and_ones) {
  BitString out;
  for (char c : zeros_and_ones) {
    if (c != '0' && c != '1') {
      throw Error(ErrorCode::kInvalidArgument,
                  "bit strings may only contain '0' and '1'");
    }
    out.push_back(c == '1');
  }
  return out;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes) {
  BitString out;
  out.bytes_.assign(bytes.begin(), bytes.end());
  out.size_ = std::uint64_t{bytes.size()} * 8;
  return out;
}

void BitString::push_back(bool bit) {
  if ((size_ & 7) == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (size_ & 7));
  ++size_;
}

void BitString::append(std::uint64_t value, unsigned count) {
  for (unsigned i = count; i-- > 0;) push_back((value >> i) & 1u);
}

void BitString::append(const BitString& other) {
  if ((size_ & 7) == 0) {
    bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.end());
    size_ += other.size_;
    return;
  }
  for (std::uint64_t i = 0; i < other.size_; ++i) push_back(other[i]);
}

std::uint64_t BitString::read(std::uint64_t pos, unsigned count) const {
  std::uint64_t value = 0;
  for (unsigned i = 0; i < count; ++i) {
    const std::uint64_t at = pos + i;
    value = (value << 1) | (at < size_ && (*this)[at] ? 1u : 0u);
  }
  return value;
}

BitString BitString::prefix(std::uint64_t count) const {
  count = std::min(count, size_);
  BitString out;
  out.bytes_.assign(bytes_.begin(), bytes_.begin() + (count + 7) / 8);
  out.size_ = count;
  if (count & 7) {
    out.bytes_.back() &= static_cast<std::uint8_t>(0xFF00u >> (count & 7));
  }
  return out;
}

std::vector<std::uint8_t> BitString::to_bytes() const {
  if (size_ & 7) {
    throw Error(ErrorCode::kNonByteAlignedLength,
                "bit string of " + std::to_string(size_) +
                    " bits is not byte aligned");
  }
  return bytes_;
}

std::string BitString::to_string() const {
  std::string out;
  out.reserve(size_);
  for (std::uint64_t i = 0; i < size_; ++i) out.push_back((*this)[i] ? '1' : '0');
  return out;
}

bool BitString::operator==(const BitString& other) const {
  return size_ == other.size_ && bytes_ == other.bytes_;
}

FramedBitstream frame(std::span<const std::uint8_t> payload) {
  if (payload.size() > kMaxPayloadBytes) {
    throw Error(ErrorCode::kPayloadTooLarge,
                "payload of " + std::to_string(payload.size()) +
                    " bytes exceeds 2^29");
  }
  FramedBitstream out;
  out.payload_bits_ = static_cast<std::uint32_t>(payload.size() * 8);
  out.bits_.append(kFrameMagic, 8);
  out.bits_.append(kFrameVersion, 8);
  out.bits_.append(out.payload_bits_, 32);
  out.bits_.append(BitString::from_bytes(payload));
  return out;
}

FrameHeader parse_header(const BitString& bits) {
  if (bits.size() < kFrameHeaderBits) {
    throw Error(ErrorCode::kTruncatedPayload,
                "need 48 header bits, have " + std::to_string(bits.size()));
  }
  FrameHeader header{static_cast<std::uint8_t>(bits.read(0, 8)),
                     static_cast<std::uint8_t>(bits.read(8, 8)),
                     static_cast<std::uint32_t>(bits.read(16, 32))};
  if (header.magic != kFrameMagic) {
    throw Error(ErrorCode::kBadMagic, "unexpected frame magic " +
                                          std::to_string(header.magic));
  }
  if (header.version != kFrameVersion) {
    throw Error(ErrorCode::kBadVersion, "unsupported frame version " +
                                            std::to_string(header.version));
  }
  return header;
}

std::vector<std::uint8_t> deframe(const BitString& bits) {
  const FrameHeader header = parse_header(bits);
  const std::uint64_t total = kFrameHeaderBits + std::uint64_t{header.payload_bit_length};
  if (bits.size() < total) {
    throw Error(ErrorCode::kTruncatedPayload,
                "header declares " + std::to_string(header.payload_bit_length) +
                    " payload bits, only " +
                    std::to_string(bits.size() - kFrameHeaderBits) + " present");
  }
  if (header.payload_bit_length % 8 != 0) {
    throw Error(ErrorCode::kNonByteAlignedLength,
                "payload length " + std::to_string(header.payload_bit_length) +
                    " is not a multiple of 8");
  }
  std::vector<std::uint8_t> out(header.payload_bit_length / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(bits.read(kFrameHeaderBits + 8 * i, 8));
  }
  return out;
}

BitCursor::BitCursor(const FramedBitstream& stream)
    : bits_(std::make_shared<const BitString>(stream.bits())) {}

BitCursor::BitCursor(BitString bits)
    : bits_(std::make_shared<const BitString>(std::move(bits))) {}

Window BitCursor::read_window(unsigned alpha) const {
  if (alpha < 1 || alpha > 32) {
    throw Error(ErrorCode::kInvalidArgument, "window width must be in [1, 32]");
  }
  const std::uint64_t left = remaining();
  return Window{bits_->read(position_, alpha),
                left >= alpha ? 0u : static_cast<unsigned>(alpha - left)};
}

bool BitCursor::peek(std::uint64_t offset) const {
  return bits_->read(position_ + offset, 1) != 0;
}

void BitCursor::advance(std::uint64_t k) {
  position_ += std::min(k, remaining());
}

std::string dump_bits(const BitString& bits) {
  std::string out;
  const std::string all = bits.to_string();
  for (std::size_t i = 0; i < all.size(); i += 64) {
    out.append(all, i, 64);
    out.push_back('\n');
  }
  return out;
}

BitString parse_bit_dump(std::string_view text) {
  BitString out;
  for (char c : text) {
    if (c == '0' || c == '1') {
      out.push_back(c == '1');
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw Error(ErrorCode::kInvalidArgument, "bad character in bit dump");
    }
  }
  return out;
}

}  // namespace dairstega
