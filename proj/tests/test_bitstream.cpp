#include <doctest.h>

#include <random>

#include "dairstega/bitstream.hpp"
#include "dairstega/error.hpp"
#include "test_support.hpp"

using namespace dairstega;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

BitString header(std::uint8_t magic, std::uint8_t version, std::uint32_t len) {
  BitString bits;
  bits.append(magic, 8);
  bits.append(version, 8);
  bits.append(len, 32);
  return bits;
}

}  // namespace

TEST_CASE("frame: empty payload is a bare header") {
  const auto framed = frame({});
  CHECK(framed.total_bits() == 48);
  CHECK(framed.payload_bit_length() == 0);
  CHECK(framed.bits().to_string() ==
        "11011010" "00000001" "00000000000000000000000000000000");
}

TEST_CASE("frame: one 0xFF byte ends in eight ones") {
  const std::vector<std::uint8_t> payload{0xFF};
  const auto framed = frame(payload);
  CHECK(framed.total_bits() == 56);
  CHECK(framed.bits().to_string().substr(48) == "11111111");
}

TEST_CASE("frame: payload bit length is byte count times eight") {
  const auto payload = testing::bytes_of("Love and peace");
  REQUIRE(payload.size() == 14);
  CHECK(frame(payload).payload_bit_length() == payload.size() * 8);
  CHECK(frame(payload).payload_bit_length() == 112);
}

TEST_CASE("read_window") {
  SUBCASE("direct read") {
    BitCursor c(BitString::from_string("1010"));
    const auto w = c.read_window(3);
    CHECK(w.value == 5);
    CHECK(w.padded_bits == 0);
  }
  SUBCASE("zero padding past the end") {
    BitCursor c(BitString::from_string("1010"));
    c.advance(3);
    const auto w = c.read_window(3);
    CHECK(w.value == 0);
    CHECK(w.padded_bits == 2);
  }
  SUBCASE("mid-stream") {
    BitCursor c(BitString::from_string("110011"));
    c.advance(2);
    CHECK(c.read_window(4).value == 3);
    CHECK(c.read_window(4).padded_bits == 0);
  }
  SUBCASE("exhausted cursor") {
    BitCursor c(BitString::from_string("1"));
    c.advance(1);
    const auto w = c.read_window(32);
    CHECK(w.value == 0);
    CHECK(w.padded_bits == 32);
  }
  SUBCASE("does not move the cursor") {
    BitCursor c(BitString::from_string("110011"));
    c.read_window(4);
    c.read_window(2);
    CHECK(c.position() == 0);
  }
  SUBCASE("alpha range") {
    BitCursor c(BitString::from_string("1"));
    CHECK(code_of([&] { c.read_window(0); }) == ErrorCode::kInvalidArgument);
    CHECK(code_of([&] { c.read_window(33); }) == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("advance clamps at the end") {
  BitCursor c(BitString::from_string("10101010"));
  c.advance(0);
  CHECK(c.position() == 0);
  c.advance(5);
  c.advance(3);
  CHECK(c.position() == 8);
  c.advance(7);
  CHECK(c.position() == 8);
  CHECK(c.exhausted());
}

TEST_CASE("windows with padding-adjusted advances read every bit exactly once") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    BitString bits;
    const auto n = rng() % 300;
    for (std::uint64_t i = 0; i < n; ++i) bits.push_back(rng() & 1);
    BitCursor c(bits);
    BitString seen;
    while (!c.exhausted()) {
      const unsigned alpha = 1 + rng() % 32;
      const auto w = c.read_window(alpha);
      const unsigned real = alpha - w.padded_bits;
      seen.append(w.value >> w.padded_bits, real);
      c.advance(real);
    }
    CHECK(seen == bits);
  }
}

TEST_CASE("deframe errors") {
  CHECK(code_of([] { deframe(header(0x00, 1, 0)); }) == ErrorCode::kBadMagic);
  CHECK(code_of([] { deframe(header(0xDA, 2, 0)); }) == ErrorCode::kBadVersion);
  CHECK(code_of([] { deframe(BitString::from_string("1101")); }) == ErrorCode::kTruncatedPayload);
  auto short_payload = header(0xDA, 1, 64);
  short_payload.append(0, 40);
  CHECK(code_of([&] { deframe(short_payload); }) == ErrorCode::kTruncatedPayload);
  auto odd = header(0xDA, 1, 7);
  odd.append(0, 7);
  CHECK(code_of([&] { deframe(odd); }) == ErrorCode::kNonByteAlignedLength);
}

TEST_CASE("deframe drops bits past the declared length") {
  auto bits = frame(testing::bytes_of("abc")).bits();
  bits.append(0b101, 3);
  CHECK(deframe(bits) == testing::bytes_of("abc"));
}

TEST_CASE("property: deframe(frame(p)) == p") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const auto payload = testing::random_payload(rng, 0, 300);
    CHECK(deframe(frame(payload).bits()) == payload);
  }
}

TEST_CASE("bit dumps are 64 bits per line") {
  const auto framed = frame(testing::bytes_of("0123456789abcdef"));
  const std::string dump = dump_bits(framed.bits());
  CHECK(dump.substr(0, 65).back() == '\n');
  CHECK(dump.find('\n') == 64);
  CHECK(parse_bit_dump(dump) == framed.bits());
}
