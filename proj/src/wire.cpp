#include "rwcrdc/wire.hpp"

#include <limits>

namespace rwcrdc {

void ByteWriter::u16(std::uint16_t v) {
  std::uint8_t buf[2];
  for (int i = 0; i < 2; ++i) buf[i] = static_cast<std::uint8_t>(v >> (8 * i));
  bytes_.insert(bytes_.end(), buf, buf + 2);
}

void ByteWriter::u32(std::uint32_t v) {
  std::uint8_t buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<std::uint8_t>(v >> (8 * i));
  bytes_.insert(bytes_.end(), buf, buf + 4);
}

void ByteWriter::u64(std::uint64_t v) {
  std::uint8_t buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>(v >> (8 * i));
  bytes_.insert(bytes_.end(), buf, buf + 8);
}

void ByteWriter::raw(std::span<const std::uint8_t> data) {
  bytes_.insert(bytes_.end(), data.begin(), data.end());
}

void ByteReader::need(std::size_t n) const {
  if (data_.size() - pos_ < n) {
    throw WireFormatError("truncated message: need " + std::to_string(n) + " bytes at offset " +
                          std::to_string(pos_) + " of " + std::to_string(data_.size()));
  }
}

std::uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

std::uint16_t ByteReader::u16() {
  need(2);
  std::uint16_t v = 0;
  for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(data_[pos_++]) << (8 * i);
  return v;
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
  return v;
}

std::span<const std::uint8_t> ByteReader::raw(std::size_t n) {
  need(n);
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

void ByteReader::expect_done() const {
  if (!done()) {
    throw WireFormatError(std::to_string(data_.size() - pos_) + " trailing bytes after message");
  }
}

namespace {

constexpr std::uint8_t kHasCrh = 0x01;

std::uint32_t checked_count(std::size_t n) {
  if (n > std::numeric_limits<std::uint32_t>::max()) throw WireFormatError("sequence too long");
  return static_cast<std::uint32_t>(n);
}

}  // namespace

std::vector<std::uint8_t> encode(const EffectMessage& msg) {
  ByteWriter w((msg.crh ? 4 + 8 * msg.crh->size() : 0) + 10 * msg.tags.size() + msg.value.size() + 24);
  w.u8(static_cast<std::uint8_t>(msg.kind));
  w.u64(msg.element);
  w.u16(msg.initiator);
  w.u8(msg.crh ? kHasCrh : 0);
  if (msg.crh) {
    w.u32(checked_count(msg.crh->size()));
    for (auto c : msg.crh->counters()) w.u64(c);
  }
  w.u32(checked_count(msg.tags.size()));
  for (const auto& tag : msg.tags) {
    w.u16(tag.replica);
    w.u64(tag.seq);
  }
  w.u32(checked_count(msg.value.size()));
  w.raw(msg.value);
  return std::move(w).take();
}

EffectMessage decode(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  EffectMessage msg;
  const auto kind = r.u8();
  if (kind > static_cast<std::uint8_t>(OpKind::upd)) {
    throw WireFormatError("unknown operation kind " + std::to_string(kind));
  }
  msg.kind = static_cast<OpKind>(kind);
  msg.element = r.u64();
  msg.initiator = r.u16();
  const auto flags = r.u8();
  if (flags & ~kHasCrh) throw WireFormatError("unknown flag bits");
  if (flags & kHasCrh) {
    const auto n = r.u32();
    if (n == 0) throw WireFormatError("empty crh-vector");
    std::vector<CrhVector::Counter> counters;
    counters.reserve(n);
    for (std::uint32_t k = 0; k < n; ++k) counters.push_back(r.u64());
    msg.crh = CrhVector(std::move(counters));
  }
  const auto m = r.u32();
  msg.tags.reserve(m);
  for (std::uint32_t k = 0; k < m; ++k) {
    UniqueTag tag;
    tag.replica = r.u16();
    tag.seq = r.u64();
    msg.tags.push_back(tag);
  }
  const auto len = r.u32();
  auto value = r.raw(len);
  msg.value.assign(value.begin(), value.end());
  r.expect_done();
  return msg;
}

std::vector<std::uint8_t> encode_i64(std::int64_t v) {
  ByteWriter w;
  w.i64(v);
  return std::move(w).take();
}

std::int64_t decode_i64(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto v = r.i64();
  r.expect_done();
  return v;
}

}  // namespace rwcrdc
