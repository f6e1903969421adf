#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwcrdc/crh_vector.hpp"
#include "rwcrdc/types.hpp"

namespace rwcrdc {

class WireFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Little-endian append-only encoder.
class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(std::size_t reserve) { bytes_.reserve(reserve); }

  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void raw(std::span<const std::uint8_t> data);

  const std::vector<std::uint8_t>& bytes() const& noexcept { return bytes_; }
  std::vector<std::uint8_t> take() && noexcept { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

/// Bounds-checked decoder over a borrowed buffer; throws WireFormatError on
/// truncation.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  std::span<const std::uint8_t> raw(std::size_t n);

  bool done() const noexcept { return pos_ == data_.size(); }
  /// Throws unless the whole buffer was consumed.
  void expect_done() const;

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

/// The broadcast every update sends to all replicas: the user parameters of
/// the operation plus the metadata prepared at the initiator.
///
/// Layout (little-endian):
///   u8  kind (0=add, 1=rmv, 2=upd)
///   u64 element id
///   u16 initiator replica id
///   u8  flags (bit 0: crh-vector present)
///   [u32 n, n x u64]                  crh-vector, when flagged
///   u32 m, m x (u16 replica, u64 seq) tags
///   u32 len, len bytes                value payload (resolver codec)
struct EffectMessage {
  OpKind kind = OpKind::add;
  ElementId element = 0;
  ReplicaId initiator = 0;
  std::optional<CrhVector> crh;
  std::vector<UniqueTag> tags;
  std::vector<std::uint8_t> value;

  friend bool operator==(const EffectMessage&, const EffectMessage&) = default;
};

std::vector<std::uint8_t> encode(const EffectMessage& msg);
EffectMessage decode(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_i64(std::int64_t v);
std::int64_t decode_i64(std::span<const std::uint8_t> bytes);

}  // namespace rwcrdc
