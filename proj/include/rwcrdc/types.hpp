#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rwcrdc {

using ElementId = std::uint64_t;
using ReplicaId = std::uint16_t;

// Wire values are fixed: 0=add, 1=rmv, 2=upd.
enum class OpKind : std::uint8_t { add = 0, rmv = 1, upd = 2 };

const char* to_string(OpKind kind);

/// Identifier of one remove (basic RWSet) or one add instance (add-win).
/// Sequence numbers start at 1 and are drawn from a per-replica counter.
struct UniqueTag {
  ReplicaId replica = 0;
  std::uint64_t seq = 0;

  auto operator<=>(const UniqueTag&) const = default;
};

/// Raised by the basic RWSet when an add arrives before a remove in its
/// history. The transport broke causal delivery; the harness treats it
/// as fatal.
class CausalDeliveryViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace rwcrdc
