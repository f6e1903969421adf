#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rwcrdc/types.hpp"

namespace rwcrdc {

/// Causal remove history of one element, encoded as one counter per replica.
///
/// Counter k holds the index of the last remove initiated by replica k that
/// is causally visible. The length is fixed at construction and equals the
/// number of replicas in the system.
class CrhVector {
 public:
  using Counter = std::uint64_t;

  /// All-zero vector. Throws std::invalid_argument when `replicas` is 0.
  static CrhVector zero(std::size_t replicas);

  /// Throws std::invalid_argument on an empty counter list.
  explicit CrhVector(std::vector<Counter> counters);

  std::size_t size() const noexcept { return counters_.size(); }
  Counter operator[](std::size_t k) const { return counters_.at(k); }
  std::span<const Counter> counters() const noexcept { return counters_; }

  /// Copy with counter `replica` bumped by one. Throws std::out_of_range
  /// for a replica id outside the vector.
  CrhVector incremented(ReplicaId replica) const;

  /// Sum of all counters, i.e. the number of distinct removes encoded.
  Counter total() const noexcept;

  std::string to_string() const;

  // Same-length comparison only; vectors of different length compare unequal.
  // Use equals() where a length mismatch is a contract violation.
  friend bool operator==(const CrhVector&, const CrhVector&) = default;

 private:
  std::vector<Counter> counters_;
};

/// Pointwise maximum. Throws std::invalid_argument on length mismatch.
CrhVector merge(const CrhVector& a, const CrhVector& b);

/// True iff some coordinate of `incoming` strictly exceeds `local`.
/// Throws std::invalid_argument on length mismatch.
bool has_unseen(const CrhVector& local, const CrhVector& incoming);

/// Coordinate-wise equality. Throws std::invalid_argument on length mismatch.
bool equals(const CrhVector& a, const CrhVector& b);

}  // namespace rwcrdc
