#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "rwcrdc/crpq.hpp"
#include "rwcrdc/types.hpp"
#include "rwcrdc/wire.hpp"

namespace rwcrdc {

class OptRwset;
class AddWinPq;

enum class CrdcKind { basic_rwset, opt_rwset, rw_crpq, aw_crpq };

std::string_view to_string(CrdcKind kind);
/// Accepts the names printed by to_string plus the CLI aliases rmv_win/add_win.
std::optional<CrdcKind> parse_crdc_kind(std::string_view name);

/// A client update. `value` is the initial priority of an add or the amount
/// of an inc; the sets ignore it and reject upd.
struct ClientOp {
  OpKind kind = OpKind::add;
  ElementId element = 0;
  Priority value = 0;

  friend bool operator==(const ClientOp&, const ClientOp&) = default;
};

enum class QueryKind { empty, lookup, get_pri, get_max };

struct QueryOp {
  QueryKind kind = QueryKind::get_max;
  ElementId element = 0;
};

struct QueryResult {
  /// False when the query's precondition fails (get_pri of an absent
  /// element, get_max on an empty queue) or the CRDC lacks the query.
  bool accepted = false;
  /// Answer of empty / lookup.
  bool flag = false;
  /// Answer of get_max, or (element, priority) for get_pri.
  std::optional<MaxEntry> entry;

  friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

/// Meta-data held by one replica, counted in stored integers.
struct MetadataSample {
  /// Remove-win: crh-vector coordinates carried by present elements.
  /// Add-win: live instance tags plus cancelled tags.
  /// Basic set: recorded remove tags.
  std::size_t units = 0;
  std::size_t elements = 0;
  /// Remove-win only: coordinates of T entries whose element is absent.
  std::size_t tombstone_units = 0;
};

/// Uniform face of every CRDC replica for the simulator.
class ReplicaHost {
 public:
  virtual ~ReplicaHost() = default;

  virtual CrdcKind kind() const = 0;
  /// Runs the prepare part; nullopt means the precondition failed.
  virtual std::optional<EffectMessage> prepare(const ClientOp& op) = 0;
  /// Runs the effect part of a broadcast.
  virtual void apply(const EffectMessage& msg) = 0;
  virtual QueryResult query(const QueryOp& q) const = 0;
  virtual MetadataSample metadata() const = 0;
  /// Canonical payload dump; equal strings mean equal payloads.
  virtual std::string fingerprint() const = 0;

  /// Typed access for inspection; nullptr unless the host wraps that type.
  virtual const Crpq* as_crpq() const { return nullptr; }
  virtual const OptRwset* as_opt_rwset() const { return nullptr; }
  virtual const AddWinPq* as_add_win() const { return nullptr; }
};

std::unique_ptr<ReplicaHost> make_replica(CrdcKind kind, ReplicaId self, std::size_t replicas);

}  // namespace rwcrdc
