#include "rwcrdc/replica.hpp"

#include "rwcrdc/addwin.hpp"
#include "rwcrdc/rwset.hpp"

namespace rwcrdc {

std::string_view to_string(CrdcKind kind) {
  switch (kind) {
    case CrdcKind::basic_rwset:
      return "basic_rwset";
    case CrdcKind::opt_rwset:
      return "opt_rwset";
    case CrdcKind::rw_crpq:
      return "rmv_win";
    case CrdcKind::aw_crpq:
      return "add_win";
  }
  return "?";
}

std::optional<CrdcKind> parse_crdc_kind(std::string_view name) {
  if (name == "basic_rwset") return CrdcKind::basic_rwset;
  if (name == "opt_rwset") return CrdcKind::opt_rwset;
  if (name == "rmv_win" || name == "rw_crpq") return CrdcKind::rw_crpq;
  if (name == "add_win" || name == "aw_crpq") return CrdcKind::aw_crpq;
  return std::nullopt;
}

namespace {

QueryResult set_query(bool empty, bool present, const QueryOp& q) {
  switch (q.kind) {
    case QueryKind::empty:
      return QueryResult{true, empty, std::nullopt};
    case QueryKind::lookup:
      return QueryResult{true, present, std::nullopt};
    default:
      return QueryResult{};
  }
}

template <class Pq>
QueryResult pq_query(const Pq& pq, const QueryOp& q) {
  switch (q.kind) {
    case QueryKind::empty:
      return QueryResult{true, pq.empty(), std::nullopt};
    case QueryKind::lookup:
      return QueryResult{true, pq.lookup(q.element), std::nullopt};
    case QueryKind::get_pri: {
      auto p = pq.get_pri(q.element);
      if (!p) return QueryResult{};
      return QueryResult{true, false, MaxEntry{q.element, *p}};
    }
    case QueryKind::get_max: {
      auto m = pq.get_max();
      if (!m) return QueryResult{};
      return QueryResult{true, false, m};
    }
  }
  return QueryResult{};
}

class BasicSetHost final : public ReplicaHost {
 public:
  explicit BasicSetHost(ReplicaId self) : set_(self) {}

  CrdcKind kind() const override { return CrdcKind::basic_rwset; }

  std::optional<EffectMessage> prepare(const ClientOp& op) override {
    switch (op.kind) {
      case OpKind::add:
        if (auto eff = set_.prepare_add(op.element)) return to_wire(*eff);
        return std::nullopt;
      case OpKind::rmv:
        if (auto eff = set_.prepare_rmv(op.element)) return to_wire(*eff);
        return std::nullopt;
      case OpKind::upd:
        return std::nullopt;
    }
    return std::nullopt;
  }

  void apply(const EffectMessage& msg) override {
    if (msg.kind == OpKind::add) {
      set_.apply(basic_add_from_wire(msg));
    } else if (msg.kind == OpKind::rmv) {
      set_.apply(basic_rmv_from_wire(msg));
    } else {
      throw WireFormatError("sets have no upd");
    }
  }

  QueryResult query(const QueryOp& q) const override {
    return set_query(set_.elements().empty(), set_.lookup(q.element), q);
  }

  MetadataSample metadata() const override { return {set_.tag_count(), set_.elements().size(), 0}; }
  std::string fingerprint() const override { return set_.fingerprint(); }

 private:
  BasicRwset set_;
};

class OptSetHost final : public ReplicaHost {
 public:
  OptSetHost(ReplicaId self, std::size_t n) : set_(self, n) {}

  CrdcKind kind() const override { return CrdcKind::opt_rwset; }

  std::optional<EffectMessage> prepare(const ClientOp& op) override {
    switch (op.kind) {
      case OpKind::add:
        if (auto eff = set_.prepare_add(op.element)) return to_wire(*eff);
        return std::nullopt;
      case OpKind::rmv:
        if (auto eff = set_.prepare_rmv(op.element)) return to_wire(*eff);
        return std::nullopt;
      case OpKind::upd:
        return std::nullopt;
    }
    return std::nullopt;
  }

  void apply(const EffectMessage& msg) override {
    if (msg.kind == OpKind::add) {
      set_.apply(opt_add_from_wire(msg));
    } else if (msg.kind == OpKind::rmv) {
      set_.apply(opt_rmv_from_wire(msg));
    } else {
      throw WireFormatError("sets have no upd");
    }
  }

  QueryResult query(const QueryOp& q) const override {
    return set_query(set_.elements().empty(), set_.lookup(q.element), q);
  }

  MetadataSample metadata() const override {
    const std::size_t n = set_.replicas();
    std::size_t absent = 0;
    for (const auto& [e, t] : set_.history().entries()) absent += set_.lookup(e) ? 0 : 1;
    return {n * set_.elements().size(), set_.elements().size(), n * absent};
  }

  std::string fingerprint() const override { return set_.fingerprint(); }
  const OptRwset* as_opt_rwset() const override { return &set_; }

 private:
  OptRwset set_;
};

class CrpqHost final : public ReplicaHost {
 public:
  CrpqHost(ReplicaId self, std::size_t n) : pq_(self, n), replicas_(n) {}

  CrdcKind kind() const override { return CrdcKind::rw_crpq; }

  std::optional<EffectMessage> prepare(const ClientOp& op) override {
    switch (op.kind) {
      case OpKind::add:
        if (auto eff = pq_.prepare_add(op.element, op.value)) return pq_.to_wire(*eff);
        return std::nullopt;
      case OpKind::upd:
        if (auto eff = pq_.prepare_inc(op.element, op.value)) return pq_.to_wire(*eff);
        return std::nullopt;
      case OpKind::rmv:
        if (auto eff = pq_.prepare_rmv(op.element)) return pq_.to_wire(*eff);
        return std::nullopt;
    }
    return std::nullopt;
  }

  void apply(const EffectMessage& msg) override { pq_.apply_message(msg); }
  QueryResult query(const QueryOp& q) const override { return pq_query(pq_, q); }

  MetadataSample metadata() const override {
    std::size_t absent = 0;
    for (const auto& [e, t] : pq_.skeleton().history().entries()) absent += pq_.lookup(e) ? 0 : 1;
    return {replicas_ * pq_.size(), pq_.size(), replicas_ * absent};
  }

  std::string fingerprint() const override { return pq_.fingerprint(); }
  const Crpq* as_crpq() const override { return &pq_; }

 private:
  Crpq pq_;
  std::size_t replicas_;
};

class AddWinHost final : public ReplicaHost {
 public:
  explicit AddWinHost(ReplicaId self) : pq_(self) {}

  CrdcKind kind() const override { return CrdcKind::aw_crpq; }

  std::optional<EffectMessage> prepare(const ClientOp& op) override {
    switch (op.kind) {
      case OpKind::add:
        if (auto eff = pq_.prepare_add(op.element, op.value)) return to_wire(*eff);
        return std::nullopt;
      case OpKind::upd:
        if (auto eff = pq_.prepare_inc(op.element, op.value)) return to_wire(*eff);
        return std::nullopt;
      case OpKind::rmv:
        if (auto eff = pq_.prepare_rmv(op.element)) return to_wire(*eff);
        return std::nullopt;
    }
    return std::nullopt;
  }

  void apply(const EffectMessage& msg) override { pq_.apply_message(msg); }
  QueryResult query(const QueryOp& q) const override { return pq_query(pq_, q); }

  MetadataSample metadata() const override {
    return {pq_.live_tag_count() + pq_.cancelled_count(), pq_.size(), 0};
  }

  std::string fingerprint() const override { return pq_.fingerprint(); }
  const AddWinPq* as_add_win() const override { return &pq_; }

 private:
  AddWinPq pq_;
};

}  // namespace

std::unique_ptr<ReplicaHost> make_replica(CrdcKind kind, ReplicaId self, std::size_t replicas) {
  if (self >= replicas) throw std::invalid_argument("replica id outside the replica set");
  switch (kind) {
    case CrdcKind::basic_rwset:
      return std::make_unique<BasicSetHost>(self);
    case CrdcKind::opt_rwset:
      return std::make_unique<OptSetHost>(self, replicas);
    case CrdcKind::rw_crpq:
      return std::make_unique<CrpqHost>(self, replicas);
    case CrdcKind::aw_crpq:
      return std::make_unique<AddWinHost>(self);
  }
  throw std::invalid_argument("unknown crdc kind");
}

}  // namespace rwcrdc
