#include "rwcrdc/crh_vector.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rwcrdc {

namespace {

void require_same_length(const CrhVector& a, const CrhVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("crh-vector length mismatch: " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
  }
}

}  // namespace

const char* to_string(OpKind kind) {
  switch (kind) {
    case OpKind::add:
      return "add";
    case OpKind::rmv:
      return "rmv";
    case OpKind::upd:
      return "upd";
  }
  return "?";
}

CrhVector CrhVector::zero(std::size_t replicas) {
  if (replicas == 0) throw std::invalid_argument("crh-vector needs at least one replica");
  return CrhVector(std::vector<Counter>(replicas, 0));
}

CrhVector::CrhVector(std::vector<Counter> counters) : counters_(std::move(counters)) {
  if (counters_.empty()) throw std::invalid_argument("crh-vector needs at least one replica");
}

CrhVector CrhVector::incremented(ReplicaId replica) const {
  if (replica >= counters_.size()) {
    throw std::out_of_range("replica id " + std::to_string(replica) + " outside crh-vector of length " +
                            std::to_string(counters_.size()));
  }
  CrhVector out = *this;
  ++out.counters_[replica];
  return out;
}

CrhVector::Counter CrhVector::total() const noexcept {
  return std::accumulate(counters_.begin(), counters_.end(), Counter{0});
}

std::string CrhVector::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t k = 0; k < counters_.size(); ++k) {
    if (k) os << ',';
    os << counters_[k];
  }
  os << ']';
  return os.str();
}

CrhVector merge(const CrhVector& a, const CrhVector& b) {
  require_same_length(a, b);
  std::vector<CrhVector::Counter> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = std::max(a[k], b[k]);
  return CrhVector(std::move(out));
}

bool has_unseen(const CrhVector& local, const CrhVector& incoming) {
  require_same_length(local, incoming);
  const auto l = local.counters();
  const auto in = incoming.counters();
  for (std::size_t k = 0; k < l.size(); ++k) {
    if (l[k] < in[k]) return true;
  }
  return false;
}

bool equals(const CrhVector& a, const CrhVector& b) {
  require_same_length(a, b);
  return std::equal(a.counters().begin(), a.counters().end(), b.counters().begin());
}

}  // namespace rwcrdc
