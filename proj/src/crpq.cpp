#include "rwcrdc/crpq.hpp"

#include <stdexcept>
#include <string>

namespace rwcrdc {

Priority checked_add(Priority a, Priority b) {
  Priority out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw std::overflow_error("priority overflow: " + std::to_string(a) + " + " + std::to_string(b));
  }
  return out;
}

std::optional<MaxEntry> Crpq::get_max() const {
  std::optional<MaxEntry> best;
  // Both maps are ordered by id: walk them in lockstep, keeping the first
  // maximum so ties go to the smallest id.
  const auto& values = skeleton_.values();
  auto v = values.begin();
  for (const auto& [e, origin] : skeleton_.elements()) {
    while (v->first < e) ++v;
    const Priority p = skeleton_.resolver().interpret(v->second.innate, v->second.acquired);
    if (!best || p > best->priority) best = MaxEntry{e, p};
  }
  return best;
}

}  // namespace rwcrdc
