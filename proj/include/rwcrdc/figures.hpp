#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rwcrdc {

/// A scripted two- or three-replica scenario with a known end state.
struct FigureCase {
  std::string name;
  std::string_view script;
};

struct FigureResult {
  std::string name;
  bool passed = false;
  std::vector<std::string> failures;  // one line per violated expectation
};

/// remove-win: a remove concurrent with add+inc leaves e absent, T[e]=[0,1].
FigureResult run_concurrent_remove_case();
/// same-phase adds: larger replica id wins, increments are summed.
FigureResult run_same_phase_add_case();
/// late remove relayed through a third replica is a no-op on arrival.
FigureResult run_late_remove_case();

std::vector<FigureResult> run_figure_cases();

const std::vector<FigureCase>& figure_scripts();

}  // namespace rwcrdc
