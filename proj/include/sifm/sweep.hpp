#pragma once

#include <string>
#include <vector>

#include "sifm/scenario.hpp"
#include "sifm/world.hpp"

namespace sifm {

struct SweepResult {
  std::vector<SummaryRow> rows;       // expansion order, one per scenario
  std::vector<std::string> failures;  // "<scenario_id>: <error>"

  bool ok() const { return failures.empty(); }
};

// Runs every scenario of the expanded grid. Scenarios are independent;
// `parallel` > 1 runs them on that many worker threads. The row order (and
// therefore the CSV) is the expansion order regardless of scheduling, so
// output is byte-stable. A failing scenario is reported in `failures` and
// skipped in `rows`; the sweep keeps going.
SweepResult run_sweep(const GridConfig& grid, int parallel = 1);

std::string rows_to_csv(const std::vector<SummaryRow>& rows);

}  // namespace sifm
