#include "sifm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <optional>
#include <thread>
#include <tuple>

namespace sifm {

SweepResult run_sweep(const GridConfig& grid, int parallel) {
  const std::vector<ScenarioConfig> configs = grid.expand();
  std::vector<std::optional<SummaryRow>> slots(configs.size());
  std::vector<std::string> failures(configs.size());

  auto work = [&](std::size_t i) {
    RunResult r = run_scenario(configs[i]);
    if (r.ok) {
      slots[i] = r.summary;
    } else {
      failures[i] = configs[i].scenario_id + ": " + r.error;
    }
  };

  if (parallel <= 1 || configs.size() <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    const int workers =
        std::min<int>(parallel, static_cast<int>(configs.size()));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= configs.size()) return;
          work(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  SweepResult out;
  out.rows.reserve(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (slots[i]) out.rows.push_back(*slots[i]);
    if (!failures[i].empty()) out.failures.push_back(failures[i]);
  }
  auto key = [](const SummaryRow& r) {
    return std::tie(r.architecture, r.num_users, r.offload_percent, r.policy,
                    r.seed);
  };
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [&](const SummaryRow& a, const SummaryRow& b) {
                     return key(a) < key(b);
                   });
  std::sort(out.failures.begin(), out.failures.end());
  return out;
}

std::string rows_to_csv(const std::vector<SummaryRow>& rows) {
  std::string csv = SummaryRow::csv_header();
  csv += '\n';
  for (const auto& row : rows) {
    csv += row.csv_row();
    csv += '\n';
  }
  return csv;
}

}  // namespace sifm
