#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sifm/lte.hpp"
#include "sifm/scenario.hpp"
#include "sifm/sweep.hpp"
#include "sifm/wifi.hpp"
#include "sifm/world.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int cmd_run(const std::string& config_path, long long seed_override,
            const std::string& out_path) {
  sifm::ScenarioConfig cfg;
  try {
    cfg = sifm::scenario_from_json_text(read_file(config_path));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (seed_override >= 0) {
    cfg.seed = static_cast<std::uint64_t>(seed_override);
    cfg.scenario_id = cfg.default_id();
  }
  sifm::RunResult res = sifm::run_scenario(cfg);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  if (!res.ok) {
    std::cerr << "error: " << res.error << "\n";
    return 1;
  }
  write_output(out_path, sifm::rows_to_csv({res.summary}));
  return 0;
}

int cmd_sweep(const std::string& grid_path, const std::string& out_path,
              int parallel, int repeats_override) {
  sifm::GridConfig grid;
  try {
    grid = sifm::grid_from_json_text(read_file(grid_path));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (repeats_override > 0) grid.repeats = repeats_override;
  sifm::SweepResult res = sifm::run_sweep(grid, parallel);
  for (const auto& f : res.failures) std::cerr << "failed: " << f << "\n";
  try {
    write_output(out_path, sifm::rows_to_csv(res.rows));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return res.ok() ? 0 : 1;
}

bool calibrate_wifi() {
  sifm::Simulator sim;
  sifm::WifiMedium wifi(sim, {});
  constexpr sifm::TimeUs kWindowStart = 1'000'000;
  constexpr sifm::TimeUs kWindowEnd = 6'000'000;
  std::uint64_t window_bytes = 0;
  std::function<void()> pump = [&] {
    wifi.transmit(1500, true, [&] {
      if (sim.now() > kWindowStart) window_bytes += 1500;
      pump();
    });
  };
  pump();
  sim.run_until(kWindowEnd);
  const double mbps = static_cast<double>(window_bytes) * 8.0 /
                      (static_cast<double>(kWindowEnd - kWindowStart) / 1e6) /
                      1e6;
  const bool pass = mbps > 22.0 * 0.9 && mbps < 22.0 * 1.1;
  std::printf("wifi saturation goodput: %.2f Mbps (target 22 +/- 10%%) %s\n",
              mbps, pass ? "PASS" : "FAIL");
  return pass;
}

bool calibrate_lte() {
  sifm::Simulator sim;
  sifm::LteDownlink lte(sim, {});
  lte.set_deliver([](sifm::MnId, const sifm::PacketPtr&) {});
  for (sifm::MnId mn = 1; mn <= 8; ++mn) lte.attach(mn);
  lte.start();

  std::function<void()> refill = [&] {
    for (sifm::MnId mn = 1; mn <= 8; ++mn) {
      while (lte.queue_bytes(mn) < 20'000) {
        auto pkt = std::make_shared<sifm::Packet>();
        pkt->payload_bytes = 1000;
        lte.enqueue(mn, pkt);
      }
    }
    sim.after(1000, refill);
  };
  refill();

  constexpr sifm::TimeUs kWindowStart = 1'000'000;
  constexpr sifm::TimeUs kWindowEnd = 6'000'000;
  std::uint64_t at_start = 0;
  sim.at(kWindowStart, [&] { at_start = lte.delivered_bytes; });
  sim.run_until(kWindowEnd);
  const double mbps = static_cast<double>(lte.delivered_bytes - at_start) *
                      8.0 /
                      (static_cast<double>(kWindowEnd - kWindowStart) / 1e6) /
                      1e6;
  const bool pass = mbps > 71.0 * 0.9 && mbps < 71.0 * 1.1;
  std::printf("lte saturated aggregate: %.2f Mbps (target 71 +/- 10%%) %s\n",
              mbps, pass ? "PASS" : "FAIL");
  return pass;
}

int cmd_calibrate() {
  const bool wifi_ok = calibrate_wifi();
  const bool lte_ok = calibrate_lte();
  return (wifi_ok && lte_ok) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LTE/WiFi offload simulator"};
  app.require_subcommand(1);

  std::string config_path;
  long long seed_override = -1;
  std::string run_out;
  auto* run = app.add_subcommand("run", "run one scenario, emit one CSV row");
  run->add_option("--config", config_path, "scenario JSON file")->required();
  run->add_option("--seed", seed_override, "override the scenario seed");
  run->add_option("--out", run_out, "CSV output path (default stdout)");

  std::string grid_path;
  std::string sweep_out;
  int parallel = 1;
  int repeats = 0;
  auto* sweep =
      app.add_subcommand("sweep", "run a scenario grid, emit a CSV table");
  sweep->add_option("--grid", grid_path, "grid JSON file")->required();
  sweep->add_option("--out", sweep_out, "CSV output path (default stdout)");
  sweep->add_option("--parallel", parallel, "worker threads (default 1)");
  sweep->add_option("--repeats", repeats, "override the grid repeat count");

  auto* calibrate =
      app.add_subcommand("calibrate", "check the link models against targets");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, seed_override, run_out);
  if (sweep->parsed()) return cmd_sweep(grid_path, sweep_out, parallel, repeats);
  if (calibrate->parsed()) return cmd_calibrate();
  return 1;
}
