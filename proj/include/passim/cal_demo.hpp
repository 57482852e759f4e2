#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "passim/topology.hpp"

namespace passim {

struct CalDemoConfig {
  double magnitude = 2.0;  // |J| of every mask coupling
  double lambda0 = 150e6;
  double duration = 1e-4;     // simulated seconds
  double sample_rate = 300e6; // snapshot clock
  double circuit_delay = 0.0;
  std::uint64_t seed = 1;
  std::size_t energy_stride = 100;  // keep every k-th snapshot energy
};

struct CalDemoReport {
  std::size_t n = 0;
  std::size_t snapshots = 0;
  double mask_fraction = 0.0;
  double complement_fraction = 0.0;
  double hit_fraction = 0.0;  // mask or complement
  std::vector<std::uint8_t> most_visited;
  double most_visited_fraction = 0.0;
  bool most_visited_is_target = false;
  std::optional<double> first_hit_time;
  // Enumeration check (n <= 20): the argmin-energy set equals {mask, complement}.
  std::optional<bool> oracle_confirms_targets;
  std::vector<double> energy_times;
  std::vector<double> energies;
};

CalDemoReport run_cal_demo(const BinaryGrid& mask, const CalDemoConfig& config);

/// CSV "time,energy" energy trace with a '#' summary block.
std::string format_cal_report(const CalDemoReport& report, const std::vector<std::string>& header = {});

}  // namespace passim
