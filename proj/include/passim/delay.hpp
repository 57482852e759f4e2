#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "passim/model.hpp"

namespace passim {

/// Sweep of the circuit delay against the neuron autocorrelation time.
/// tau_acf is the ACF decay time of a free neuron, 1 / lambda0; each ratio
/// r sets tau_circ = tau_acf / r.
struct DelayStudyConfig {
  std::vector<double> ratios = {20, 10, 8, 6, 5, 4, 3, 2, 1.5, 1};
  double lambda0 = 150e6;
  std::uint64_t events = 1'000'000;  // per run
  std::size_t replicates = 3;
  std::uint64_t seed = 1;
  double tv_threshold = 0.1;  // TV level that marks the breakpoint
  std::size_t jobs = 1;
};

struct DelayPoint {
  double ratio = 0.0;  // +inf for the undelayed baseline
  double tau_circ = 0.0;
  std::vector<double> tv;  // one per replicate
  double mean_tv = 0.0;
  double stderr_tv = 0.0;
};

struct DelayStudy {
  double tau_acf = 0.0;
  DelayPoint baseline;
  std::vector<DelayPoint> points;  // decreasing ratio, i.e. growing delay
  /// Ratio at which mean TV first reaches the threshold, interpolated in
  /// log(ratio) between neighboring points; nullopt when it never does.
  std::optional<double> breakpoint_ratio;
  double tv_threshold = 0.0;

  /// True when no step towards larger delay drops mean TV by more than
  /// z combined standard errors.
  bool non_decreasing(double z = 3.0) const;
};

/// TV between the exact Boltzmann distribution (n <= 20) and the
/// time-weighted occupancy of an asynchronous run at each delay. Replicate
/// j of point k (k = 0 is the baseline) uses derive_seed(seed, {k, j}).
DelayStudy run_delay_study(const IsingModel& model, const DelayStudyConfig& config);

/// CSV: ratio,tau_circ,mean_tv,stderr_tv,tv_1,...
std::string format_delay_study(const DelayStudy& study);

}  // namespace passim
