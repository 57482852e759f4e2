#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "passim/maxcut.hpp"
#include "passim/model.hpp"
#include "passim/scaling.hpp"

namespace passim {

enum class ProblemKind { MaxCut, SK };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem_kind(std::string_view text);

struct BenchmarkSuite {
  ProblemKind kind = ProblemKind::SK;
  std::vector<std::size_t> sizes{10, 20, 30, 40, 50, 60};
  std::size_t instances = 10;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  WeightScheme weights = WeightScheme::PlusMinusOne;  // MaxCut only
  // The sampled model is the instance scaled by beta / sqrt(n).
  double beta = 2.0;
};

struct BenchmarkOptions {
  double lambda0 = 150e6;
  double max_sweeps = 1e5;  // per-trial budget, in updates per neuron
  std::size_t bootstrap = 1000;
  unsigned jobs = 1;
  std::size_t exact_limit = 20;
};

struct BenchmarkInstance {
  std::size_t size;
  std::size_t index;
  IsingModel problem;  // unscaled instance
  IsingModel sampled;  // problem scaled by the inverse temperature
  Optimum optimum;     // of `problem`
};

std::vector<BenchmarkInstance> generate_instances(const BenchmarkSuite& suite,
                                                  std::size_t exact_limit = 20);

/// Incrementally tracked energy of a state given as up bits.
class EnergyTracker {
 public:
  EnergyTracker(const IsingModel& model, std::span<const std::uint8_t> bits);
  /// Call after bit i flipped to `up`; `bits` already holds the new state.
  void flipped(std::size_t i, std::uint8_t up, std::span<const std::uint8_t> bits);
  double energy() const noexcept { return energy_; }

 private:
  const IsingModel* model_;
  double energy_;
};

/// First hitting time of energy <= target + 1e-9 for one chain of each
/// engine from the same initial state, under the same budget.
struct TrialTimes {
  std::optional<double> async_tts;
  std::optional<double> sync_tts;
};

TrialTimes run_trial(const IsingModel& sampled, double target_energy, const SpinState& initial,
                     double lambda0, double max_sweeps, std::uint64_t async_seed,
                     std::uint64_t sync_seed);

struct TrialRecord {
  std::size_t size;
  std::size_t instance;
  std::size_t trial;
  TrialTimes times;
};

struct BenchmarkResult {
  std::vector<TrialRecord> trials;
  std::vector<BenchmarkInstance> instances;
  ScalingReport async_report;  // AeB form
  ScalingReport async_over_n;  // AoverN form
  ScalingReport sync_report;   // AeB form
  std::size_t async_misses = 0;
  std::size_t sync_misses = 0;
  std::vector<std::string> diagnostics;
};

/// Runs every (size, instance, trial) for both engines and fits the
/// scaling curves. Trials that miss the optimum within the budget are
/// excluded from the fits and counted in *_misses.
BenchmarkResult run_scaling_benchmark(const BenchmarkSuite& suite, const BenchmarkOptions& options);

/// CSV of the per-trial times ("size,instance,trial,engine,tts", "nan" for misses).
std::string format_benchmark_trials(const BenchmarkResult& result,
                                    const std::vector<std::string>& header = {});

}  // namespace passim
