#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "passim/model.hpp"
#include "passim/neuron.hpp"
#include "passim/rng.hpp"

namespace passim {

/// One spin flip. `up` is the new output bit (1 = up value of the domain).
struct FlipEvent {
  double time;
  std::uint32_t neuron;
  std::uint8_t up;

  friend bool operator==(const FlipEvent&, const FlipEvent&) = default;
};

struct EventTrace {
  std::vector<std::uint8_t> initial;  // up bits at t = 0
  std::vector<FlipEvent> events;      // non-decreasing times
  double final_time = 0.0;
  // provenance, written to trace headers
  double lambda0 = 0.0;
  std::uint64_t seed = 0;
  double tau_circ = 0.0;

  std::size_t size() const noexcept { return initial.size(); }
  bool operator==(const EventTrace&) const = default;
};

/// Full binary states at a fixed period, row-major (snapshot k occupies
/// bits[k*n, (k+1)*n)).
struct SnapshotTrace {
  std::size_t n = 0;
  double period = 0.0;
  std::vector<std::uint8_t> bits;
  // provenance
  double lambda0 = 0.0;
  std::uint64_t seed = 0;
  double tau_circ = 0.0;

  std::size_t count() const noexcept { return n == 0 ? 0 : bits.size() / n; }
  std::span<const std::uint8_t> snapshot(std::size_t k) const {
    return {bits.data() + k * n, n};
  }
  bool operator==(const SnapshotTrace&) const = default;
};

struct StopAtTime {
  double seconds;
};
struct StopAfterEvents {
  std::uint64_t events;
};
using StopCondition = std::variant<StopAtTime, StopAfterEvents>;

struct UniformRandomStart {};
struct AllDownStart {};
using InitialState = std::variant<UniformRandomStart, AllDownStart, SpinState>;

struct AsyncConfig {
  StopCondition stop = StopAfterEvents{1'000'000};
  std::uint64_t seed = 0;
  double circuit_delay = 0.0;  // tau_circ, seconds
  InitialState initial = UniformRandomStart{};
};

/// Called after every flip with the flip and the post-flip output bits;
/// return false to stop.
using FlipObserver = std::function<bool(const FlipEvent&, std::span<const std::uint8_t>)>;

/// Up bits of the initial state, with clamped neurons forced to their clamp
/// value. `rng` is consumed only for UniformRandomStart.
std::vector<std::uint8_t> make_initial_bits(const IsingModel& model,
                                            std::span<const NeuronParams> params,
                                            const InitialState& initial, Rng& rng);

/// Continuous-time asynchronous sampler. Each free neuron holds its output
/// for an exponential time with rate lambda0 * P(opposite output | inputs)
/// and then flips. Inputs are the neighbor outputs as they were
/// circuit_delay seconds earlier.
///
/// Scheduling uses an indexed min-heap of tentative firing times; when a
/// neighbor change becomes visible to neuron i its firing time is redrawn
/// from the new rate (valid by memorylessness). Cost per flip is
/// O(degree * log n).
class AsyncSampler {
 public:
  AsyncSampler(const IsingModel& model, std::span<const NeuronParams> params,
               const AsyncConfig& config);

  /// Runs until the stop condition or until `observer` returns false.
  /// Returns the final simulated time (stop time for StopAtTime, otherwise
  /// the time of the last flip).
  double run(const FlipObserver& observer = {});

  std::span<const std::uint8_t> initial_bits() const noexcept { return initial_; }
  std::span<const std::uint8_t> bits() const noexcept { return up_; }
  std::uint64_t event_count() const noexcept { return events_; }

 private:
  struct Pending {
    double time;
    std::uint32_t neuron;
    std::uint8_t up;
  };

  double input_from_visible(std::size_t i) const;
  void reschedule(std::size_t i, double now);
  void make_visible(std::size_t j, std::uint8_t up, double now);
  void refresh_inputs();

  // indexed binary heap over firing times
  void heap_set(std::size_t i, double t);
  void sift_up(std::size_t pos);
  void sift_down(std::size_t pos);

  IsingModel model_;
  std::vector<NeuronParams> params_;
  AsyncConfig config_;
  Rng rng_;
  double gap_;
  double sign_;
  std::vector<std::uint8_t> initial_;
  std::vector<std::uint8_t> up_;
  std::vector<std::uint8_t> visible_;
  std::vector<double> input_;
  std::vector<double> fire_time_;
  std::vector<std::uint32_t> heap_;
  std::vector<std::uint32_t> heap_pos_;
  std::deque<Pending> pending_;
  std::uint64_t events_ = 0;
  bool ran_ = false;
};

EventTrace run_async(const IsingModel& model, std::span<const NeuronParams> params,
                     const AsyncConfig& config);

struct SyncConfig {
  std::uint64_t updates = 1'000'000;
  std::uint64_t seed = 0;
  double lambda0 = 150e6;  // update clock; each update takes 1 / lambda0 seconds
  std::size_t record_every = 1;
  InitialState initial = UniformRandomStart{};
};

/// Called after every single-site update (flipped or not); return false to stop.
using UpdateObserver =
    std::function<bool(std::uint64_t update, double time, std::uint32_t neuron, bool flipped,
                       std::span<const std::uint8_t> bits)>;

/// Synchronous random-scan Gibbs sampler: on every clock tick one uniformly
/// chosen site is redrawn from its (hardware-modified) conditional.
/// Clamped and dead sites consume their tick without changing.
class SyncSampler {
 public:
  SyncSampler(const IsingModel& model, std::span<const NeuronParams> params,
              const SyncConfig& config);

  /// Returns the number of updates performed.
  std::uint64_t run(const UpdateObserver& observer = {});

  std::span<const std::uint8_t> initial_bits() const noexcept { return initial_; }
  std::span<const std::uint8_t> bits() const noexcept { return up_; }

 private:
  IsingModel model_;
  std::vector<NeuronParams> params_;
  SyncConfig config_;
  Rng rng_;
  double gap_;
  double sign_;
  std::vector<std::uint8_t> initial_;
  std::vector<std::uint8_t> up_;
  std::vector<double> input_;
};

/// Snapshot after every `record_every` updates, plus the initial state.
SnapshotTrace run_sync_gibbs(const IsingModel& model, std::span<const NeuronParams> params,
                             const SyncConfig& config);

/// The same chain as run_sync_gibbs, recorded as flips at times k / lambda0.
EventTrace run_sync_events(const IsingModel& model, std::span<const NeuronParams> params,
                           const SyncConfig& config);

/// Output bits of a trace at time t (all events with time <= t applied).
std::vector<std::uint8_t> replay_at(const EventTrace& trace, double t);

struct ClockOptions {
  double rate = 300e6;               // sampler clock, Hz
  std::size_t rows_per_sample = 1;   // k: row groups scanned round-robin
  std::size_t row_width = 0;         // neurons per row; 0 = whole state is one row
  double duration = -1.0;            // < 0: use trace.final_time
};

/// Fixed-clock observation of an event trace. Snapshot m is taken at
/// t = m * k / rate; with k > 1 its row group g (rows r with r mod k == g)
/// is read at tick m * k + g, so each neuron is sampled at rate / k.
SnapshotTrace sample_clock(const EventTrace& trace, const ClockOptions& options);

/// Local field h_i computed from the other spins as they were at
/// t - tau (the initial state when t - tau < 0).
double stale_field(const EventTrace& trace, const IsingModel& model, std::size_t i, double t,
                   double tau);

}  // namespace passim

namespace passim {

/// Runs the asynchronous sampler and records `count` snapshots, the first
/// at t = burn_in and then every `period` seconds. The trace's events are
/// not stored.
SnapshotTrace sample_async(const IsingModel& model, std::span<const NeuronParams> params,
                           const AsyncConfig& base, double burn_in, double period,
                           std::size_t count);

}  // namespace passim
