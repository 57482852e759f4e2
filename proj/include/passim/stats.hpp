#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "passim/model.hpp"
#include "passim/sampler.hpp"

namespace passim {

/// (1/2) sum |p_i - q_i|. Both inputs must have equal size and sum to 1
/// within 1e-6.
double tv_distance(std::span<const double> p, std::span<const double> q);

/// KL(p || q) in nats; q_i = 0 where p_i > 0 gives +inf.
double kl_divergence(std::span<const double> p, std::span<const double> q);

double pearson(std::span<const double> a, std::span<const double> b);

/// Histogram of snapshot states over 2^n bins (n <= 24), normalized.
std::vector<double> empirical_distribution(const SnapshotTrace& trace);

/// Fraction of trace time spent in each of the 2^n states (n <= 24),
/// from t = 0 to final_time.
std::vector<double> occupancy_distribution(const EventTrace& trace);

struct AcfEstimate {
  std::vector<double> lags;    // seconds
  std::vector<double> values;  // normalized, values[0] = 1
  double rate = 0.0;           // fitted lambda: acf ~ exp(-rate * lag)
  std::size_t fit_points = 0;  // lags used by the fit

  double model(double lag) const;
};

/// Normalized autocorrelation of a uniformly sampled binary series at lags
/// 0, lag_step, 2 lag_step, ..., <= max_lag (in samples). Each lag uses all
/// available pairs (unbiased), centered on the global mean and divided by
/// the global variance. dt is the sample spacing in seconds.
///
/// The rate is fitted by least squares of log(acf) = -rate * lag over the
/// leading run of lags with acf above fit_floor; +inf when no lag past 0
/// is above it.
AcfEstimate autocorrelation(std::span<const std::uint8_t> series, double dt, std::size_t max_lag,
                            std::size_t lag_step = 1, double fit_floor = 0.05);

/// Resamples one neuron of an event trace at sample_rate (default
/// 10 * lambda0), then estimates as above. max_lag is in seconds.
AcfEstimate autocorrelation(const EventTrace& trace, std::size_t neuron, double max_lag,
                            double sample_rate = 0.0, std::size_t lag_step = 1,
                            double fit_floor = 0.05);

/// Energy tolerance for counting a state as a solution.
inline constexpr double kSolutionTolerance = 1e-9;

/// First time the replayed state has energy <= target + 1e-9; nullopt when
/// the trace ends first.
std::optional<double> time_to_solution(const EventTrace& trace, const IsingModel& model,
                                       double target_energy);

/// Kolmogorov-Smirnov statistic of samples against Exp(rate) and its
/// asymptotic p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_exponential(std::vector<double> samples, double rate);

/// Holding times (time between consecutive flips) of one neuron.
std::vector<double> holding_times(const EventTrace& trace, std::size_t neuron);

/// Percentile with linear interpolation between order statistics (q in [0, 1]).
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);
double mean(std::span<const double> values);

}  // namespace passim
