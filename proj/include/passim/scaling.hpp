#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace passim {

enum class ScalingForm {
  AeB,      // A * exp(B * sqrt(n))
  AoverN,   // A / n * exp(B * sqrt(n))
};

std::string to_string(ScalingForm form);
ScalingForm parse_scaling_form(std::string_view text);

/// Scaling function value at size n.
double scaling_curve(ScalingForm form, double a, double b, double n);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  bool disjoint(const Interval& o) const noexcept { return hi < o.lo || o.hi < lo; }
};

struct CurveFit {
  double a = 0.0;
  double b = 0.0;
  int iterations = 0;
  std::vector<double> residuals;  // fitted - observed, per size
};

/// Levenberg-Marquardt least squares of the curve to (size, value) pairs,
/// seeded by a log-linear fit of log(value) on sqrt(n). Converges when the
/// relative step drops below 1e-10; throws NumericError (listing residuals)
/// after 10^4 iterations.
CurveFit fit_curve(ScalingForm form, const std::vector<double>& sizes,
                   const std::vector<double>& values);

struct ScalingReport {
  std::vector<std::size_t> sizes;
  std::vector<std::vector<double>> samples;  // per size, seconds
  ScalingForm form = ScalingForm::AeB;
  double a = 0.0;
  double b = 0.0;
  Interval a_ci;
  Interval b_ci;
  std::size_t resamples = 0;
  std::size_t failed_resamples = 0;
  std::uint64_t seed = 0;
  std::vector<double> residuals;

  std::vector<double> mean_per_size() const;
  std::vector<double> median_per_size() const;
};

/// Fits the curve to mean time per size and bootstraps 95% percentile CIs.
/// Resample 0 is the observed data; resamples 1..count-1 redraw the trials
/// of every size independently with replacement, each with its own derived
/// seed. CIs are widened if needed to contain the point estimate.
ScalingReport fit_scaling(std::vector<std::size_t> sizes, std::vector<std::vector<double>> samples,
                          ScalingForm form, std::size_t bootstrap_count, std::uint64_t seed,
                          unsigned jobs = 1);

/// Text form: '#' summary block, then "size,trial,tts" rows.
std::string format_scaling_report(const ScalingReport& report,
                                  const std::vector<std::string>& header = {});
/// Reads back the samples and summary written by format_scaling_report.
ScalingReport parse_scaling_report(std::string_view text);

}  // namespace passim
