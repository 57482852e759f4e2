#include "passim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "passim/error.hpp"

namespace passim {
namespace {

void check_distribution(std::span<const double> p, const char* name) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidInput(std::string(name) + " has a negative or non-finite entry");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw InvalidInput(std::string(name) + " is not normalized (sum " + std::to_string(sum) + ")");
  }
}

constexpr std::size_t kMaxHistogramSpins = 24;

std::size_t histogram_size(std::size_t n) {
  if (n == 0 || n > kMaxHistogramSpins) {
    throw InvalidInput("state histogram needs 1 <= n <= 24, got " + std::to_string(n));
  }
  return std::size_t{1} << n;
}

std::uint64_t index_of(std::span<const std::uint8_t> bits) {
  std::uint64_t s = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k]) s |= std::uint64_t{1} << k;
  }
  return s;
}

}  // namespace

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidInput("distributions have different support sizes");
  check_distribution(p, "first distribution");
  check_distribution(q, "second distribution");
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) d += std::abs(p[k] - q[k]);
  return std::min(1.0, 0.5 * d);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidInput("distributions have different support sizes");
  check_distribution(p, "first distribution");
  check_distribution(q, "second distribution");
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) continue;
    if (q[k] == 0.0) return std::numeric_limits<double>::infinity();
    d += p[k] * std::log(p[k] / q[k]);
  }
  return std::max(0.0, d);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw InvalidInput("pearson needs equal sizes >= 2");
  const double ma = mean(a), mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  if (saa == 0 || sbb == 0) throw NumericError("pearson correlation of a constant vector");
  return sab / std::sqrt(saa * sbb);
}

std::vector<double> empirical_distribution(const SnapshotTrace& trace) {
  std::vector<double> h(histogram_size(trace.n), 0.0);
  const std::size_t count = trace.count();
  if (count == 0) throw InvalidInput("empty snapshot trace");
  for (std::size_t k = 0; k < count; ++k) h[index_of(trace.snapshot(k))] += 1.0;
  for (auto& v : h) v /= static_cast<double>(count);
  return h;
}

std::vector<double> occupancy_distribution(const EventTrace& trace) {
  std::vector<double> h(histogram_size(trace.size()), 0.0);
  if (!(trace.final_time > 0.0)) throw InvalidInput("trace has zero duration");
  std::uint64_t s = index_of(trace.initial);
  double t = 0.0;
  for (const auto& e : trace.events) {
    if (e.time > trace.final_time) break;
    h[s] += e.time - t;
    t = e.time;
    const std::uint64_t bit = std::uint64_t{1} << e.neuron;
    s = e.up ? (s | bit) : (s & ~bit);
  }
  h[s] += trace.final_time - t;
  for (auto& v : h) v /= trace.final_time;
  return h;
}

double AcfEstimate::model(double lag) const { return std::exp(-rate * lag); }

AcfEstimate autocorrelation(std::span<const std::uint8_t> series, double dt, std::size_t max_lag,
                            std::size_t lag_step, double fit_floor) {
  if (series.size() < 2) throw InvalidInput("autocorrelation needs at least two samples");
  if (lag_step == 0) throw InvalidInput("lag step must be >= 1");
  if (!(dt > 0.0)) throw InvalidInput("sample spacing must be positive");
  const std::size_t len = series.size();
  max_lag = std::min(max_lag, len - 1);
  double m = 0.0;
  for (auto b : series) m += b;
  m /= static_cast<double>(len);
  const double var = m * (1.0 - m);
  if (!(var > 0.0)) throw NumericError("autocorrelation of a constant series (zero variance)");

  AcfEstimate est;
  for (std::size_t lag = 0; lag <= max_lag; lag += lag_step) {
    double acc = 0.0;
    const std::size_t pairs = len - lag;
    for (std::size_t t = 0; t < pairs; ++t) acc += (series[t] - m) * (series[t + lag] - m);
    double v = lag == 0 ? 1.0 : acc / static_cast<double>(pairs) / var;
    est.lags.push_back(static_cast<double>(lag) * dt);
    est.values.push_back(std::clamp(v, -1.0, 1.0));
  }

  // Fit through the origin: minimize sum (log v_k + rate * lag_k)^2.
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 1; k < est.values.size(); ++k) {
    if (!(est.values[k] > fit_floor)) break;
    sxy += est.lags[k] * std::log(est.values[k]);
    sxx += est.lags[k] * est.lags[k];
    ++est.fit_points;
  }
  // nothing above the floor past lag 0: decorrelated within one step
  est.rate = est.fit_points == 0 ? std::numeric_limits<double>::infinity() : -sxy / sxx;
  return est;
}

AcfEstimate autocorrelation(const EventTrace& trace, std::size_t neuron, double max_lag,
                            double sample_rate, std::size_t lag_step, double fit_floor) {
  if (neuron >= trace.size()) throw InvalidInput("neuron index out of range");
  if (sample_rate <= 0.0) sample_rate = 10.0 * trace.lambda0;
  if (!(sample_rate > 0.0)) throw InvalidInput("sample rate unknown (trace has no lambda0)");
  const double dt = 1.0 / sample_rate;
  const auto count = static_cast<std::size_t>(std::floor(trace.final_time / dt)) + 1;
  std::vector<std::uint8_t> series(count);
  std::uint8_t cur = trace.initial[neuron];
  std::size_t e = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * dt;
    while (e < trace.events.size() && trace.events[e].time <= t) {
      if (trace.events[e].neuron == neuron) cur = trace.events[e].up;
      ++e;
    }
    series[k] = cur;
  }
  const auto lag_samples = static_cast<std::size_t>(std::llround(max_lag / dt));
  return autocorrelation(series, dt, lag_samples, lag_step, fit_floor);
}

std::optional<double> time_to_solution(const EventTrace& trace, const IsingModel& model,
                                       double target_energy) {
  if (trace.size() != model.size()) throw InvalidInput("trace and model sizes differ");
  const double threshold = target_energy + kSolutionTolerance;
  SpinState s = state_from_bits(trace.initial, model.domain());
  double e = energy(model, s);
  if (e <= threshold) return 0.0;
  const double gap = up_gap(model.domain());
  for (const auto& ev : trace.events) {
    const auto i = ev.neuron;
    const std::int8_t next = static_cast<std::int8_t>(ev.up ? up_value(model.domain())
                                                            : down_value(model.domain()));
    if (next == s[i]) continue;
    e += local_field(model, s, i) * (ev.up ? gap : -gap);
    s[i] = next;
    if (e <= threshold) {
      // guard against drift in the incremental sum
      if (energy(model, s) <= threshold) return ev.time;
      e = energy(model, s);
    }
  }
  return std::nullopt;
}

std::vector<double> holding_times(const EventTrace& trace, std::size_t neuron) {
  std::vector<double> out;
  double last = 0.0;
  bool seen = false;
  for (const auto& e : trace.events) {
    if (e.neuron != neuron) continue;
    if (seen) out.push_back(e.time - last);
    last = e.time;
    seen = true;
  }
  return out;
}

KsResult ks_exponential(std::vector<double> samples, double rate) {
  if (samples.empty()) throw InvalidInput("KS test needs samples");
  if (!(rate > 0.0)) throw InvalidInput("KS rate must be positive");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double f = 1.0 - std::exp(-rate * samples[k]);
    d = std::max({d, (static_cast<double>(k) + 1) / n - f, f - static_cast<double>(k) / n});
  }
  // Kolmogorov distribution with the Stephens small-sample correction.
  const double sn = std::sqrt(n);
  const double x = (sn + 0.12 + 0.11 / sn) * d;
  double p = 0.0;
  if (x < 0.2) {
    p = 1.0;
  } else {
    for (int j = 1; j <= 100; ++j) {
      const double term = std::exp(-2.0 * j * j * x * x);
      p += (j % 2 ? 2.0 : -2.0) * term;
      if (term < 1e-16) break;
    }
  }
  return {d, std::clamp(p, 0.0, 1.0)};
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidInput("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double mean(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace passim
