#include "passim/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "passim/error.hpp"
#include "passim/parallel.hpp"
#include "passim/rng.hpp"
#include "passim/stats.hpp"

namespace passim {

std::string to_string(ScalingForm form) { return form == ScalingForm::AeB ? "AeB" : "AoverN"; }

ScalingForm parse_scaling_form(std::string_view text) {
  if (text == "AeB" || text == "aeb") return ScalingForm::AeB;
  if (text == "AoverN" || text == "aovern") return ScalingForm::AoverN;
  throw InvalidInput("unknown scaling form '" + std::string(text) + "' (expected AeB or AoverN)");
}

double scaling_curve(ScalingForm form, double a, double b, double n) {
  const double base = a * std::exp(b * std::sqrt(n));
  return form == ScalingForm::AoverN ? base / n : base;
}

CurveFit fit_curve(ScalingForm form, const std::vector<double>& sizes,
                   const std::vector<double>& values) {
  const std::size_t m = sizes.size();
  if (m != values.size()) throw InvalidInput("sizes and values differ in length");
  {
    std::vector<double> distinct = sizes;
    std::sort(distinct.begin(), distinct.end());
    if (std::unique(distinct.begin(), distinct.end()) - distinct.begin() < 3) {
      throw InvalidInput("scaling fit needs at least 3 distinct sizes");
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (!(sizes[k] > 0) || !(values[k] > 0) || !std::isfinite(values[k])) {
      throw InvalidInput("scaling fit needs positive sizes and positive finite values");
    }
  }
  std::vector<double> x(m), g(m);
  for (std::size_t k = 0; k < m; ++k) {
    x[k] = std::sqrt(sizes[k]);
    g[k] = form == ScalingForm::AoverN ? 1.0 / sizes[k] : 1.0;
  }

  // Seed: ordinary regression of log(value / g) on sqrt(n).
  double la = 0.0, b = 0.0;
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const double y = std::log(values[k] / g[k]);
      sx += x[k];
      sy += y;
      sxx += x[k] * x[k];
      sxy += x[k] * y;
    }
    const double dm = static_cast<double>(m);
    b = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
    la = (sy - b * sx) / dm;
  }

  // Levenberg-Marquardt in (log A, B) so A stays positive.
  const auto residuals = [&](double la_, double b_) {
    std::vector<double> r(m);
    for (std::size_t k = 0; k < m; ++k) r[k] = g[k] * std::exp(la_ + b_ * x[k]) - values[k];
    return r;
  };
  const auto cost = [](const std::vector<double>& r) {
    double c = 0;
    for (double v : r) c += v * v;
    return c;
  };
  std::vector<double> r = residuals(la, b);
  double c = cost(r);
  double lambda = 1e-3;
  constexpr int kMaxIterations = 10000;
  constexpr double kStepTolerance = 1e-10;
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    double j00 = 0, j01 = 0, j11 = 0, g0 = 0, g1 = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const double f = g[k] * std::exp(la + b * x[k]);
      const double da = f, db = f * x[k];
      j00 += da * da;
      j01 += da * db;
      j11 += db * db;
      g0 += da * r[k];
      g1 += db * r[k];
    }
    if (c == 0.0) return {std::exp(la), b, iter, r};
    double step_a = 0, step_b = 0;
    bool accepted = false;
    while (lambda < 1e30) {
      const double a00 = j00 * (1 + lambda), a11 = j11 * (1 + lambda);
      const double det = a00 * a11 - j01 * j01;
      if (det > 0) {
        step_a = -(a11 * g0 - j01 * g1) / det;
        step_b = -(a00 * g1 - j01 * g0) / det;
        auto rn = residuals(la + step_a, b + step_b);
        const double cn = cost(rn);
        if (std::isfinite(cn) && cn <= c) {
          la += step_a;
          b += step_b;
          r = std::move(rn);
          c = cn;
          lambda = std::max(lambda * 0.3, 1e-12);
          accepted = true;
          break;
        }
      }
      lambda *= 10;
    }
    const bool tiny = std::abs(step_a) <= kStepTolerance * (1 + std::abs(la)) &&
                      std::abs(step_b) <= kStepTolerance * (1 + std::abs(b));
    // A rejected step at huge damping means no descent direction is left.
    if (!accepted || tiny) return {std::exp(la), b, iter, r};
  }
  std::ostringstream msg;
  msg << "scaling fit did not converge in " << kMaxIterations << " iterations; residuals:";
  for (double v : r) msg << ' ' << v;
  throw NumericError(msg.str());
}

std::vector<double> ScalingReport::mean_per_size() const {
  std::vector<double> out;
  for (const auto& s : samples) out.push_back(mean(s));
  return out;
}

std::vector<double> ScalingReport::median_per_size() const {
  std::vector<double> out;
  for (const auto& s : samples) out.push_back(median(s));
  return out;
}

namespace {

Interval percentile_interval(std::vector<double> v, double point) {
  Interval ci{quantile(v, 0.025), quantile(v, 0.975)};
  ci.lo = std::min(ci.lo, point);
  ci.hi = std::max(ci.hi, point);
  return ci;
}

}  // namespace

ScalingReport fit_scaling(std::vector<std::size_t> sizes, std::vector<std::vector<double>> samples,
                          ScalingForm form, std::size_t bootstrap_count, std::uint64_t seed,
                          unsigned jobs) {
  if (sizes.size() != samples.size()) throw InvalidInput("one sample list per size required");
  if (bootstrap_count == 0) throw InvalidInput("bootstrap count must be >= 1");
  for (const auto& s : samples) {
    if (s.empty()) throw InvalidInput("every size needs at least one sample");
    for (double v : s) {
      if (!(v >= 0) || !std::isfinite(v)) throw InvalidInput("samples must be finite and >= 0");
    }
  }
  ScalingReport rep;
  rep.sizes = std::move(sizes);
  rep.samples = std::move(samples);
  rep.form = form;
  rep.seed = seed;
  rep.resamples = bootstrap_count;
  std::vector<double> xs(rep.sizes.begin(), rep.sizes.end());
  const CurveFit point = fit_curve(form, xs, rep.mean_per_size());
  rep.a = point.a;
  rep.b = point.b;
  rep.residuals = point.residuals;

  std::vector<double> as(bootstrap_count), bs(bootstrap_count);
  std::vector<char> ok(bootstrap_count, 1);
  as[0] = point.a;
  bs[0] = point.b;
  parallel_for(bootstrap_count - 1, jobs, [&](std::size_t k) {
    const std::size_t r = k + 1;
    std::vector<double> means(rep.sizes.size());
    for (std::size_t s = 0; s < rep.sizes.size(); ++s) {
      Rng rng(derive_seed(seed, {r, s}));
      const auto& trials = rep.samples[s];
      double sum = 0;
      for (std::size_t t = 0; t < trials.size(); ++t) sum += trials[rng.below(trials.size())];
      means[s] = sum / static_cast<double>(trials.size());
    }
    try {
      const CurveFit f = fit_curve(form, xs, means);
      as[r] = f.a;
      bs[r] = f.b;
    } catch (const Error&) {
      ok[r] = 0;
    }
  });
  std::vector<double> av, bv;
  for (std::size_t r = 0; r < bootstrap_count; ++r) {
    if (!ok[r]) {
      ++rep.failed_resamples;
      continue;
    }
    av.push_back(as[r]);
    bv.push_back(bs[r]);
  }
  rep.a_ci = percentile_interval(av, rep.a);
  rep.b_ci = percentile_interval(bv, rep.b);
  return rep;
}

std::string format_scaling_report(const ScalingReport& rep, const std::vector<std::string>& header) {
  std::string out = "# passim scaling report\n";
  for (const auto& h : header) out += "# " + h + "\n";
  char buf[256];
  const auto line = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
  };
  line("# form %s\n", to_string(rep.form).c_str());
  line("# A %.17g\n", rep.a);
  line("# B %.17g\n", rep.b);
  line("# A_ci95 %.17g %.17g\n", rep.a_ci.lo, rep.a_ci.hi);
  line("# B_ci95 %.17g %.17g\n", rep.b_ci.lo, rep.b_ci.hi);
  line("# bootstrap %zu\n", rep.resamples);
  line("# failed_resamples %zu\n", rep.failed_resamples);
  line("# bootstrap_seed %llu\n", static_cast<unsigned long long>(rep.seed));
  const auto means = rep.mean_per_size();
  const auto medians = rep.median_per_size();
  for (std::size_t s = 0; s < rep.sizes.size(); ++s) {
    line("# size %zu mean %.17g median %.17g trials %zu\n", rep.sizes[s], means[s], medians[s],
         rep.samples[s].size());
  }
  out += "size,trial,tts\n";
  for (std::size_t s = 0; s < rep.sizes.size(); ++s) {
    for (std::size_t t = 0; t < rep.samples[s].size(); ++t) {
      line("%zu,%zu,%.17g\n", rep.sizes[s], t, rep.samples[s][t]);
    }
  }
  return out;
}

ScalingReport parse_scaling_report(std::string_view text) {
  ScalingReport rep;
  std::map<std::size_t, std::vector<double>> by_size;
  std::istringstream in{std::string(text)};
  std::string line;
  bool table = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      ls >> key;
      if (key == "form") {
        std::string f;
        ls >> f;
        rep.form = parse_scaling_form(f);
      } else if (key == "A") {
        ls >> rep.a;
      } else if (key == "B") {
        ls >> rep.b;
      } else if (key == "A_ci95") {
        ls >> rep.a_ci.lo >> rep.a_ci.hi;
      } else if (key == "B_ci95") {
        ls >> rep.b_ci.lo >> rep.b_ci.hi;
      } else if (key == "bootstrap") {
        ls >> rep.resamples;
      } else if (key == "failed_resamples") {
        ls >> rep.failed_resamples;
      } else if (key == "bootstrap_seed") {
        ls >> rep.seed;
      }
      continue;
    }
    if (!table) {
      if (line != "size,trial,tts") throw InvalidInput("scaling report: expected 'size,trial,tts'");
      table = true;
      continue;
    }
    std::size_t size = 0, trial = 0;
    double tts = 0;
    if (std::sscanf(line.c_str(), "%zu,%zu,%lf", &size, &trial, &tts) != 3) {
      throw InvalidInput("scaling report: malformed row '" + line + "'");
    }
    by_size[size].push_back(tts);
  }
  for (auto& [size, v] : by_size) {
    rep.sizes.push_back(size);
    rep.samples.push_back(std::move(v));
  }
  return rep;
}

}  // namespace passim
