#include "passim/delay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "passim/error.hpp"
#include "passim/exact.hpp"
#include "passim/parallel.hpp"
#include "passim/sampler.hpp"
#include "passim/stats.hpp"

namespace passim {

bool DelayStudy::non_decreasing(double z) const {
  const DelayPoint* prev = &baseline;
  for (const auto& p : points) {
    const double se = std::hypot(prev->stderr_tv, p.stderr_tv);
    if (p.mean_tv < prev->mean_tv - z * se) return false;
    prev = &p;
  }
  return true;
}

DelayStudy run_delay_study(const IsingModel& model, const DelayStudyConfig& config) {
  if (!(config.lambda0 > 0.0) || !std::isfinite(config.lambda0)) {
    throw InvalidInput("lambda0 must be positive and finite");
  }
  if (config.replicates == 0 || config.events == 0) {
    throw InvalidInput("delay study needs at least one replicate and one event");
  }
  for (double r : config.ratios) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("delay ratios must be positive and finite");
  }
  const auto exact = exact_distribution(model);

  DelayStudy study;
  study.tau_acf = 1.0 / config.lambda0;
  study.tv_threshold = config.tv_threshold;
  std::vector<double> ratios = config.ratios;
  std::sort(ratios.begin(), ratios.end(), std::greater<>());
  ratios.erase(std::unique(ratios.begin(), ratios.end()), ratios.end());

  std::vector<DelayPoint> all(ratios.size() + 1);
  all[0].ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    all[k + 1].ratio = ratios[k];
    all[k + 1].tau_circ = study.tau_acf / ratios[k];
  }
  for (auto& p : all) p.tv.assign(config.replicates, 0.0);

  const auto params = uniform_params(model.size(), config.lambda0);
  parallel_for(all.size() * config.replicates, static_cast<unsigned>(config.jobs), [&](std::size_t job) {
    const std::size_t k = job / config.replicates, j = job % config.replicates;
    AsyncConfig cfg;
    cfg.stop = StopAfterEvents{config.events};
    cfg.seed = derive_seed(config.seed, {k, j});
    cfg.circuit_delay = all[k].tau_circ;
    const auto trace = run_async(model, params, cfg);
    all[k].tv[j] = tv_distance(occupancy_distribution(trace), exact.probabilities);
  });
  for (auto& p : all) {
    p.mean_tv = mean(p.tv);
    if (p.tv.size() > 1) {
      double ss = 0.0;
      for (double v : p.tv) ss += (v - p.mean_tv) * (v - p.mean_tv);
      p.stderr_tv = std::sqrt(ss / static_cast<double>(p.tv.size() - 1) / static_cast<double>(p.tv.size()));
    }
  }
  study.baseline = all[0];
  study.points.assign(all.begin() + 1, all.end());

  const DelayPoint* prev = nullptr;
  for (const auto& p : study.points) {
    if (p.mean_tv >= config.tv_threshold) {
      if (!prev) {
        study.breakpoint_ratio = p.ratio;
      } else {
        const double f = (config.tv_threshold - prev->mean_tv) / (p.mean_tv - prev->mean_tv);
        study.breakpoint_ratio =
            std::exp(std::log(prev->ratio) + f * (std::log(p.ratio) - std::log(prev->ratio)));
      }
      break;
    }
    prev = &p;
  }
  return study;
}

std::string format_delay_study(const DelayStudy& study) {
  std::string out = "ratio,tau_circ,mean_tv,stderr_tv";
  for (std::size_t j = 0; j < study.baseline.tv.size(); ++j) out += ",tv_" + std::to_string(j + 1);
  out += "\n";
  char buf[64];
  const auto row = [&](const DelayPoint& p) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6f,%.6f", p.ratio, p.tau_circ, p.mean_tv, p.stderr_tv);
    out += buf;
    for (double v : p.tv) {
      std::snprintf(buf, sizeof buf, ",%.6f", v);
      out += buf;
    }
    out += "\n";
  };
  row(study.baseline);
  for (const auto& p : study.points) row(p);
  return out;
}

}  // namespace passim
