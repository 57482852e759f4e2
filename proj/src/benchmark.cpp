#include "passim/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "passim/error.hpp"
#include "passim/parallel.hpp"
#include "passim/rng.hpp"
#include "passim/sampler.hpp"
#include "passim/stats.hpp"

namespace passim {

std::string to_string(ProblemKind kind) { return kind == ProblemKind::SK ? "sk" : "maxcut"; }

ProblemKind parse_problem_kind(std::string_view text) {
  if (text == "sk" || text == "SK") return ProblemKind::SK;
  if (text == "maxcut" || text == "MaxCut") return ProblemKind::MaxCut;
  throw InvalidInput("unknown problem kind '" + std::string(text) + "' (expected maxcut or sk)");
}

std::vector<BenchmarkInstance> generate_instances(const BenchmarkSuite& suite,
                                                  std::size_t exact_limit) {
  if (suite.sizes.empty() || suite.instances == 0 || suite.trials == 0) {
    throw InvalidInput("benchmark suite needs sizes, instances and trials");
  }
  if (!(suite.beta > 0.0) || !std::isfinite(suite.beta)) {
    throw InvalidInput("benchmark beta must be positive");
  }
  std::vector<BenchmarkInstance> out;
  const auto kind_tag = static_cast<std::uint64_t>(suite.kind);
  for (std::size_t n : suite.sizes) {
    for (std::size_t k = 0; k < suite.instances; ++k) {
      const std::uint64_t seed = derive_seed(suite.seed, {kind_tag, n, k});
      IsingModel problem = suite.kind == ProblemKind::SK
                               ? gen_sk(n, seed)
                               : maxcut_to_ising(gen_maxcut(n, 1.0, suite.weights, seed));
      IsingModel sampled = problem.scaled(suite.beta / std::sqrt(static_cast<double>(n)));
      Optimum opt = find_optimum(problem, derive_seed(seed, {0x0b7}), exact_limit);
      out.push_back({n, k, std::move(problem), std::move(sampled), std::move(opt)});
    }
  }
  return out;
}

EnergyTracker::EnergyTracker(const IsingModel& model, std::span<const std::uint8_t> bits)
    : model_(&model), energy_(passim::energy(model, state_from_bits(bits, model.domain()))) {}

void EnergyTracker::flipped(std::size_t i, std::uint8_t up, std::span<const std::uint8_t> bits) {
  const double lo = down_value(model_->domain());
  double h = model_->biases()[i];
  for (const auto& nb : model_->neighbors(i)) h += nb.weight * (bits[nb.index] ? 1.0 : lo);
  const double gap = up_gap(model_->domain());
  energy_ += sign_factor(model_->sign()) * h * (up ? gap : -gap);
}

TrialTimes run_trial(const IsingModel& sampled, double target_energy, const SpinState& initial,
                     double lambda0, double max_sweeps, std::uint64_t async_seed,
                     std::uint64_t sync_seed) {
  if (!(max_sweeps > 0) || !std::isfinite(max_sweeps)) throw InvalidInput("budget must be finite");
  const std::size_t n = sampled.size();
  const auto params = uniform_params(n, lambda0);
  const double threshold = target_energy + kSolutionTolerance;
  TrialTimes out;

  {
    AsyncConfig cfg;
    cfg.seed = async_seed;
    cfg.initial = initial;
    cfg.stop = StopAtTime{max_sweeps / lambda0};
    AsyncSampler sampler(sampled, params, cfg);
    EnergyTracker tracker(sampled, sampler.initial_bits());
    if (tracker.energy() <= threshold) {
      out.async_tts = 0.0;
    } else {
      sampler.run([&](const FlipEvent& e, std::span<const std::uint8_t> bits) {
        tracker.flipped(e.neuron, e.up, bits);
        if (tracker.energy() <= threshold) {
          out.async_tts = e.time;
          return false;
        }
        return true;
      });
    }
  }
  {
    SyncConfig cfg;
    cfg.seed = sync_seed;
    cfg.initial = initial;
    cfg.lambda0 = lambda0;
    cfg.updates = static_cast<std::uint64_t>(std::ceil(max_sweeps * static_cast<double>(n)));
    SyncSampler sampler(sampled, params, cfg);
    EnergyTracker tracker(sampled, sampler.initial_bits());
    if (tracker.energy() <= threshold) {
      out.sync_tts = 0.0;
    } else {
      sampler.run([&](std::uint64_t, double t, std::uint32_t i, bool flipped,
                      std::span<const std::uint8_t> bits) {
        if (!flipped) return true;
        tracker.flipped(i, bits[i], bits);
        if (tracker.energy() <= threshold) {
          out.sync_tts = t;
          return false;
        }
        return true;
      });
    }
  }
  return out;
}

BenchmarkResult run_scaling_benchmark(const BenchmarkSuite& suite, const BenchmarkOptions& options) {
  if (!(options.lambda0 > 0) || !std::isfinite(options.lambda0)) {
    throw InvalidInput("lambda0 must be positive and finite");
  }
  BenchmarkResult result;
  result.instances = generate_instances(suite, options.exact_limit);
  const std::size_t per_instance = suite.trials;
  result.trials.resize(result.instances.size() * per_instance);
  parallel_for(result.trials.size(), options.jobs, [&](std::size_t job) {
    const auto& inst = result.instances[job / per_instance];
    const std::size_t trial = job % per_instance;
    const std::uint64_t base = derive_seed(suite.seed, {static_cast<std::uint64_t>(suite.kind),
                                                        inst.size, inst.index, trial});
    Rng init_rng(derive_seed(base, {0}));
    SpinState initial(inst.size);
    for (auto& v : initial) v = init_rng.next() >> 63 ? 1 : -1;
    const double scale = suite.beta / std::sqrt(static_cast<double>(inst.size));
    const TrialTimes times =
        run_trial(inst.sampled, inst.optimum.energy * scale, initial, options.lambda0,
                  options.max_sweeps, derive_seed(base, {1}), derive_seed(base, {2}));
    result.trials[job] = {inst.size, inst.index, trial, times};
  });

  std::vector<std::vector<double>> async_samples(suite.sizes.size()), sync_samples(suite.sizes.size());
  for (const auto& rec : result.trials) {
    const std::size_t s =
        static_cast<std::size_t>(std::find(suite.sizes.begin(), suite.sizes.end(), rec.size) -
                                 suite.sizes.begin());
    if (rec.times.async_tts) {
      async_samples[s].push_back(*rec.times.async_tts);
    } else {
      ++result.async_misses;
    }
    if (rec.times.sync_tts) {
      sync_samples[s].push_back(*rec.times.sync_tts);
    } else {
      ++result.sync_misses;
    }
  }
  for (const auto& inst : result.instances) {
    if (!inst.optimum.exact) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "size %zu instance %zu: target is best-known energy %.12g",
                    inst.size, inst.index, inst.optimum.energy);
      result.diagnostics.emplace_back(buf);
    }
  }
  for (std::size_t s = 0; s < suite.sizes.size(); ++s) {
    if (async_samples[s].empty() || sync_samples[s].empty()) {
      throw NumericError("no trial reached the optimum at size " + std::to_string(suite.sizes[s]) +
                         "; raise the budget");
    }
  }
  const std::uint64_t boot = derive_seed(suite.seed, {0xb0075});
  result.async_report = fit_scaling(suite.sizes, async_samples, ScalingForm::AeB,
                                    options.bootstrap, derive_seed(boot, {0}), options.jobs);
  result.async_over_n = fit_scaling(suite.sizes, async_samples, ScalingForm::AoverN,
                                    options.bootstrap, derive_seed(boot, {1}), options.jobs);
  result.sync_report = fit_scaling(suite.sizes, sync_samples, ScalingForm::AeB, options.bootstrap,
                                   derive_seed(boot, {2}), options.jobs);
  return result;
}

std::string format_benchmark_trials(const BenchmarkResult& result,
                                    const std::vector<std::string>& header) {
  std::string out;
  for (const auto& h : header) out += "# " + h + "\n";
  out += "size,instance,trial,engine,tts\n";
  char buf[128];
  const auto row = [&](const TrialRecord& r, const char* engine, const std::optional<double>& t) {
    if (t) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%s,%.17g\n", r.size, r.instance, r.trial, engine, *t);
    } else {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%s,nan\n", r.size, r.instance, r.trial, engine);
    }
    out += buf;
  };
  for (const auto& r : result.trials) {
    row(r, "async", r.times.async_tts);
    row(r, "sync", r.times.sync_tts);
  }
  return out;
}

}  // namespace passim
