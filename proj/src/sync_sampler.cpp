#include <cmath>
#include <string>

#include "passim/error.hpp"
#include "passim/sampler.hpp"

namespace passim {

SyncSampler::SyncSampler(const IsingModel& model, std::span<const NeuronParams> params,
                         const SyncConfig& config)
    : model_(model),
      params_(params.begin(), params.end()),
      config_(config),
      rng_(config.seed),
      gap_(up_gap(model.domain())),
      sign_(sign_factor(model.sign())) {
  if (params.size() != model.size()) {
    throw InvalidInput("neuron parameter count " + std::to_string(params.size()) +
                       " does not match model size " + std::to_string(model.size()));
  }
  for (const auto& p : params_) validate(p);
  if (!(config.lambda0 > 0.0) || !std::isfinite(config.lambda0)) {
    throw InvalidInput("sync clock rate must be positive and finite");
  }
  if (config.record_every == 0) throw InvalidInput("record_every must be >= 1");
  initial_ = make_initial_bits(model_, params_, config.initial, rng_);
  up_ = initial_;
  const double lo = down_value(model.domain());
  input_.assign(model.size(), 0.0);
  for (std::size_t i = 0; i < model.size(); ++i) {
    double h = model.biases()[i];
    for (const auto& nb : model.neighbors(i)) h += nb.weight * (up_[nb.index] ? 1.0 : lo);
    input_[i] = -gap_ * sign_ * h;
  }
}

std::uint64_t SyncSampler::run(const UpdateObserver& observer) {
  const std::size_t n = model_.size();
  const double dt = 1.0 / config_.lambda0;
  std::uint64_t k = 0;
  while (k < config_.updates) {
    const auto i = static_cast<std::uint32_t>(rng_.below(n));
    const auto& p = params_[i];
    bool flipped = false;
    if (!p.frozen()) {
      const double p_up = p.activation(input_[i]);
      if (!std::isfinite(p_up)) throw NumericError("non-finite activation for neuron " + std::to_string(i));
      const std::uint8_t next = rng_.uniform() < p_up ? 1 : 0;
      if (next != up_[i]) {
        up_[i] = next;
        flipped = true;
        const double dval = next ? gap_ : -gap_;
        for (const auto& nb : model_.neighbors(i)) input_[nb.index] += -gap_ * sign_ * nb.weight * dval;
      }
    }
    ++k;
    if (observer && !observer(k, static_cast<double>(k) * dt, i, flipped, up_)) break;
  }
  return k;
}

SnapshotTrace run_sync_gibbs(const IsingModel& model, std::span<const NeuronParams> params,
                             const SyncConfig& config) {
  SyncSampler sampler(model, params, config);
  SnapshotTrace out;
  out.n = model.size();
  out.period = static_cast<double>(config.record_every) / config.lambda0;
  out.lambda0 = config.lambda0;
  out.seed = config.seed;
  out.bits.reserve((config.updates / config.record_every + 1) * out.n);
  out.bits.insert(out.bits.end(), sampler.initial_bits().begin(), sampler.initial_bits().end());
  sampler.run([&](std::uint64_t k, double, std::uint32_t, bool, std::span<const std::uint8_t> bits) {
    if (k % config.record_every == 0) out.bits.insert(out.bits.end(), bits.begin(), bits.end());
    return true;
  });
  return out;
}

EventTrace run_sync_events(const IsingModel& model, std::span<const NeuronParams> params,
                           const SyncConfig& config) {
  SyncSampler sampler(model, params, config);
  EventTrace trace;
  trace.initial.assign(sampler.initial_bits().begin(), sampler.initial_bits().end());
  const std::uint64_t done =
      sampler.run([&](std::uint64_t, double t, std::uint32_t i, bool flipped,
                      std::span<const std::uint8_t> bits) {
        if (flipped) trace.events.push_back({t, i, bits[i]});
        return true;
      });
  trace.final_time = static_cast<double>(done) / config.lambda0;
  trace.lambda0 = config.lambda0;
  trace.seed = config.seed;
  return trace;
}

}  // namespace passim
