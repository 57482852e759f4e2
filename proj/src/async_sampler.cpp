#include <cmath>
#include <limits>
#include <string>

#include "passim/error.hpp"
#include "passim/sampler.hpp"

namespace passim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kRefreshInterval = 1U << 20;

std::vector<NeuronParams> checked_params(const IsingModel& model,
                                         std::span<const NeuronParams> params) {
  if (params.size() != model.size()) {
    throw InvalidInput("neuron parameter count " + std::to_string(params.size()) +
                       " does not match model size " + std::to_string(model.size()));
  }
  for (const auto& p : params) validate(p);
  return {params.begin(), params.end()};
}

}  // namespace

std::vector<std::uint8_t> make_initial_bits(const IsingModel& model,
                                            std::span<const NeuronParams> params,
                                            const InitialState& initial, Rng& rng) {
  const std::size_t n = model.size();
  std::vector<std::uint8_t> up(n, 0);
  if (const auto* given = std::get_if<SpinState>(&initial)) {
    check_state(model, *given);
    up = bits_from_state(*given, model.domain());
  } else if (std::holds_alternative<UniformRandomStart>(initial)) {
    for (auto& b : up) b = static_cast<std::uint8_t>(rng.next() >> 63);
  }
  for (std::size_t k = 0; k < n && k < params.size(); ++k) {
    if (params[k].clamp == Clamp::One) up[k] = 1;
    if (params[k].clamp == Clamp::Zero) up[k] = 0;
  }
  return up;
}

AsyncSampler::AsyncSampler(const IsingModel& model, std::span<const NeuronParams> params,
                           const AsyncConfig& config)
    : model_(model),
      params_(checked_params(model, params)),
      config_(config),
      rng_(config.seed),
      gap_(up_gap(model.domain())),
      sign_(sign_factor(model.sign())) {
  if (!(config.circuit_delay >= 0.0) || !std::isfinite(config.circuit_delay)) {
    throw InvalidInput("circuit delay must be finite and >= 0");
  }
  if (const auto* st = std::get_if<StopAtTime>(&config.stop); st && !(st->seconds >= 0.0)) {
    throw InvalidInput("stop time must be >= 0");
  }
  const std::size_t n = model.size();
  initial_ = make_initial_bits(model_, params_, config.initial, rng_);
  up_ = initial_;
  visible_ = initial_;
  input_.assign(n, 0.0);
  refresh_inputs();
  fire_time_.assign(n, kInf);
  heap_.resize(n);
  heap_pos_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    heap_[k] = static_cast<std::uint32_t>(k);
    heap_pos_[k] = static_cast<std::uint32_t>(k);
  }
  for (std::size_t k = 0; k < n; ++k) reschedule(k, 0.0);
}

double AsyncSampler::input_from_visible(std::size_t i) const {
  const double lo = down_value(model_.domain());
  double h = model_.biases()[i];
  for (const auto& nb : model_.neighbors(i)) h += nb.weight * (visible_[nb.index] ? 1.0 : lo);
  return -gap_ * sign_ * h;
}

void AsyncSampler::refresh_inputs() {
  for (std::size_t k = 0; k < model_.size(); ++k) input_[k] = input_from_visible(k);
}

void AsyncSampler::reschedule(std::size_t i, double now) {
  const auto& p = params_[i];
  double t = kInf;
  if (!p.frozen()) {
    const double p_up = p.activation(input_[i]);
    const double rate = p.lambda0 * (up_[i] ? 1.0 - p_up : p_up);
    if (!std::isfinite(rate) || rate < 0.0) {
      throw NumericError("non-finite flip rate for neuron " + std::to_string(i));
    }
    if (rate > 0.0) t = now + rng_.exponential(rate);
  }
  heap_set(i, t);
}

void AsyncSampler::make_visible(std::size_t j, std::uint8_t up, double now) {
  if (visible_[j] == up) return;
  visible_[j] = up;
  const double dval = up ? gap_ : -gap_;
  for (const auto& nb : model_.neighbors(j)) {
    input_[nb.index] += -gap_ * sign_ * nb.weight * dval;
    reschedule(nb.index, now);
  }
}

double AsyncSampler::run(const FlipObserver& observer) {
  if (ran_) throw InvalidInput("AsyncSampler::run may only be called once");
  ran_ = true;
  const auto* stop_time = std::get_if<StopAtTime>(&config_.stop);
  const auto* stop_events = std::get_if<StopAfterEvents>(&config_.stop);
  const double t_max = stop_time ? stop_time->seconds : kInf;
  const std::uint64_t max_events =
      stop_events ? stop_events->events : std::numeric_limits<std::uint64_t>::max();
  const double tau = config_.circuit_delay;

  double last = 0.0;
  while (events_ < max_events) {
    const double t_fire = heap_.empty() ? kInf : fire_time_[heap_[0]];
    const double t_vis = pending_.empty() ? kInf : pending_.front().time;
    if (std::min(t_fire, t_vis) > t_max || (t_fire == kInf && t_vis == kInf)) break;
    if (t_vis <= t_fire) {
      const Pending p = pending_.front();
      pending_.pop_front();
      make_visible(p.neuron, p.up, p.time);
      continue;
    }
    const std::uint32_t i = heap_[0];
    const double t = t_fire;
    up_[i] ^= 1U;
    ++events_;
    last = t;
    if (tau == 0.0) {
      make_visible(i, up_[i], t);
    } else {
      pending_.push_back({t + tau, i, up_[i]});
    }
    reschedule(i, t);
    if ((events_ & (kRefreshInterval - 1)) == 0) refresh_inputs();
    if (observer && !observer(FlipEvent{t, i, up_[i]}, up_)) break;
  }
  return stop_time ? t_max : last;
}

void AsyncSampler::heap_set(std::size_t i, double t) {
  const double old = fire_time_[i];
  fire_time_[i] = t;
  if (t < old) {
    sift_up(heap_pos_[i]);
  } else if (t > old) {
    sift_down(heap_pos_[i]);
  }
}

void AsyncSampler::sift_up(std::size_t pos) {
  const std::uint32_t item = heap_[pos];
  const double key = fire_time_[item];
  while (pos > 0) {
    const std::size_t parent = (pos - 1) / 2;
    if (fire_time_[heap_[parent]] <= key) break;
    heap_[pos] = heap_[parent];
    heap_pos_[heap_[pos]] = static_cast<std::uint32_t>(pos);
    pos = parent;
  }
  heap_[pos] = item;
  heap_pos_[item] = static_cast<std::uint32_t>(pos);
}

void AsyncSampler::sift_down(std::size_t pos) {
  const std::size_t size = heap_.size();
  const std::uint32_t item = heap_[pos];
  const double key = fire_time_[item];
  while (true) {
    std::size_t child = 2 * pos + 1;
    if (child >= size) break;
    if (child + 1 < size && fire_time_[heap_[child + 1]] < fire_time_[heap_[child]]) ++child;
    if (fire_time_[heap_[child]] >= key) break;
    heap_[pos] = heap_[child];
    heap_pos_[heap_[pos]] = static_cast<std::uint32_t>(pos);
    pos = child;
  }
  heap_[pos] = item;
  heap_pos_[item] = static_cast<std::uint32_t>(pos);
}

EventTrace run_async(const IsingModel& model, std::span<const NeuronParams> params,
                     const AsyncConfig& config) {
  AsyncSampler sampler(model, params, config);
  EventTrace trace;
  trace.initial.assign(sampler.initial_bits().begin(), sampler.initial_bits().end());
  trace.final_time = sampler.run([&](const FlipEvent& e, std::span<const std::uint8_t>) {
    trace.events.push_back(e);
    return true;
  });
  trace.seed = config.seed;
  trace.tau_circ = config.circuit_delay;
  trace.lambda0 = params.empty() ? 0.0 : params[0].lambda0;
  return trace;
}

}  // namespace passim

namespace passim {

SnapshotTrace sample_async(const IsingModel& model, std::span<const NeuronParams> params,
                           const AsyncConfig& base, double burn_in, double period,
                           std::size_t count) {
  if (!(burn_in >= 0.0) || !(period > 0.0) || count == 0) {
    throw InvalidInput("snapshot schedule needs burn_in >= 0, period > 0 and count >= 1");
  }
  AsyncConfig cfg = base;
  cfg.stop = StopAtTime{burn_in + period * static_cast<double>(count - 1)};
  AsyncSampler sampler(model, params, cfg);
  SnapshotTrace out;
  out.n = model.size();
  out.period = period;
  out.lambda0 = params.empty() ? 0.0 : params[0].lambda0;
  out.seed = cfg.seed;
  out.tau_circ = cfg.circuit_delay;
  out.bits.reserve(count * out.n);
  std::vector<std::uint8_t> current(sampler.initial_bits().begin(), sampler.initial_bits().end());
  std::size_t taken = 0;
  const auto next_time = [&] { return burn_in + period * static_cast<double>(taken); };
  sampler.run([&](const FlipEvent& e, std::span<const std::uint8_t>) {
    // snapshots strictly before this flip see the pre-flip state
    while (taken < count && next_time() < e.time) {
      out.bits.insert(out.bits.end(), current.begin(), current.end());
      ++taken;
    }
    current[e.neuron] = e.up;
    return true;
  });
  while (taken < count) {
    out.bits.insert(out.bits.end(), current.begin(), current.end());
    ++taken;
  }
  return out;
}

}  // namespace passim
