#include "passim/cd_training.hpp"

#include <algorithm>
#include <cmath>

#include "passim/error.hpp"
#include "passim/parallel.hpp"
#include "passim/rng.hpp"
#include "passim/sampler.hpp"
#include "passim/topology.hpp"

namespace passim {
namespace {

void require_zero_one(const IsingModel& model) {
  if (model.domain() != SpinDomain::ZeroOne) {
    throw InvalidInput("contrastive divergence expects a {0,1}-domain model");
  }
}

Moments snapshot_moments(const IsingModel& model, const std::vector<SnapshotTrace>& traces) {
  Moments m;
  m.pair.assign(model.couplings().size(), 0.0);
  m.single.assign(model.size(), 0.0);
  std::vector<std::uint64_t> pair_count(m.pair.size(), 0), single_count(m.single.size(), 0);
  std::size_t total = 0;
  for (const auto& tr : traces) {
    for (std::size_t k = 0; k < tr.count(); ++k) {
      const auto s = tr.snapshot(k);
      for (std::size_t i = 0; i < s.size(); ++i) single_count[i] += s[i];
      for (std::size_t c = 0; c < m.pair.size(); ++c) {
        const auto& cp = model.couplings()[c];
        pair_count[c] += s[cp.i] & s[cp.j];
      }
    }
    total += tr.count();
  }
  for (std::size_t c = 0; c < m.pair.size(); ++c) m.pair[c] = double(pair_count[c]) / double(total);
  for (std::size_t i = 0; i < m.single.size(); ++i) m.single[i] = double(single_count[i]) / double(total);
  return m;
}

SnapshotTrace run_chain(const IsingModel& model, std::span<const NeuronParams> params,
                        double lambda0, double burn_in_events, double spacing, std::size_t count,
                        std::uint64_t seed) {
  AsyncConfig cfg;
  cfg.seed = seed;
  return sample_async(model, params, cfg, burn_in_events / lambda0, spacing / lambda0, count);
}

}  // namespace

Moments data_moments(const IsingModel& model, std::span<const std::vector<std::uint8_t>> batch) {
  require_zero_one(model);
  if (batch.empty()) throw InvalidInput("empty training batch");
  std::vector<std::uint64_t> pair_count(model.couplings().size(), 0), single_count(model.size(), 0);
  for (const auto& img : batch) {
    if (img.size() != model.size()) throw InvalidInput("training image size does not match model");
    for (std::size_t i = 0; i < img.size(); ++i) single_count[i] += img[i] ? 1 : 0;
    for (std::size_t c = 0; c < pair_count.size(); ++c) {
      const auto& cp = model.couplings()[c];
      pair_count[c] += (img[cp.i] && img[cp.j]) ? 1 : 0;
    }
  }
  const double b = static_cast<double>(batch.size());
  Moments m;
  for (auto v : pair_count) m.pair.push_back(static_cast<double>(v) / b);
  for (auto v : single_count) m.single.push_back(static_cast<double>(v) / b);
  return m;
}

Moments model_moments(const IsingModel& model, std::span<const NeuronParams> params,
                      const TrainConfig& config, std::uint64_t seed) {
  require_zero_one(model);
  if (config.chains == 0 || config.model_samples == 0) {
    throw InvalidInput("model expectation needs at least one chain and one sample");
  }
  const std::size_t per_chain = (config.model_samples + config.chains - 1) / config.chains;
  std::vector<SnapshotTrace> traces(config.chains);
  parallel_for(config.chains, config.jobs, [&](std::size_t c) {
    traces[c] = run_chain(model, params, config.lambda0, config.burn_in_events,
                          config.sample_spacing, per_chain, derive_seed(seed, {c}));
  });
  return snapshot_moments(model, traces);
}

Moments model_moments(const IsingModel& model, const TrainConfig& config, std::uint64_t seed) {
  const auto params = uniform_params(model.size(), config.lambda0);
  return model_moments(model, params, config, seed);
}

IsingModel apply_cd_update(const IsingModel& model, const Moments& data, const Moments& sampled,
                           double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInput("learning rate must be >= 0");
  const auto& cs = model.couplings();
  if (data.pair.size() != cs.size() || sampled.pair.size() != cs.size() ||
      data.single.size() != model.size() || sampled.single.size() != model.size()) {
    throw InvalidInput("moment vectors do not match the model support");
  }
  // Energy is -sum w s s - sum b s under the ferromagnetic sign, so raising w
  // raises E[s_i s_j]. Under the literal sign the update direction flips.
  const double dir = model.sign() == EnergySign::Ferromagnetic ? 1.0 : -1.0;
  std::vector<double> w(cs.size()), b(model.size());
  for (std::size_t c = 0; c < cs.size(); ++c) {
    w[c] = cs[c].weight + dir * alpha * (data.pair[c] - sampled.pair[c]);
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    b[i] = model.biases()[i] + dir * alpha * (data.single[i] - sampled.single[i]);
  }
  return model.with_parameters(w, b);
}

IsingModel cd_step(const IsingModel& model, std::span<const std::vector<std::uint8_t>> batch,
                   const TrainConfig& config, std::uint64_t seed) {
  const Moments d = data_moments(model, batch);
  const Moments m = model_moments(model, config, seed);
  return apply_cd_update(model, d, m, config.alpha);
}

IsingModel train(const IsingModel& model, std::span<const std::vector<std::uint8_t>> data,
                 const TrainConfig& config, const EpochCallback& on_epoch) {
  require_zero_one(model);
  if (data.empty()) throw InvalidInput("training set is empty");
  if (config.batch_size == 0) throw InvalidInput("batch size must be >= 1");
  if (!(config.alpha >= 0.0)) throw InvalidInput("learning rate must be >= 0");
  IsingModel current = model;
  std::uint64_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const double alpha = config.decay && epoch > 1 ? config.alpha / static_cast<double>(epoch) : config.alpha;
    EpochStats stats;
    stats.epoch = epoch;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < data.size(); start += config.batch_size, ++step) {
      const auto batch = data.subspan(start, std::min(config.batch_size, data.size() - start));
      const Moments d = data_moments(current, batch);
      const Moments m = model_moments(current, config, derive_seed(config.seed, {step}));
      double gap = 0;
      for (std::size_t c = 0; c < d.pair.size(); ++c) gap += std::abs(d.pair[c] - m.pair[c]);
      for (std::size_t i = 0; i < d.single.size(); ++i) gap += std::abs(d.single[i] - m.single[i]);
      const double terms = static_cast<double>(d.pair.size() + d.single.size());
      stats.mean_abs_gap += gap / terms;
      stats.mean_abs_dw += alpha * gap / terms;
      current = apply_cd_update(current, d, m, alpha);
      ++batches;

      double wsum = 0;
      for (const auto& c : current.couplings()) wsum += std::abs(c.weight);
      for (double v : current.biases()) wsum += std::abs(v);
      stats.mean_abs_weight = wsum / terms;
      if (!(stats.mean_abs_weight <= config.max_mean_abs_weight)) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": mean |w| = " +
                           std::to_string(stats.mean_abs_weight) + " exceeds bound " +
                           std::to_string(config.max_mean_abs_weight));
      }
    }
    stats.mean_abs_gap /= static_cast<double>(batches);
    stats.mean_abs_dw /= static_cast<double>(batches);
    if (on_epoch) on_epoch(stats);
  }
  return current;
}

IsingModel blank_grid_model(std::size_t rows, std::size_t cols) {
  return build_kings_grid(
      rows, cols, [](Cell, Cell) { return 0.0; }, [](Cell) { return 0.0; }, SpinDomain::ZeroOne,
      EnergySign::Ferromagnetic);
}

std::vector<double> mean_activation(const IsingModel& model, std::span<const NeuronParams> params,
                                    const SampleConfig& config) {
  if (config.samples == 0) throw InvalidInput("sample budget must be >= 1");
  const auto tr = run_chain(model, params, config.lambda0, config.burn_in_events,
                            config.sample_spacing, config.samples, config.seed);
  std::vector<double> m(model.size(), 0.0);
  for (std::size_t k = 0; k < tr.count(); ++k) {
    const auto s = tr.snapshot(k);
    for (std::size_t i = 0; i < s.size(); ++i) m[i] += s[i];
  }
  for (auto& v : m) v /= static_cast<double>(tr.count());
  return m;
}

std::vector<double> mean_activation(const IsingModel& model, const SampleConfig& config) {
  return mean_activation(model, uniform_params(model.size(), config.lambda0), config);
}

Reconstruction reconstruct(const IsingModel& model, std::span<const std::uint8_t> mask,
                           std::span<const std::uint8_t> values, const SampleConfig& config) {
  const std::size_t n = model.size();
  if (mask.size() != n || values.size() != n) {
    throw InvalidInput("clamp mask and values must match the model size");
  }
  Reconstruction out;
  if (std::all_of(mask.begin(), mask.end(), [](std::uint8_t v) { return v != 0; })) {
    out.completion.assign(values.begin(), values.end());
    for (auto& v : out.completion) v = v ? 1 : 0;
    out.marginals.assign(out.completion.begin(), out.completion.end());
    return out;
  }
  auto params = uniform_params(n, config.lambda0);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i]) params[i].clamp = values[i] ? Clamp::One : Clamp::Zero;
  }
  out.marginals = mean_activation(model, params, config);
  out.completion.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.completion[i] = out.marginals[i] >= 0.5 ? 1 : 0;
  return out;
}

}  // namespace passim
