#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "passim/model.hpp"
#include "passim/neuron.hpp"

namespace passim {

struct TrainConfig {
  double alpha = 0.05;
  bool decay = false;  // alpha / epoch from the second epoch on
  std::size_t batch_size = 256;
  std::size_t epochs = 1;
  std::size_t model_samples = 500;  // snapshots per model expectation
  std::size_t chains = 1;           // independent chains pooled per step
  double lambda0 = 150e6;
  double burn_in_events = 10.0;     // expected updates per neuron before counting
  double sample_spacing = 1.0;      // expected updates per neuron between snapshots
  double max_mean_abs_weight = 50.0;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
};

/// First and second moments over the model's coupling support:
/// pair[k] = E[s_i s_j] for couplings()[k], single[i] = E[s_i].
struct Moments {
  std::vector<double> pair;
  std::vector<double> single;
};

/// Batch moments. For {0,1} data s_i s_j is the AND of the two bits, so
/// every entry is an integer count divided by the batch size.
Moments data_moments(const IsingModel& model, std::span<const std::vector<std::uint8_t>> batch);

/// Snapshot moments of the asynchronous sampler, fresh chains from
/// uniform random starts, `chains` chains pooled.
Moments model_moments(const IsingModel& model, const TrainConfig& config, std::uint64_t seed);

/// Same as above with arbitrary neuron parameters (clamps, variation).
Moments model_moments(const IsingModel& model, std::span<const NeuronParams> params,
                      const TrainConfig& config, std::uint64_t seed);

/// w += alpha (E_data[s_i s_j] - E_model[s_i s_j]) on the coupling support,
/// b += alpha (E_data[s_i] - E_model[s_i]).
IsingModel apply_cd_update(const IsingModel& model, const Moments& data, const Moments& sampled,
                           double alpha);

IsingModel cd_step(const IsingModel& model, std::span<const std::vector<std::uint8_t>> batch,
                   const TrainConfig& config, std::uint64_t seed);

struct EpochStats {
  std::size_t epoch = 0;
  double mean_abs_dw = 0.0;    // over couplings and biases, averaged over batches
  double mean_abs_gap = 0.0;   // |E_data - E_model| over all moments
  double mean_abs_weight = 0.0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Epochs of in-order batches (the last batch may be short). Throws
/// NumericError when the mean |w| exceeds config.max_mean_abs_weight.
IsingModel train(const IsingModel& model, std::span<const std::vector<std::uint8_t>> data,
                 const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Zero-parameter king's-move grid in the {0,1} domain.
IsingModel blank_grid_model(std::size_t rows, std::size_t cols);

struct SampleConfig {
  std::size_t samples = 1000;
  double lambda0 = 150e6;
  double burn_in_events = 10.0;
  double sample_spacing = 1.0;
  std::uint64_t seed = 1;
};

/// Per-neuron mean over snapshots of the asynchronous sampler.
std::vector<double> mean_activation(const IsingModel& model, std::span<const NeuronParams> params,
                                    const SampleConfig& config);
std::vector<double> mean_activation(const IsingModel& model, const SampleConfig& config);

struct Reconstruction {
  std::vector<std::uint8_t> completion;  // per-neuron majority over snapshots
  std::vector<double> marginals;         // P(up) per neuron
};

/// Clamps mask[i] != 0 neurons to values[i] and samples the rest.
Reconstruction reconstruct(const IsingModel& model, std::span<const std::uint8_t> mask,
                           std::span<const std::uint8_t> values, const SampleConfig& config);

}  // namespace passim
