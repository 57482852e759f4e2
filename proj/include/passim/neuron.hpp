#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "passim/rng.hpp"

namespace passim {

enum class Clamp : std::uint8_t { Free, Zero, One };

/// Per-neuron hardware description.
///
/// The neuron fires up with probability
///   sigma(slope * (gain * x + offset - threshold))
/// where x is the ideal activation input (-(E_up - E_down)) and
/// (gain, offset) is the host-side linear correction programmed after
/// characterization. With slope = gain = 1 and threshold = offset = 0 the
/// neuron is an exact Gibbs conditional.
struct NeuronParams {
  double lambda0 = 150e6;  // intrinsic Poisson rate, events / s
  double slope = 1.0;      // sigmoid slope a
  double threshold = 0.0;  // sigmoid offset b, field units
  double gain = 1.0;
  double offset = 0.0;
  Clamp clamp = Clamp::Free;
  bool dead = false;  // stuck at its initial value

  bool frozen() const noexcept { return dead || clamp != Clamp::Free; }
  double activation(double x) const noexcept;
  bool operator==(const NeuronParams&) const = default;
};

/// Throws InvalidInput unless lambda0 > 0, slope > 0 and all fields finite.
void validate(const NeuronParams& p);

std::vector<NeuronParams> uniform_params(std::size_t n, double lambda0);

/// Chip-to-chip variation: log-normal slope, normal threshold, random dead neurons.
struct VariationSpec {
  double slope_log_sigma = 0.0;  // slope = exp(slope_log_sigma * z)
  double threshold_sigma = 0.0;  // threshold = threshold_sigma * z
  double dead_probability = 0.0;
};

std::vector<NeuronParams> make_varied_params(std::size_t n, const NeuronParams& base,
                                             const VariationSpec& spec, std::uint64_t seed);

/// Activation curve measured by sweeping the bias code with no neighbors.
struct ActivationSweep {
  std::vector<double> inputs;        // activation input per code
  std::vector<std::uint32_t> ups;    // up count per code
  std::uint32_t samples_per_code = 0;
};

/// Codes -max_code..max_code, input = code * field_per_code; each code draws
/// `samples_per_code` independent output samples of the neuron.
ActivationSweep sweep_bias(const NeuronParams& neuron, int max_code, double field_per_code,
                           std::uint32_t samples_per_code, Rng& rng);

struct SigmoidFit {
  double slope = 1.0;
  double threshold = 0.0;
  bool dead = false;  // activation never spans the range, no fit
};

/// Binomial maximum-likelihood fit of sigma(a (x - b)) to a sweep (Newton).
/// A sweep whose extreme codes do not reach min_span between low and high
/// activation is reported dead.
SigmoidFit fit_sigmoid(const ActivationSweep& sweep, double min_span = 0.8);

/// Sets gain/offset so that the corrected neuron approximates sigma(x);
/// dead fits are marked dead.
void apply_correction(NeuronParams& neuron, const SigmoidFit& fit);

}  // namespace passim
