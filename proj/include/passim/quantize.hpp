#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "passim/model.hpp"

namespace passim {

/// Fixed-point image of a model as programmed into the synapse registers.
/// Codes are symmetric: code = round_half_away(value / scale), |code| <= 2^(bits-1) - 1.
struct QuantizedModel {
  std::vector<Coupling> pairs;  // structure of the source model, weight = dequantized value
  std::vector<int> weight_codes;
  std::vector<int> bias_codes;
  double scale = 0.0;
  int weight_bits = 8;
  int accumulator_bits = 7;
  SpinDomain domain = SpinDomain::ZeroOne;
  EnergySign sign = EnergySign::Ferromagnetic;
  std::size_t n = 0;

  int max_code() const noexcept { return (1 << (weight_bits - 1)) - 1; }
  int accumulator_limit() const noexcept { return (1 << (accumulator_bits - 1)) - 1; }

  /// Model rebuilt from codes * scale.
  IsingModel dequantize() const;

  /// Synapse accumulation for spin i: bias code plus the weight codes of
  /// every neighbor whose output bit is 1, saturated to the signed
  /// accumulator range.
  int accumulate(std::span<const std::uint8_t> up, std::size_t i) const;
};

QuantizedModel quantize(const IsingModel& model, int weight_bits = 8, int accumulator_bits = 7);

}  // namespace passim
