#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "passim/model.hpp"
#include "passim/neuron.hpp"

namespace passim {

/// Boltzmann distribution p(s) = exp(-E(s)) / Z over all 2^n states, indexed
/// by state_index (bit k = up flag of spin k).
struct ExactDistribution {
  std::size_t n = 0;
  std::vector<double> probabilities;
  std::vector<double> energies;
  double log_partition = 0.0;  // log Z
  double min_energy = 0.0;

  double partition() const;
  /// P(s_i = up).
  double marginal_up(std::size_t i) const;
  std::vector<double> marginals_up() const;
  /// States whose energy is within `tolerance` of the minimum.
  std::vector<std::uint64_t> ground_states(double tolerance = 1e-9) const;
  /// Index of the most probable state (lowest index on ties).
  std::uint64_t mode() const;
};

inline constexpr std::size_t kMaxExactSpins = 20;

/// Exhaustive enumeration in Gray-code order; refuses n > max_spins.
ExactDistribution exact_distribution(const IsingModel& model, std::size_t max_spins = kMaxExactSpins);

/// Normalizes exp(-E) over a full energy table (size must be 2^n). The
/// minimum energy is subtracted before exponentiating.
ExactDistribution boltzmann_from_energies(std::vector<double> energies);

/// Distribution restricted to states that agree with every clamped neuron, renormalized.
ExactDistribution condition_on_clamps(const ExactDistribution& dist,
                                      std::span<const NeuronParams> params);

}  // namespace passim
