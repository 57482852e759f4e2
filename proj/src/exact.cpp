#include "passim/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "passim/error.hpp"

namespace passim {

double ExactDistribution::partition() const { return std::exp(log_partition); }

double ExactDistribution::marginal_up(std::size_t i) const {
  if (i >= n) throw InvalidInput("marginal index out of range");
  double p = 0.0;
  for (std::size_t s = 0; s < probabilities.size(); ++s) {
    if ((s >> i) & 1U) p += probabilities[s];
  }
  return p;
}

std::vector<double> ExactDistribution::marginals_up() const {
  std::vector<double> m(n, 0.0);
  for (std::size_t s = 0; s < probabilities.size(); ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      if ((s >> i) & 1U) m[i] += probabilities[s];
    }
  }
  return m;
}

std::vector<std::uint64_t> ExactDistribution::ground_states(double tolerance) const {
  std::vector<std::uint64_t> out;
  for (std::size_t s = 0; s < energies.size(); ++s) {
    if (energies[s] <= min_energy + tolerance) out.push_back(s);
  }
  return out;
}

std::uint64_t ExactDistribution::mode() const {
  return static_cast<std::uint64_t>(
      std::max_element(probabilities.begin(), probabilities.end()) - probabilities.begin());
}

ExactDistribution boltzmann_from_energies(std::vector<double> energies) {
  const std::size_t count = energies.size();
  if (count == 0 || !std::has_single_bit(count)) {
    throw InvalidInput("energy table size must be a power of two");
  }
  ExactDistribution d;
  d.n = static_cast<std::size_t>(std::countr_zero(count));
  d.min_energy = *std::min_element(energies.begin(), energies.end());
  d.probabilities.resize(count);
  double z = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    d.probabilities[s] = std::exp(-(energies[s] - d.min_energy));
    z += d.probabilities[s];
  }
  for (auto& p : d.probabilities) p /= z;
  d.log_partition = std::log(z) - d.min_energy;
  d.energies = std::move(energies);
  return d;
}

ExactDistribution exact_distribution(const IsingModel& model, std::size_t max_spins) {
  const std::size_t n = model.size();
  if (n > max_spins || n > 30) {
    throw NumericError("exact enumeration refused for n = " + std::to_string(n) + " (limit " +
                       std::to_string(std::min<std::size_t>(max_spins, 30)) + ")");
  }
  const std::size_t count = std::size_t{1} << n;
  const double lo = down_value(model.domain());
  const double gap = up_gap(model.domain());
  const double sign = sign_factor(model.sign());

  // Start from all-down; walk the Gray code, updating E by h_k * dvalue.
  std::vector<double> value(n, lo);
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    double f = model.biases()[i];
    for (const auto& nb : model.neighbors(i)) f += nb.weight * lo;
    h[i] = f;  // raw field, sign applied below
  }
  double raw = 0.0;
  for (const auto& c : model.couplings()) raw += c.weight * lo * lo;
  for (std::size_t i = 0; i < n; ++i) raw += model.biases()[i] * lo;

  std::vector<double> energies(count);
  energies[0] = sign * raw;
  std::uint64_t gray = 0;
  for (std::size_t step = 1; step < count; ++step) {
    const auto k = static_cast<std::size_t>(std::countr_zero(step));
    const double dv = value[k] == lo ? gap : -gap;
    raw += h[k] * dv;
    value[k] += dv;
    for (const auto& nb : model.neighbors(k)) h[nb.index] += nb.weight * dv;
    gray ^= std::uint64_t{1} << k;
    energies[gray] = sign * raw;
  }
  return boltzmann_from_energies(std::move(energies));
}

ExactDistribution condition_on_clamps(const ExactDistribution& dist,
                                      std::span<const NeuronParams> params) {
  if (params.size() != dist.n) throw InvalidInput("clamp vector size mismatch");
  std::vector<double> energies = dist.energies;
  for (std::size_t s = 0; s < energies.size(); ++s) {
    for (std::size_t i = 0; i < dist.n; ++i) {
      const bool up = (s >> i) & 1U;
      if ((params[i].clamp == Clamp::One && !up) || (params[i].clamp == Clamp::Zero && up)) {
        energies[s] = std::numeric_limits<double>::infinity();
        break;
      }
    }
  }
  return boltzmann_from_energies(std::move(energies));
}

}  // namespace passim
