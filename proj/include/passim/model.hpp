#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace passim {

enum class SpinDomain {
  PlusMinus,  // s in {-1, +1}
  ZeroOne,    // s in {0, 1}
};

/// How couplings and biases enter the energy.
///   AsWritten:     E(s) =  sum_{i<j} J_ij s_i s_j + sum_i b_i s_i
///   Ferromagnetic: E(s) = -sum_{i<j} J_ij s_i s_j - sum_i b_i s_i
/// Every unordered pair is counted once. Under Ferromagnetic a positive J
/// rewards alignment.
enum class EnergySign {
  AsWritten,
  Ferromagnetic,
};

std::string_view to_string(SpinDomain d);
std::string_view to_string(EnergySign s);
SpinDomain parse_spin_domain(std::string_view text);
EnergySign parse_energy_sign(std::string_view text);

constexpr double sign_factor(EnergySign s) noexcept {
  return s == EnergySign::AsWritten ? 1.0 : -1.0;
}

/// Domain value of the "up" and "down" spin.
constexpr int up_value(SpinDomain) noexcept { return 1; }
constexpr int down_value(SpinDomain d) noexcept { return d == SpinDomain::PlusMinus ? -1 : 0; }
/// up_value - down_value.
constexpr double up_gap(SpinDomain d) noexcept { return d == SpinDomain::PlusMinus ? 2.0 : 1.0; }

struct Coupling {
  std::size_t i;
  std::size_t j;
  double weight;

  friend bool operator==(const Coupling&, const Coupling&) = default;
};

struct Neighbor {
  std::size_t index;
  double weight;
};

/// Pairwise Ising / Boltzmann model over binary spins. Immutable once built;
/// the constructor canonicalizes pairs to i < j, sorts them and builds a
/// per-spin adjacency list.
class IsingModel {
 public:
  IsingModel(std::size_t n, std::vector<Coupling> couplings, std::vector<double> biases,
             SpinDomain domain, EnergySign sign);

  std::size_t size() const noexcept { return n_; }
  SpinDomain domain() const noexcept { return domain_; }
  EnergySign sign() const noexcept { return sign_; }
  std::span<const Coupling> couplings() const noexcept { return couplings_; }
  std::span<const double> biases() const noexcept { return biases_; }
  std::span<const Neighbor> neighbors(std::size_t i) const noexcept {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }
  std::size_t degree(std::size_t i) const noexcept { return offsets_[i + 1] - offsets_[i]; }

  /// Coupling weight for (i, j), 0 when absent.
  double coupling(std::size_t i, std::size_t j) const;

  /// Same support, new parameter values; `weights` follows couplings() order.
  IsingModel with_parameters(std::span<const double> weights, std::span<const double> biases) const;

  /// Multiplies every J and b by `factor`.
  IsingModel scaled(double factor) const;

  bool operator==(const IsingModel& other) const;

 private:
  std::size_t n_;
  std::vector<Coupling> couplings_;
  std::vector<double> biases_;
  SpinDomain domain_;
  EnergySign sign_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
};

/// Spin values in the model's domain.
using SpinState = std::vector<std::int8_t>;

/// Throws InvalidInput when the length or any value does not fit the model.
void check_state(const IsingModel& model, std::span<const std::int8_t> state);

/// Converts per-spin up flags (1 = up) to domain values and back.
SpinState state_from_bits(std::span<const std::uint8_t> up, SpinDomain domain);
std::vector<std::uint8_t> bits_from_state(std::span<const std::int8_t> state, SpinDomain domain);

/// Bit k of the index is the up flag of spin k. Requires n <= 64.
std::uint64_t state_index(std::span<const std::uint8_t> up);
std::vector<std::uint8_t> bits_from_index(std::uint64_t index, std::size_t n);

double energy(const IsingModel& model, std::span<const std::int8_t> state);

/// h_i with E = h_i * s_i + (terms without s_i).
double local_field(const IsingModel& model, std::span<const std::int8_t> state, std::size_t i);

/// P(s_i = up | all other spins) under p(s) ~ exp(-E(s)).
double conditional_prob_up(const IsingModel& model, std::span<const std::int8_t> state,
                           std::size_t i);

/// Logistic function, stable for large |x|.
double logistic(double x) noexcept;

/// Affine re-parameterization between the {-1,+1} and {0,1} domains
/// (s = 2x - 1). The Boltzmann distribution over relabelled states is
/// unchanged; the additive energy constant is dropped.
IsingModel convert_domain(const IsingModel& model, SpinDomain target);

}  // namespace passim
