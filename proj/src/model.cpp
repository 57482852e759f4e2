#include "passim/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "passim/error.hpp"

namespace passim {

std::string_view to_string(SpinDomain d) {
  return d == SpinDomain::PlusMinus ? "plus_minus" : "zero_one";
}

std::string_view to_string(EnergySign s) {
  return s == EnergySign::AsWritten ? "as_written" : "ferromagnetic";
}

SpinDomain parse_spin_domain(std::string_view text) {
  if (text == "plus_minus" || text == "pm" || text == "ising") return SpinDomain::PlusMinus;
  if (text == "zero_one" || text == "01" || text == "binary") return SpinDomain::ZeroOne;
  throw InvalidInput("unknown spin domain '" + std::string(text) + "'");
}

EnergySign parse_energy_sign(std::string_view text) {
  if (text == "as_written") return EnergySign::AsWritten;
  if (text == "ferromagnetic") return EnergySign::Ferromagnetic;
  throw InvalidInput("unknown energy sign '" + std::string(text) + "'");
}

IsingModel::IsingModel(std::size_t n, std::vector<Coupling> couplings, std::vector<double> biases,
                       SpinDomain domain, EnergySign sign)
    : n_(n), couplings_(std::move(couplings)), biases_(std::move(biases)), domain_(domain),
      sign_(sign) {
  if (n_ == 0) throw InvalidInput("model must have at least one spin");
  if (biases_.size() != n_) {
    throw InvalidInput("bias vector has length " + std::to_string(biases_.size()) +
                       ", expected " + std::to_string(n_));
  }
  for (auto& c : couplings_) {
    if (c.i == c.j) throw InvalidInput("self-coupling on spin " + std::to_string(c.i));
    if (c.i >= n_ || c.j >= n_) {
      throw InvalidInput("coupling (" + std::to_string(c.i) + ", " + std::to_string(c.j) +
                         ") out of range for n = " + std::to_string(n_));
    }
    if (c.i > c.j) std::swap(c.i, c.j);
  }
  std::sort(couplings_.begin(), couplings_.end(),
            [](const Coupling& a, const Coupling& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  for (std::size_t k = 1; k < couplings_.size(); ++k) {
    if (couplings_[k].i == couplings_[k - 1].i && couplings_[k].j == couplings_[k - 1].j) {
      throw InvalidInput("duplicate coupling (" + std::to_string(couplings_[k].i) + ", " +
                         std::to_string(couplings_[k].j) + ")");
    }
  }

  offsets_.assign(n_ + 1, 0);
  for (const auto& c : couplings_) {
    ++offsets_[c.i + 1];
    ++offsets_[c.j + 1];
  }
  for (std::size_t k = 0; k < n_; ++k) offsets_[k + 1] += offsets_[k];
  adjacency_.resize(offsets_[n_]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& c : couplings_) {
    adjacency_[fill[c.i]++] = {c.j, c.weight};
    adjacency_[fill[c.j]++] = {c.i, c.weight};
  }
}

double IsingModel::coupling(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw InvalidInput("coupling index out of range");
  for (const auto& nb : neighbors(i)) {
    if (nb.index == j) return nb.weight;
  }
  return 0.0;
}

IsingModel IsingModel::with_parameters(std::span<const double> weights,
                                       std::span<const double> biases) const {
  if (weights.size() != couplings_.size()) throw InvalidInput("weight vector length mismatch");
  std::vector<Coupling> cs(couplings_.begin(), couplings_.end());
  for (std::size_t k = 0; k < cs.size(); ++k) cs[k].weight = weights[k];
  return IsingModel(n_, std::move(cs), std::vector<double>(biases.begin(), biases.end()), domain_,
                    sign_);
}

IsingModel IsingModel::scaled(double factor) const {
  std::vector<Coupling> cs(couplings_.begin(), couplings_.end());
  for (auto& c : cs) c.weight *= factor;
  std::vector<double> bs(biases_);
  for (auto& b : bs) b *= factor;
  return IsingModel(n_, std::move(cs), std::move(bs), domain_, sign_);
}

bool IsingModel::operator==(const IsingModel& other) const {
  return n_ == other.n_ && domain_ == other.domain_ && sign_ == other.sign_ &&
         biases_ == other.biases_ && couplings_ == other.couplings_;
}

void check_state(const IsingModel& model, std::span<const std::int8_t> state) {
  if (state.size() != model.size()) {
    throw InvalidInput("state has length " + std::to_string(state.size()) + ", model has " +
                       std::to_string(model.size()) + " spins");
  }
  const int lo = down_value(model.domain());
  for (std::size_t k = 0; k < state.size(); ++k) {
    if (state[k] != lo && state[k] != 1) {
      throw InvalidInput("spin " + std::to_string(k) + " has value " + std::to_string(state[k]) +
                         " outside the " + std::string(to_string(model.domain())) + " domain");
    }
  }
}

SpinState state_from_bits(std::span<const std::uint8_t> up, SpinDomain domain) {
  SpinState s(up.size());
  const auto lo = static_cast<std::int8_t>(down_value(domain));
  for (std::size_t k = 0; k < up.size(); ++k) s[k] = up[k] ? std::int8_t{1} : lo;
  return s;
}

std::vector<std::uint8_t> bits_from_state(std::span<const std::int8_t> state, SpinDomain) {
  std::vector<std::uint8_t> up(state.size());
  for (std::size_t k = 0; k < state.size(); ++k) up[k] = state[k] == 1 ? 1 : 0;
  return up;
}

std::uint64_t state_index(std::span<const std::uint8_t> up) {
  if (up.size() > 64) throw InvalidInput("state index needs n <= 64");
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < up.size(); ++k) {
    if (up[k]) idx |= std::uint64_t{1} << k;
  }
  return idx;
}

std::vector<std::uint8_t> bits_from_index(std::uint64_t index, std::size_t n) {
  std::vector<std::uint8_t> up(n);
  for (std::size_t k = 0; k < n; ++k) up[k] = (index >> k) & 1U;
  return up;
}

double energy(const IsingModel& model, std::span<const std::int8_t> state) {
  check_state(model, state);
  double pair = 0.0;
  for (const auto& c : model.couplings()) pair += c.weight * state[c.i] * state[c.j];
  double field = 0.0;
  const auto b = model.biases();
  for (std::size_t k = 0; k < model.size(); ++k) field += b[k] * state[k];
  return sign_factor(model.sign()) * (pair + field);
}

double local_field(const IsingModel& model, std::span<const std::int8_t> state, std::size_t i) {
  if (i >= model.size()) throw InvalidInput("spin index " + std::to_string(i) + " out of range");
  check_state(model, state);
  double h = model.biases()[i];
  for (const auto& nb : model.neighbors(i)) h += nb.weight * state[nb.index];
  return sign_factor(model.sign()) * h;
}

double logistic(double x) noexcept {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double conditional_prob_up(const IsingModel& model, std::span<const std::int8_t> state,
                           std::size_t i) {
  // E(up) - E(down) = h_i * (up - down)
  const double h = local_field(model, state, i);
  return logistic(-h * up_gap(model.domain()));
}

IsingModel convert_domain(const IsingModel& model, SpinDomain target) {
  if (model.domain() == target) return model;
  const std::size_t n = model.size();
  std::vector<Coupling> cs(model.couplings().begin(), model.couplings().end());
  std::vector<double> bs(model.biases().begin(), model.biases().end());
  if (target == SpinDomain::ZeroOne) {
    // s = 2x - 1:  J s_i s_j -> 4J x_i x_j - 2J x_i - 2J x_j + J,  b s -> 2b x - b
    for (std::size_t k = 0; k < n; ++k) bs[k] *= 2.0;
    for (auto& c : cs) {
      bs[c.i] -= 2.0 * c.weight;
      bs[c.j] -= 2.0 * c.weight;
      c.weight *= 4.0;
    }
  } else {
    // x = (s + 1) / 2:  J x_i x_j -> J/4 (s_i s_j + s_i + s_j + 1),  b x -> b/2 (s + 1)
    for (std::size_t k = 0; k < n; ++k) bs[k] *= 0.5;
    for (auto& c : cs) {
      bs[c.i] += 0.25 * c.weight;
      bs[c.j] += 0.25 * c.weight;
      c.weight *= 0.25;
    }
  }
  return IsingModel(n, std::move(cs), std::move(bs), target, model.sign());
}

}  // namespace passim
