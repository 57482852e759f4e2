#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "passim/model.hpp"

namespace passim {

struct Edge {
  std::uint32_t i;
  std::uint32_t j;
  double weight;
};

/// Undirected weighted graph, one entry per pair with i < j.
class WeightedGraph {
 public:
  WeightedGraph(std::size_t n, std::vector<Edge> edges);

  std::size_t size() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  double total_weight() const noexcept;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
};

enum class WeightScheme { PlusMinusOne, Unit };

std::string to_string(WeightScheme scheme);
WeightScheme parse_weight_scheme(std::string_view text);

/// Random graph: every pair is an edge with probability edge_probability
/// (1 = complete graph); weights are +-1 with equal odds or all 1.
WeightedGraph gen_maxcut(std::size_t n, double edge_probability, WeightScheme scheme,
                         std::uint64_t seed);

/// Complete graph, standard normal couplings, zero biases, +-1 domain,
/// ferromagnetic sign (E = -sum J s s).
IsingModel gen_sk(std::size_t n, std::uint64_t seed);

/// +-1 model with E(s) = scale * sum w_ij s_i s_j, so
/// cut(s) = W/2 - E(s) / (2 scale) where W is the total weight.
IsingModel maxcut_to_ising(const WeightedGraph& graph, double scale = 1.0);

/// Affine constants of cut = c0 - c1 * E for maxcut_to_ising(graph, scale).
struct CutEnergyRelation {
  double c0;
  double c1;
};
CutEnergyRelation cut_energy_relation(const WeightedGraph& graph, double scale = 1.0);

/// sum over edges of w (1 - s_i s_j) / 2 for a +-1 state.
double cut_value(const WeightedGraph& graph, std::span<const std::int8_t> state);

/// Recovers the graph from a model produced by maxcut_to_ising.
WeightedGraph graph_from_ising(const IsingModel& model, double scale = 1.0);

struct Optimum {
  double energy = 0.0;
  SpinState state;
  bool exact = false;  // true when found by enumeration
};

/// Ground state by enumeration for n <= exact_limit; otherwise the best
/// energy over restarts of single-flip simulated annealing, stopping once
/// the best value has been reached by `confirmations` restarts.
Optimum find_optimum(const IsingModel& model, std::uint64_t seed, std::size_t exact_limit = 20,
                     std::size_t max_restarts = 200, std::size_t confirmations = 3);

}  // namespace passim
