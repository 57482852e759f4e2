#include "passim/maxcut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "passim/error.hpp"
#include "passim/exact.hpp"
#include "passim/rng.hpp"

namespace passim {

WeightedGraph::WeightedGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n == 0) throw InvalidInput("graph needs at least one vertex");
  for (auto& e : edges_) {
    if (e.i == e.j) throw InvalidInput("graph self-loop on vertex " + std::to_string(e.i));
    if (e.i >= n || e.j >= n) throw InvalidInput("graph edge index out of range");
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].i == edges_[k - 1].i && edges_[k].j == edges_[k - 1].j) {
      throw InvalidInput("duplicate graph edge (" + std::to_string(edges_[k].i) + ", " +
                         std::to_string(edges_[k].j) + ")");
    }
  }
}

double WeightedGraph::total_weight() const noexcept {
  double w = 0;
  for (const auto& e : edges_) w += e.weight;
  return w;
}

std::string to_string(WeightScheme scheme) {
  return scheme == WeightScheme::Unit ? "unit" : "pm1";
}

WeightScheme parse_weight_scheme(std::string_view text) {
  if (text == "pm1" || text == "plus_minus") return WeightScheme::PlusMinusOne;
  if (text == "unit") return WeightScheme::Unit;
  throw InvalidInput("unknown weight scheme '" + std::string(text) + "' (expected pm1 or unit)");
}

WeightedGraph gen_maxcut(std::size_t n, double edge_probability, WeightScheme scheme,
                         std::uint64_t seed) {
  if (n < 2) throw InvalidInput("MaxCut instance needs n >= 2");
  if (!(edge_probability > 0.0 && edge_probability <= 1.0)) {
    throw InvalidInput("edge probability must be in (0, 1]");
  }
  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (edge_probability < 1.0 && !(rng.uniform() < edge_probability)) continue;
      const double w = scheme == WeightScheme::Unit ? 1.0 : (rng.next() >> 63 ? 1.0 : -1.0);
      edges.push_back({i, j, w});
    }
  }
  return WeightedGraph(n, std::move(edges));
}

IsingModel gen_sk(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("SK instance needs n >= 2");
  Rng rng(seed);
  std::vector<Coupling> c;
  c.reserve(n * (n - 1) / 2);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) c.push_back({i, j, rng.normal()});
  }
  return IsingModel(n, std::move(c), std::vector<double>(n, 0.0), SpinDomain::PlusMinus,
                    EnergySign::Ferromagnetic);
}

IsingModel maxcut_to_ising(const WeightedGraph& graph, double scale) {
  if (!(scale > 0.0)) throw InvalidInput("MaxCut energy scale must be positive");
  std::vector<Coupling> c;
  c.reserve(graph.edges().size());
  for (const auto& e : graph.edges()) c.push_back({e.i, e.j, -e.weight * scale});
  return IsingModel(graph.size(), std::move(c), std::vector<double>(graph.size(), 0.0),
                    SpinDomain::PlusMinus, EnergySign::Ferromagnetic);
}

CutEnergyRelation cut_energy_relation(const WeightedGraph& graph, double scale) {
  return {graph.total_weight() / 2.0, 1.0 / (2.0 * scale)};
}

double cut_value(const WeightedGraph& graph, std::span<const std::int8_t> state) {
  if (state.size() != graph.size()) throw InvalidInput("state size does not match graph");
  double cut = 0;
  for (const auto& e : graph.edges()) cut += e.weight * (1 - state[e.i] * state[e.j]) / 2.0;
  return cut;
}

WeightedGraph graph_from_ising(const IsingModel& model, double scale) {
  if (model.domain() != SpinDomain::PlusMinus || model.sign() != EnergySign::Ferromagnetic) {
    throw InvalidInput("MaxCut models are +-1 domain with ferromagnetic sign");
  }
  std::vector<Edge> edges;
  for (const auto& c : model.couplings()) edges.push_back(
        {static_cast<std::uint32_t>(c.i), static_cast<std::uint32_t>(c.j), -c.weight / scale});
  return WeightedGraph(model.size(), std::move(edges));
}

namespace {

// One annealing run: Metropolis sweeps over a geometric beta ramp, then a
// zero-temperature descent to the nearest local minimum.
SpinState anneal(const IsingModel& model, Rng& rng, double beta_lo, double beta_hi,
                 std::size_t sweeps) {
  const std::size_t n = model.size();
  SpinState s(n);
  for (auto& v : s) v = rng.next() >> 63 ? 1 : -1;
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = local_field(model, s, i);
  const auto flip = [&](std::size_t i) {
    const int ds = -2 * s[i];
    s[i] = static_cast<std::int8_t>(-s[i]);
    const double f = sign_factor(model.sign());
    for (const auto& nb : model.neighbors(i)) h[nb.index] += f * nb.weight * ds;
  };
  const double ratio = std::pow(beta_hi / beta_lo, 1.0 / static_cast<double>(std::max<std::size_t>(sweeps - 1, 1)));
  double beta = beta_lo;
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep, beta *= ratio) {
    for (std::size_t i = 0; i < n; ++i) {
      const double de = -2.0 * s[i] * h[i];
      if (de <= 0 || rng.uniform() < std::exp(-beta * de)) flip(i);
    }
  }
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (-2.0 * s[i] * h[i] < -1e-12) {
        flip(i);
        improved = true;
      }
    }
  }
  return s;
}

}  // namespace

Optimum find_optimum(const IsingModel& model, std::uint64_t seed, std::size_t exact_limit,
                     std::size_t max_restarts, std::size_t confirmations) {
  if (model.domain() != SpinDomain::PlusMinus) {
    return find_optimum(convert_domain(model, SpinDomain::PlusMinus), seed, exact_limit,
                        max_restarts, confirmations);
  }
  Optimum best;
  if (model.size() <= exact_limit) {
    const auto d = exact_distribution(model, exact_limit);
    const auto s = d.ground_states().front();
    best.state = state_from_bits(bits_from_index(s, model.size()), model.domain());
    best.energy = energy(model, best.state);
    best.exact = true;
    return best;
  }
  // Temperature range from the typical local field magnitude.
  double field2 = 0;
  for (const auto& c : model.couplings()) field2 += 2 * c.weight * c.weight;
  for (double b : model.biases()) field2 += b * b;
  const double scale = std::sqrt(std::max(field2 / static_cast<double>(model.size()), 1e-300));
  const double beta_lo = 0.1 / scale, beta_hi = 10.0 / scale;
  best.energy = std::numeric_limits<double>::infinity();
  std::size_t hits = 0;
  for (std::size_t r = 0; r < max_restarts && hits < confirmations; ++r) {
    Rng rng(derive_seed(seed, {r}));
    SpinState s = anneal(model, rng, beta_lo, beta_hi, 1000);
    const double e = energy(model, s);
    if (e < best.energy - 1e-9) {
      best.energy = e;
      best.state = std::move(s);
      hits = 1;
    } else if (e <= best.energy + 1e-9) {
      ++hits;
    }
  }
  return best;
}

}  // namespace passim
