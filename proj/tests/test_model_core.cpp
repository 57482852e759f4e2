#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "oracle.hpp"
#include "passim/error.hpp"
#include "passim/model.hpp"
#include "passim/model_io.hpp"
#include "passim/quantize.hpp"
#include "passim/topology.hpp"

using namespace passim;

namespace {

IsingModel empty_model(std::size_t n, SpinDomain d = SpinDomain::PlusMinus,
                       EnergySign s = EnergySign::AsWritten) {
  return IsingModel(n, {}, std::vector<double>(n, 0.0), d, s);
}

SpinState state_of(std::uint64_t index, std::size_t n, SpinDomain d) {
  return state_from_bits(oracle::bits_of(index, n), d);
}

}  // namespace

TEST_CASE("energy examples") {
  CHECK(energy(empty_model(3), SpinState{1, -1, 1}) == 0.0);
  IsingModel one(1, {}, {1.0}, SpinDomain::PlusMinus, EnergySign::AsWritten);
  CHECK(energy(one, SpinState{1}) == 1.0);
  IsingModel two(2, {{0, 1, 1.0}}, {0.0, 0.0}, SpinDomain::PlusMinus, EnergySign::AsWritten);
  CHECK(energy(two, SpinState{1, -1}) == -1.0);
}

TEST_CASE("energy rejects mismatched states") {
  IsingModel two(2, {{0, 1, 1.0}}, {0.0, 0.0}, SpinDomain::PlusMinus, EnergySign::AsWritten);
  CHECK_THROWS_AS(energy(two, SpinState{1}), InvalidInput);
  CHECK_THROWS_AS(energy(two, SpinState{1, 0}), InvalidInput);
  IsingModel zo = convert_domain(two, SpinDomain::ZeroOne);
  CHECK_THROWS_AS(energy(zo, SpinState{1, -1}), InvalidInput);
}

TEST_CASE("model construction invariants") {
  CHECK_THROWS_AS(IsingModel(0, {}, {}, SpinDomain::PlusMinus, EnergySign::AsWritten), InvalidInput);
  CHECK_THROWS_AS(IsingModel(2, {{1, 1, 1.0}}, {0, 0}, SpinDomain::PlusMinus, EnergySign::AsWritten),
                  InvalidInput);
  CHECK_THROWS_AS(IsingModel(2, {{0, 2, 1.0}}, {0, 0}, SpinDomain::PlusMinus, EnergySign::AsWritten),
                  InvalidInput);
  CHECK_THROWS_AS(
      IsingModel(2, {{0, 1, 1.0}, {1, 0, 2.0}}, {0, 0}, SpinDomain::PlusMinus, EnergySign::AsWritten),
      InvalidInput);
  CHECK_THROWS_AS(IsingModel(2, {}, {0}, SpinDomain::PlusMinus, EnergySign::AsWritten), InvalidInput);
  IsingModel m(3, {{2, 0, 1.5}}, {0, 0, 0}, SpinDomain::PlusMinus, EnergySign::AsWritten);
  REQUIRE(m.couplings().size() == 1);
  CHECK(m.couplings()[0].i == 0);
  CHECK(m.couplings()[0].j == 2);
  CHECK(m.coupling(2, 0) == 1.5);
  CHECK(m.coupling(0, 1) == 0.0);
}

TEST_CASE("energy matches the brute-force oracle and scales linearly") {
  for (auto d : {SpinDomain::PlusMinus, SpinDomain::ZeroOne}) {
    for (auto s : {EnergySign::AsWritten, EnergySign::Ferromagnetic}) {
      const auto m = oracle::random_model(6, 0.6, 2.0, 11, d, s);
      const auto m3 = m.scaled(-2.5);
      for (std::uint64_t k = 0; k < 64; ++k) {
        const auto st = state_of(k, 6, d);
        CHECK(energy(m, st) == doctest::Approx(oracle::energy_of_index(m, k)).epsilon(1e-12));
        CHECK(energy(m3, st) == doctest::Approx(-2.5 * energy(m, st)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("local_field examples") {
  const auto z = empty_model(3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(local_field(z, SpinState{1, 1, -1}, i) == 0.0);
  IsingModel two(2, {{0, 1, 1.0}}, {0.0, 0.5}, SpinDomain::PlusMinus, EnergySign::AsWritten);
  CHECK(local_field(two, SpinState{1, -1}, 1) == 1.5);
  CHECK_THROWS_AS(local_field(two, SpinState{1, -1}, 2), InvalidInput);
}

TEST_CASE("local_field identity on a random 4-spin model") {
  for (auto s : {EnergySign::AsWritten, EnergySign::Ferromagnetic}) {
    const auto m = oracle::random_model(4, 1.0, 1.5, 21, SpinDomain::PlusMinus, s);
    for (std::uint64_t k = 0; k < 16; ++k) {
      auto st = state_of(k, 4, SpinDomain::PlusMinus);
      for (std::size_t i = 0; i < 4; ++i) {
        auto up = st, down = st;
        up[i] = 1;
        down[i] = -1;
        CHECK(energy(m, up) - energy(m, down) ==
              doctest::Approx(2 * local_field(m, st, i)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("conditional_prob_up examples") {
  CHECK(conditional_prob_up(empty_model(2), SpinState{1, -1}, 0) == 0.5);
  IsingModel one(1, {}, {1.0}, SpinDomain::ZeroOne, EnergySign::Ferromagnetic);
  CHECK(conditional_prob_up(one, SpinState{0}, 0) == doctest::Approx(0.7310585786300049).epsilon(1e-15));
  CHECK(logistic(-800.0) >= 0.0);
  CHECK(logistic(800.0) == 1.0);
}

TEST_CASE("conditional_prob_up matches enumeration") {
  for (auto d : {SpinDomain::PlusMinus, SpinDomain::ZeroOne}) {
    for (auto s : {EnergySign::AsWritten, EnergySign::Ferromagnetic}) {
      const auto m = oracle::random_model(3, 1.0, 2.0, 31, d, s);
      const auto p = oracle::distribution(m);
      for (std::uint64_t k = 0; k < 8; ++k) {
        for (std::size_t i = 0; i < 3; ++i) {
          const std::uint64_t up = k | (1ULL << i), down = k & ~(1ULL << i);
          const double expect = p[up] / (p[up] + p[down]);
          CHECK(std::fabs(conditional_prob_up(m, state_of(k, 3, d), i) - expect) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("random-scan kernel leaves the Boltzmann distribution invariant") {
  for (std::size_t n : {1, 3, 6, 8}) {
    for (auto d : {SpinDomain::PlusMinus, SpinDomain::ZeroOne}) {
      const auto m = oracle::random_model(n, 0.7, 1.5, 40 + n, d, EnergySign::Ferromagnetic);
      const auto p = oracle::distribution(m);
      const std::size_t count = p.size();
      std::vector<double> next(count, 0.0);
      for (std::uint64_t k = 0; k < count; ++k) {
        const auto st = state_of(k, n, d);
        for (std::size_t i = 0; i < n; ++i) {
          const double pu = conditional_prob_up(m, st, i);
          next[k | (1ULL << i)] += p[k] * pu / n;
          next[k & ~(1ULL << i)] += p[k] * (1 - pu) / n;
        }
      }
      CHECK(oracle::tv(p, next) < 1e-12);
    }
  }
}

TEST_CASE("convert_domain preserves the distribution") {
  const auto pm = oracle::random_model(4, 0.8, 1.0, 5);
  CHECK(convert_domain(pm, SpinDomain::PlusMinus) == pm);

  IsingModel one(1, {}, {1.0}, SpinDomain::PlusMinus, EnergySign::AsWritten);
  const auto one_zo = convert_domain(one, SpinDomain::ZeroOne);
  CHECK(one_zo.domain() == SpinDomain::ZeroOne);
  CHECK(oracle::tv(oracle::distribution(one), oracle::distribution(one_zo)) < 1e-15);

  Rng rng(77);
  const auto grid = build_kings_grid(
      3, 3, [&](Cell, Cell) { return 2 * rng.uniform() - 1; }, [&](Cell) { return rng.uniform() - 0.5; });
  const auto back = convert_domain(convert_domain(grid, SpinDomain::ZeroOne), SpinDomain::PlusMinus);
  const auto p0 = oracle::distribution(grid), p1 = oracle::distribution(back);
  for (std::size_t k = 0; k < p0.size(); ++k) CHECK(std::fabs(p0[k] - p1[k]) < 1e-12);

  for (std::size_t n = 1; n <= 10; ++n) {
    for (auto s : {EnergySign::AsWritten, EnergySign::Ferromagnetic}) {
      for (auto d : {SpinDomain::PlusMinus, SpinDomain::ZeroOne}) {
        const auto m = oracle::random_model(n, 0.5, 1.0, 100 + n, d, s);
        const auto other = d == SpinDomain::PlusMinus ? SpinDomain::ZeroOne : SpinDomain::PlusMinus;
        const auto c = convert_domain(m, other);
        CHECK(c.sign() == s);
        CHECK(oracle::tv(oracle::distribution(m), oracle::distribution(c)) < 1e-12);
      }
    }
  }
}

TEST_CASE("quantize examples") {
  IsingModel m(3, {{0, 1, -1.0}, {0, 2, 0.5}, {1, 2, 1.0}}, {0, 0, 0}, SpinDomain::PlusMinus,
               EnergySign::AsWritten);
  const auto q = quantize(m);
  CHECK(q.weight_codes == std::vector<int>{-127, 64, 127});
  CHECK(q.scale == doctest::Approx(1.0 / 127));

  IsingModel c(3, {{0, 1, 0.3}, {1, 2, 0.3}}, {0.3, 0.3, 0.3}, SpinDomain::ZeroOne,
               EnergySign::Ferromagnetic);
  const auto qc = quantize(c);
  CHECK(qc.weight_codes == std::vector<int>{127, 127});
  CHECK(qc.bias_codes == std::vector<int>{127, 127, 127});
  CHECK(qc.scale == doctest::Approx(0.3 / 127));

  CHECK_THROWS_AS(quantize(empty_model(2)), NumericError);
  CHECK_THROWS_AS(quantize(m, 1), InvalidInput);
}

TEST_CASE("quantization error bound and code range") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = oracle::random_model(12, 0.5, 3.0, 900 + seed);
    for (int bits : {2, 4, 8}) {
      const auto q = quantize(m, bits);
      const auto dq = q.dequantize();
      for (std::size_t k = 0; k < m.couplings().size(); ++k) {
        CHECK(std::abs(q.weight_codes[k]) <= q.max_code());
        CHECK(std::fabs(m.couplings()[k].weight - dq.couplings()[k].weight) <= q.scale / 2 * (1 + 1e-12));
      }
      for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(std::abs(q.bias_codes[i]) <= q.max_code());
        CHECK(std::fabs(m.biases()[i] - dq.biases()[i]) <= q.scale / 2 * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("accumulator saturates at the 7-bit signed range") {
  IsingModel m(3, {{0, 1, 1.0}, {0, 2, 1.0}}, {1.0, 0, 0}, SpinDomain::ZeroOne, EnergySign::Ferromagnetic);
  const auto q = quantize(m);
  CHECK(q.accumulator_limit() == 63);
  CHECK(q.accumulate(std::vector<std::uint8_t>{0, 0, 0}, 0) == 63);
  CHECK(q.accumulate(std::vector<std::uint8_t>{0, 1, 1}, 0) == 63);
  IsingModel neg = m.scaled(-1);
  CHECK(quantize(neg).accumulate(std::vector<std::uint8_t>{0, 1, 1}, 0) == -63);
  IsingModel small(2, {{0, 1, 0.1}}, {1.0, 0.0}, SpinDomain::ZeroOne, EnergySign::Ferromagnetic);
  const auto qs = quantize(small);
  CHECK(qs.accumulate(std::vector<std::uint8_t>{1, 0}, 1) == 13);
}

TEST_CASE("king's-move grid pair counts") {
  const auto count_pairs = [](std::size_t r, std::size_t c) {
    // Enumerate all cell pairs and keep those at Chebyshev distance 1.
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < r * c; ++a) {
      for (std::size_t b = a + 1; b < r * c; ++b) {
        const long dr = static_cast<long>(a / c) - static_cast<long>(b / c);
        const long dc = static_cast<long>(a % c) - static_cast<long>(b % c);
        if (std::max(std::labs(dr), std::labs(dc)) == 1) ++pairs;
      }
    }
    return pairs;
  };
  const auto unit = [](Cell, Cell) { return 1.0; };
  const auto zero = [](Cell) { return 0.0; };
  CHECK(build_kings_grid(1, 1, unit, zero).couplings().empty());
  CHECK(build_kings_grid(3, 3, unit, zero).couplings().size() == 20);
  CHECK(count_pairs(16, 16) == 930);
  CHECK(build_kings_grid(16, 16, unit, zero).couplings().size() == count_pairs(16, 16));
  for (std::size_t r = 1; r <= 5; ++r) {
    for (std::size_t c = 1; c <= 5; ++c) {
      CHECK(GridTopology(r, c).edges().size() == count_pairs(r, c));
    }
  }
  CHECK_THROWS_AS(GridTopology(0, 3), InvalidInput);
}

TEST_CASE("king's-move degrees and symmetry") {
  GridTopology g(5, 6);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto c = g.cell(k);
    const bool row_edge = c.row == 0 || c.row == 4;
    const bool col_edge = c.col == 0 || c.col == 5;
    const std::size_t expect = row_edge && col_edge ? 3 : (row_edge || col_edge ? 5 : 8);
    const auto nb = g.neighbors(k);
    CHECK(nb.size() == expect);
    for (auto j : nb) {
      const auto back = g.neighbors(j);
      CHECK(std::find(back.begin(), back.end(), k) != back.end());
    }
  }
}

namespace {

std::set<std::uint64_t> argmin_states(const IsingModel& m) {
  std::set<std::uint64_t> out;
  double best = INFINITY;
  for (std::uint64_t k = 0; k < (1ULL << m.size()); ++k) {
    const double e = oracle::energy_of_index(m, k);
    if (e < best - 1e-9) {
      best = e;
      out.clear();
    }
    if (e <= best + 1e-9) out.insert(k);
  }
  return out;
}

std::set<std::uint64_t> mask_pair(const BinaryGrid& g) {
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < g.cells.size(); ++i) k |= static_cast<std::uint64_t>(g.cells[i]) << i;
  const std::uint64_t full = (1ULL << g.cells.size()) - 1;
  return {k, full & ~k};
}

BinaryGrid grid_from_index(std::uint64_t bits, std::size_t r, std::size_t c) {
  BinaryGrid g{r, c, {}};
  for (std::size_t i = 0; i < r * c; ++i) g.cells.push_back((bits >> i) & 1U);
  return g;
}

}  // namespace

TEST_CASE("encode_mask_ground_state examples") {
  const auto uniform = encode_mask_ground_state(grid_from_index(0, 3, 3), 1.0);
  for (const auto& c : uniform.couplings()) CHECK(c.weight > 0);
  CHECK(argmin_states(uniform) == std::set<std::uint64_t>{0, 511});

  const auto cols = parse_binary_grid("10\n10\n");
  CHECK(argmin_states(encode_mask_ground_state(cols, 1.0)) == mask_pair(cols));

  const auto l = read_binary_grid(PASSIM_SOURCE_DIR "/data/masks/L4x4.txt");
  REQUIRE(l.rows == 4);
  REQUIRE(l.cols == 4);
  CHECK(argmin_states(encode_mask_ground_state(l, 1.0)) == mask_pair(l));
  CHECK(argmin_states(encode_mask_ground_state(l, 2.0, EnergySign::AsWritten)) == mask_pair(l));
}

TEST_CASE("mask encoding argmin is the mask pair for every small mask") {
  // Every mask of every grid with at most 10 cells, then a fixed sample of 4x4 masks.
  for (std::size_t r = 1; r <= 4; ++r) {
    for (std::size_t c = 1; r * c <= 10; ++c) {
      for (std::uint64_t bits = 0; bits < (1ULL << (r * c)); ++bits) {
        const auto g = grid_from_index(bits, r, c);
        const auto m = encode_mask_ground_state(g, 1.0);
        if (argmin_states(m) != mask_pair(g)) FAIL("mask ", bits, " on ", r, "x", c);
      }
    }
  }
  Rng rng(4);
  for (int t = 0; t < 64; ++t) {
    const auto g = grid_from_index(rng.below(1ULL << 16), 4, 4);
    CHECK(argmin_states(encode_mask_ground_state(g, 1.0)) == mask_pair(g));
  }
}

TEST_CASE("binary grid text form") {
  const auto g = parse_binary_grid("# title\n01#.\n\n1100\n");
  CHECK(g.rows == 2);
  CHECK(g.cols == 4);
  CHECK(g.cells == std::vector<std::uint8_t>{0, 1, 1, 0, 1, 1, 0, 0});
  CHECK(parse_binary_grid(format_binary_grid(g)) == g);
  CHECK_THROWS_AS(parse_binary_grid("01\n011\n"), InvalidInput);
  CHECK_THROWS_AS(parse_binary_grid("0x\n"), InvalidInput);
  CHECK_THROWS_AS(read_binary_grid("/nonexistent/mask.txt"), IoError);
}

TEST_CASE("model file round trip") {
  for (auto d : {SpinDomain::PlusMinus, SpinDomain::ZeroOne}) {
    for (auto s : {EnergySign::AsWritten, EnergySign::Ferromagnetic}) {
      const auto m = oracle::random_model(9, 0.5, 3.0, 61, d, s);
      const auto text = format_model(m, {"random"});
      const auto back = parse_model(text);
      CHECK(back == m);
      CHECK(format_model(back, {"random"}) == text);
    }
  }
}

TEST_CASE("model file rejects malformed input") {
  const std::string head = "domain plus_minus\nsign ferromagnetic\nspins 3\n";
  CHECK_NOTHROW(parse_model(head + "biases\n0 1\ncouplings\n0 1 2\n"));
  CHECK_THROWS_AS(parse_model(head + "couplings\n0 1 2\n1 0 3\n"), InvalidInput);
  CHECK_THROWS_AS(parse_model(head + "couplings\n1 1 2\n"), InvalidInput);
  CHECK_THROWS_AS(parse_model(head + "couplings\n0 3 2\n"), InvalidInput);
  CHECK_THROWS_AS(parse_model(head + "biases\n0 1\n0 2\n"), InvalidInput);
  CHECK_THROWS_AS(parse_model("sign ferromagnetic\nspins 3\n"), InvalidInput);
  CHECK_THROWS_AS(parse_model("domain up_down\nsign ferromagnetic\nspins 3\n"), InvalidInput);
  CHECK_THROWS_AS(parse_model(head + "couplings\n0 1 abc\n"), InvalidInput);
  CHECK_THROWS_AS(read_model("/nonexistent/model.txt"), IoError);
}
