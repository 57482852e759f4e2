#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracle.hpp"
#include "passim/error.hpp"
#include "passim/exact.hpp"
#include "passim/fly.hpp"

using namespace passim;

namespace {

FlyWorld two_targets() {
  FlyWorld w;
  w.targets = {{0, 1000}, {1000, 1000}};
  w.step_events = 20;
  return w;
}

}  // namespace

TEST_CASE("goal vectors") {
  FlyWorld w;
  w.targets = {{0, 1000}};
  w.start = {0, 0};
  w.neurons = 4;
  const auto g = goal_vectors(w, {0, 0});
  REQUIRE(g.has_value());
  for (const auto& v : *g) {
    CHECK(v.x == 0.0);
    CHECK(v.y == 1.0);
  }
  CHECK_FALSE(goal_vectors(w, {0, 995}).has_value());

  const auto two = two_targets();
  const auto g2 = goal_vectors(two, two.start);
  REQUIRE(g2.has_value());
  for (const auto& v : *g2) CHECK(std::fabs(v.norm() - 1.0) < 1e-12);
  const auto& a = g2->front();
  const auto& b = g2->back();
  const double angle = std::acos(a.x * b.x + a.y * b.y);
  CHECK(std::fabs(angle - 2 * std::atan(500.0 / 1000.0)) < 1e-12);
}

TEST_CASE("couplings from angles") {
  const std::vector<Vec2> goals{{1, 0}, {0, 1}, {-1, 0}, {1, 0}};
  for (double eta : {0.5, 1.0, 2.0, 4.0}) {
    const auto j = couplings_from_angles(goals, eta);
    CHECK(j[0 * 4 + 3] == doctest::Approx(1.0));
    CHECK(j[0 * 4 + 2] == doctest::Approx(-1.0));
  }
  CHECK(std::fabs(couplings_from_angles(goals, 1.0)[0 * 4 + 1]) < 1e-15);
  CHECK(couplings_from_angles(goals, 2.0)[0 * 4 + 1] == doctest::Approx(std::cos(std::numbers::pi / 4)));

  Rng rng(1);
  std::vector<Vec2> random_goals;
  for (int k = 0; k < 12; ++k) {
    const double t = 2 * std::numbers::pi * rng.uniform();
    random_goals.push_back({std::cos(t), std::sin(t)});
  }
  for (double eta : {0.3, 1.0, 2.5, 7.0}) {
    const auto j = couplings_from_angles(random_goals, eta);
    for (std::size_t a = 0; a < 12; ++a) {
      for (std::size_t b = 0; b < 12; ++b) {
        CHECK(j[a * 12 + b] == j[b * 12 + a]);
        CHECK(j[a * 12 + b] >= -1.0);
        CHECK(j[a * 12 + b] <= 1.0);
      }
    }
  }
}

TEST_CASE("fly model construction") {
  FlyWorld w;
  w.targets = {{0, 1000}, {1000, 1000}};
  w.neurons = 2;
  w.alpha_mem = 0.0;
  w.gain = 1.0;
  // goal vectors at angle 0 give J_01 = 1
  const std::vector<Vec2> same{{0, 1}, {0, 1}};
  const auto m = build_fly_model(w, same, nullptr);
  REQUIRE(m.couplings().size() == 1);
  CHECK(m.domain() == SpinDomain::ZeroOne);
  CHECK(std::fabs(energy(m, SpinState{1, 1}) - (-1.0)) < 1e-12);
  CHECK(energy(m, SpinState{1, 0}) == 0.0);
}

TEST_CASE("memory bias factorizes without couplings") {
  FlyWorld w = two_targets();
  w.neurons = 6;
  w.gain = 0.0;
  w.alpha_mem = 1.3;
  const auto goals = *goal_vectors(w, w.start);
  const std::vector<std::uint8_t> prev{1, 0, 0, 1, 1, 0};
  const auto m = build_fly_model(w, goals, &prev);
  const auto p = oracle::distribution(m);
  const double keep = 1.0 / (1.0 + std::exp(-1.3));
  for (std::uint64_t k = 0; k < p.size(); ++k) {
    double expect = 1;
    for (std::size_t i = 0; i < 6; ++i) expect *= (((k >> i) & 1U) == prev[i]) ? keep : 1 - keep;
    CHECK(std::fabs(p[k] - expect) < 1e-12);
  }
  const auto fresh = build_fly_model(w, goals, nullptr);
  for (double b : fresh.biases()) CHECK(b == 0.0);
}

TEST_CASE("symmetric start line gives a swap-symmetric distribution") {
  FlyWorld w = two_targets();
  w.neurons = 10;
  const auto p = exact_distribution(build_fly_model(w, *goal_vectors(w, w.start), nullptr)).probabilities;
  for (std::uint64_t k = 0; k < p.size(); ++k) {
    const std::uint64_t swapped = ((k & 0x1f) << 5) | (k >> 5);
    CHECK(std::fabs(p[k] - p[swapped]) < 1e-12);
  }
}

TEST_CASE("velocity") {
  const std::vector<Vec2> up(4, Vec2{0, 1});
  CHECK(velocity({0, 0, 0, 0}, up, 10) == Vec2{0, 0});
  CHECK(velocity({1, 1, 1, 1}, up, 10).y == doctest::Approx(10.0));
  const std::vector<Vec2> opposite{{1, 0}, {1, 0}, {-1, 0}, {-1, 0}};
  const auto v = velocity({1, 0, 1, 0}, opposite, 10);
  CHECK(v.x == 0.0);
  CHECK(v.y == 0.0);
}

TEST_CASE("world validation") {
  FlyWorld w = two_targets();
  w.neurons = 5;
  CHECK_THROWS_AS(validate(w), InvalidInput);
  w.neurons = 4;
  w.eta = 0;
  CHECK_THROWS_AS(validate(w), InvalidInput);
  w.eta = 1;
  w.v0 = 0;
  CHECK_THROWS_AS(validate(w), InvalidInput);
  w.v0 = 1;
  w.targets.clear();
  CHECK_THROWS_AS(validate(w), InvalidInput);
  w.targets = {{1, 1}, {2, 2}};
  CHECK(neuron_targets(w) == std::vector<std::size_t>{0, 0, 1, 1});
}

TEST_CASE("single target: distance shrinks monotonically") {
  FlyWorld w;
  w.targets = {{300, 800}};
  w.step_events = 20;
  const auto ens = simulate_ensemble(w, 50, 7);
  for (const auto& t : ens) {
    CHECK(t.termination == Termination::ReachedTarget);
    CHECK(t.target == std::size_t{0});
    double last = INFINITY;
    for (const auto& s : t.steps) {
      const double d = (s.position - w.targets[0]).norm();
      CHECK(d <= last + 1e-9);
      last = d;
    }
  }
}

TEST_CASE("trajectory invariants") {
  const auto w = two_targets();
  const auto ens = simulate_ensemble(w, 20, 3, 2);
  for (const auto& t : ens) {
    for (std::size_t k = 1; k < t.steps.size(); ++k) {
      const auto& s = t.steps[k];
      CHECK(std::isfinite(s.position.x));
      CHECK(std::isfinite(s.position.y));
      CHECK(s.velocity.norm() <= w.v0 + 1e-12);
      const auto moved = s.position - t.steps[k - 1].position;
      CHECK(std::fabs(moved.x - s.velocity.x) < 1e-9);
      CHECK(std::fabs(moved.y - s.velocity.y) < 1e-9);
      CHECK(s.state.size() == w.neurons);
    }
  }
  const auto again = simulate_ensemble(w, 20, 3, 1);
  CHECK(format_trajectories(again) == format_trajectories(ens));
}

TEST_CASE("two symmetric targets: balanced choice and midpoint heading") {
  const auto w = two_targets();
  const auto ens = simulate_ensemble(w, 100, 11, 2);
  const auto f = choice_fractions(w, ens);
  CHECK(f[0] + f[1] == doctest::Approx(1.0));
  CHECK(std::fabs(f[0] - 0.5) <= 0.15);
  // early heading: mean displacement after 20 steps points at the midpoint (x = 500)
  Vec2 mean;
  for (const auto& t : ens) mean = mean + (t.steps[20].position - w.start);
  mean = (1.0 / 100) * mean;
  CHECK(mean.y > 0);
  CHECK(std::fabs(mean.x) < 0.2 * mean.y);
  const auto bif = find_bifurcation(w, ens);
  REQUIRE(bif.has_value());
  CHECK(bif->progress > 0);
  CHECK(bif->progress < 1000);
  CHECK(decision_entropy(f) > 0.6);
}

TEST_CASE("large memory weight freezes the state between steps") {
  FlyWorld w = two_targets();
  w.alpha_mem = 12;
  w.max_steps = 40;
  const auto t = simulate_trajectory(w, 5);
  std::size_t same = 0, total = 0;
  for (std::size_t k = 2; k < t.steps.size(); ++k) {
    ++total;
    same += t.steps[k].state == t.steps[k - 1].state;
  }
  CHECK(static_cast<double>(same) / total > 0.9);
}

TEST_CASE("decision entropy and fractions") {
  CHECK(decision_entropy({0.5, 0.5}) == doctest::Approx(std::log(2.0)));
  CHECK(decision_entropy({1.0, 0.0, 0.0}) == 0.0);
  CHECK(decision_entropy({0.25, 0.25}) == doctest::Approx(std::log(2.0)));
  FlyWorld w = two_targets();
  Trajectory a, b, c;
  a.target = 0;
  a.termination = Termination::ReachedTarget;
  b.target = 1;
  b.termination = Termination::ReachedTarget;
  c.termination = Termination::StepCap;
  CHECK(choice_fractions(w, {a, b, c, a}) == std::vector<double>{0.5, 0.25});
}
