#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "passim/model.hpp"

namespace passim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
  double norm() const;
};

struct FlyWorld {
  std::vector<Vec2> targets;
  Vec2 start{500.0, 0.0};
  double v0 = 10.0;           // distance per step at full, aligned activity
  double eta = 1.0;
  std::size_t neurons = 24;   // N, split into contiguous blocks of N / k per target
  double alpha_mem = 3.0;     // bias toward the previous step's value
  double gain = 4.0;          // inverse neural temperature applied to all couplings
  std::size_t max_steps = 2000;
  double reach_fraction = 0.01;  // epsilon as a fraction of the start-target distance
  double lambda0 = 150e6;
  double step_events = 150e6 * 41e-6;  // expected updates per neuron per step
};

/// Throws InvalidInput unless k >= 1, N divisible by k, v0 > 0, eta > 0.
void validate(const FlyWorld& world);

/// Target index of each neuron.
std::vector<std::size_t> neuron_targets(const FlyWorld& world);

/// Unit vectors from `position` toward each neuron's target. Returns
/// nullopt when the position is within epsilon of some target.
std::optional<std::vector<Vec2>> goal_vectors(const FlyWorld& world, Vec2 position);

/// J_ij = cos(pi (theta_ij / pi)^eta), theta_ij the angle between goal
/// vectors; returned row-major N x N with unit diagonal.
std::vector<double> couplings_from_angles(const std::vector<Vec2>& goals, double eta);

/// {0,1} model with energy -(gain k / N) sum_{i<j} J_ij s_i s_j
/// - alpha sum_i (2 s_prev_i - 1) s_i; memory biases are zero without a
/// previous state.
IsingModel build_fly_model(const FlyWorld& world, const std::vector<Vec2>& goals,
                           const std::vector<std::uint8_t>* previous);

/// (v0 / N) sum_i goal_i s_i.
Vec2 velocity(const std::vector<std::uint8_t>& state, const std::vector<Vec2>& goals, double v0);

enum class Termination { ReachedTarget, StepCap };

struct TrajectoryStep {
  Vec2 position;
  std::vector<std::uint8_t> state;  // empty for the initial row
  Vec2 velocity;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;  // steps[0] is the start
  Termination termination = Termination::StepCap;
  std::optional<std::size_t> target;  // reached target
};

Trajectory simulate_trajectory(const FlyWorld& world, std::uint64_t seed);

/// Trajectories for seeds derive_seed(seed, {trial}).
std::vector<Trajectory> simulate_ensemble(const FlyWorld& world, std::size_t trials,
                                          std::uint64_t seed, unsigned jobs = 1);

struct Bifurcation {
  std::size_t step = 0;
  Vec2 centroid;        // ensemble centroid at the split step
  double progress = 0;  // centroid projection on the start -> target-centroid axis
};

/// First step where 2-means splits the ensemble positions into clusters
/// whose centroid distance exceeds `ratio` x the mean within-cluster
/// distance and one step length (v0). Finished trajectories hold their
/// final position.
std::optional<Bifurcation> find_bifurcation(const FlyWorld& world,
                                            const std::vector<Trajectory>& ensemble,
                                            double ratio = 4.0);

/// Fraction of trajectories ending at each target (StepCap runs count in none).
std::vector<double> choice_fractions(const FlyWorld& world, const std::vector<Trajectory>& ensemble);

/// Shannon entropy (nats) of the choice fractions, renormalized over finished runs.
double decision_entropy(const std::vector<double>& fractions);

/// CSV trial,step,x,y,vx,vy.
std::string format_trajectories(const std::vector<Trajectory>& ensemble,
                                const std::vector<std::string>& header = {});

}  // namespace passim
