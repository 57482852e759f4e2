#include "passim/fly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "passim/error.hpp"
#include "passim/parallel.hpp"
#include "passim/rng.hpp"
#include "passim/sampler.hpp"

namespace passim {

double Vec2::norm() const { return std::hypot(x, y); }

void validate(const FlyWorld& w) {
  const std::size_t k = w.targets.size();
  if (k == 0) throw InvalidInput("fly world needs at least one target");
  if (w.neurons == 0 || w.neurons % k != 0) {
    throw InvalidInput("neuron count " + std::to_string(w.neurons) +
                       " must be a positive multiple of the target count " + std::to_string(k));
  }
  if (!(w.v0 > 0) || !(w.eta > 0) || !(w.gain >= 0) || !(w.lambda0 > 0) || !(w.step_events > 0) ||
      !(w.reach_fraction > 0) || !std::isfinite(w.alpha_mem)) {
    throw InvalidInput("fly world needs v0, eta, lambda0, step_events, reach_fraction > 0 and gain >= 0");
  }
  for (const auto& t : w.targets) {
    if ((t - w.start).norm() == 0.0) throw InvalidInput("fly starts on a target");
  }
}

std::vector<std::size_t> neuron_targets(const FlyWorld& w) {
  const std::size_t block = w.neurons / w.targets.size();
  std::vector<std::size_t> out(w.neurons);
  for (std::size_t i = 0; i < w.neurons; ++i) out[i] = i / block;
  return out;
}

namespace {

double reach_radius(const FlyWorld& w, std::size_t t) {
  return w.reach_fraction * (w.targets[t] - w.start).norm();
}

std::optional<std::size_t> reached(const FlyWorld& w, Vec2 p) {
  for (std::size_t t = 0; t < w.targets.size(); ++t) {
    if ((w.targets[t] - p).norm() <= reach_radius(w, t)) return t;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::vector<Vec2>> goal_vectors(const FlyWorld& w, Vec2 position) {
  validate(w);
  if (reached(w, position)) return std::nullopt;
  const auto owner = neuron_targets(w);
  std::vector<Vec2> out(w.neurons);
  for (std::size_t i = 0; i < w.neurons; ++i) {
    const Vec2 d = w.targets[owner[i]] - position;
    out[i] = (1.0 / d.norm()) * d;
  }
  return out;
}

std::vector<double> couplings_from_angles(const std::vector<Vec2>& goals, double eta) {
  if (!(eta > 0)) throw InvalidInput("eta must be positive");
  const std::size_t n = goals.size();
  std::vector<double> j(n * n, 1.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dot = goals[a].x * goals[b].x + goals[a].y * goals[b].y;
      const double cross = goals[a].x * goals[b].y - goals[a].y * goals[b].x;
      const double theta = std::abs(std::atan2(cross, dot));  // in [0, pi]
      const double v = std::cos(std::numbers::pi * std::pow(theta / std::numbers::pi, eta));
      j[a * n + b] = j[b * n + a] = std::clamp(v, -1.0, 1.0);
    }
  }
  return j;
}

IsingModel build_fly_model(const FlyWorld& w, const std::vector<Vec2>& goals,
                           const std::vector<std::uint8_t>* previous) {
  const std::size_t n = goals.size();
  if (n != w.neurons) throw InvalidInput("goal vector count does not match neuron count");
  if (previous && previous->size() != n) throw InvalidInput("previous state has the wrong length");
  const auto j = couplings_from_angles(goals, w.eta);
  const double scale = w.gain * static_cast<double>(w.targets.size()) / static_cast<double>(n);
  std::vector<Coupling> c;
  c.reserve(n * (n - 1) / 2);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) c.push_back({a, b, scale * j[a * n + b]});
  }
  std::vector<double> bias(n, 0.0);
  if (previous) {
    for (std::size_t i = 0; i < n; ++i) bias[i] = w.alpha_mem * ((*previous)[i] ? 1.0 : -1.0);
  }
  return IsingModel(n, std::move(c), std::move(bias), SpinDomain::ZeroOne, EnergySign::Ferromagnetic);
}

Vec2 velocity(const std::vector<std::uint8_t>& state, const std::vector<Vec2>& goals, double v0) {
  if (state.size() != goals.size() || goals.empty()) throw InvalidInput("state/goal size mismatch");
  Vec2 v;
  for (std::size_t i = 0; i < goals.size(); ++i) {
    if (state[i]) v = v + goals[i];
  }
  return (v0 / static_cast<double>(goals.size())) * v;
}

Trajectory simulate_trajectory(const FlyWorld& w, std::uint64_t seed) {
  validate(w);
  Trajectory tr;
  Vec2 pos = w.start;
  tr.steps.push_back({pos, {}, {}});
  std::vector<std::uint8_t> prev;
  const auto params = uniform_params(w.neurons, w.lambda0);
  for (std::size_t step = 0; step < w.max_steps; ++step) {
    const auto goals = goal_vectors(w, pos);
    if (!goals) break;
    const IsingModel model = build_fly_model(w, *goals, prev.empty() ? nullptr : &prev);
    AsyncConfig cfg;
    cfg.seed = derive_seed(seed, {step});
    cfg.stop = StopAtTime{w.step_events / w.lambda0};
    AsyncSampler sampler(model, params, cfg);
    sampler.run();
    prev.assign(sampler.bits().begin(), sampler.bits().end());
    const Vec2 v = velocity(prev, *goals, w.v0);
    pos = pos + v;
    if (!std::isfinite(pos.x) || !std::isfinite(pos.y)) throw NumericError("fly position diverged");
    tr.steps.push_back({pos, prev, v});
  }
  tr.target = reached(w, pos);
  tr.termination = tr.target ? Termination::ReachedTarget : Termination::StepCap;
  return tr;
}

std::vector<Trajectory> simulate_ensemble(const FlyWorld& w, std::size_t trials, std::uint64_t seed,
                                          unsigned jobs) {
  validate(w);
  std::vector<Trajectory> out(trials);
  parallel_for(trials, jobs, [&](std::size_t k) {
    out[k] = simulate_trajectory(w, derive_seed(seed, {k}));
  });
  return out;
}

std::optional<Bifurcation> find_bifurcation(const FlyWorld& w, const std::vector<Trajectory>& ens,
                                            double ratio) {
  if (ens.size() < 2) throw InvalidInput("bifurcation needs at least two trajectories");
  std::size_t longest = 0;
  for (const auto& t : ens) longest = std::max(longest, t.steps.size());
  Vec2 target_centroid;
  for (const auto& t : w.targets) target_centroid = target_centroid + t;
  target_centroid = (1.0 / static_cast<double>(w.targets.size())) * target_centroid;
  const Vec2 axis = target_centroid - w.start;
  const double axis_len = axis.norm();

  std::vector<Vec2> pts(ens.size());
  std::vector<int> label(ens.size());
  for (std::size_t step = 0; step < longest; ++step) {
    Vec2 centroid;
    for (std::size_t k = 0; k < ens.size(); ++k) {
      const auto& s = ens[k].steps;
      pts[k] = s[std::min(step, s.size() - 1)].position;
      centroid = centroid + pts[k];
    }
    centroid = (1.0 / static_cast<double>(pts.size())) * centroid;
    // Deterministic seeding: farthest point from the centroid, then the
    // farthest point from that one.
    const auto farthest = [&](Vec2 from) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < pts.size(); ++k) {
        if ((pts[k] - from).norm() > (pts[best] - from).norm()) best = k;
      }
      return pts[best];
    };
    Vec2 c[2];
    c[0] = farthest(centroid);
    c[1] = farthest(c[0]);
    if ((c[0] - c[1]).norm() == 0.0) continue;
    for (int iter = 0; iter < 100; ++iter) {
      bool changed = false;
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const int l = (pts[k] - c[0]).norm() <= (pts[k] - c[1]).norm() ? 0 : 1;
        changed |= (iter == 0 || l != label[k]);
        label[k] = l;
      }
      Vec2 sum[2];
      double count[2] = {0, 0};
      for (std::size_t k = 0; k < pts.size(); ++k) {
        sum[label[k]] = sum[label[k]] + pts[k];
        count[label[k]] += 1;
      }
      for (int l = 0; l < 2; ++l) {
        if (count[l] > 0) c[l] = (1.0 / count[l]) * sum[l];
      }
      if (!changed) break;
    }
    double spread = 0;
    for (std::size_t k = 0; k < pts.size(); ++k) spread += (pts[k] - c[label[k]]).norm();
    spread /= static_cast<double>(pts.size());
    const double between = (c[0] - c[1]).norm();
    // A split narrower than one step is lattice noise from the first moves.
    if (between > w.v0 && between > ratio * spread) {
      Bifurcation b;
      b.step = step;
      b.centroid = centroid;
      const Vec2 rel = centroid - w.start;
      b.progress = (rel.x * axis.x + rel.y * axis.y) / axis_len;
      return b;
    }
  }
  return std::nullopt;
}

std::vector<double> choice_fractions(const FlyWorld& w, const std::vector<Trajectory>& ens) {
  std::vector<double> f(w.targets.size(), 0.0);
  if (ens.empty()) return f;
  for (const auto& t : ens) {
    if (t.target) f[*t.target] += 1.0;
  }
  for (auto& v : f) v /= static_cast<double>(ens.size());
  return f;
}

double decision_entropy(const std::vector<double>& fractions) {
  double total = 0;
  for (double v : fractions) total += v;
  if (total <= 0) return 0.0;
  double h = 0;
  for (double v : fractions) {
    if (v > 0) h -= (v / total) * std::log(v / total);
  }
  return h;
}

std::string format_trajectories(const std::vector<Trajectory>& ens, const std::vector<std::string>& header) {
  std::string out;
  for (const auto& h : header) out += "# " + h + "\n";
  out += "trial,step,x,y,vx,vy\n";
  char buf[192];
  for (std::size_t k = 0; k < ens.size(); ++k) {
    for (std::size_t s = 0; s < ens[k].steps.size(); ++s) {
      const auto& st = ens[k].steps[s];
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,%.17g\n", k, s, st.position.x,
                    st.position.y, st.velocity.x, st.velocity.y);
      out += buf;
    }
  }
  return out;
}

}  // namespace passim
