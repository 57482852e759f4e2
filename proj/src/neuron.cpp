#include "passim/neuron.hpp"

#include <algorithm>
#include <cmath>

#include "passim/error.hpp"
#include "passim/model.hpp"

namespace passim {

double NeuronParams::activation(double x) const noexcept {
  return logistic(slope * (gain * x + offset - threshold));
}

void validate(const NeuronParams& p) {
  if (!(p.lambda0 > 0.0) || !std::isfinite(p.lambda0)) {
    throw InvalidInput("lambda0 must be positive and finite");
  }
  if (!(p.slope > 0.0)) throw InvalidInput("sigmoid slope must be positive");
  if (!std::isfinite(p.slope) || !std::isfinite(p.threshold) || !std::isfinite(p.gain) ||
      !std::isfinite(p.offset)) {
    throw NumericError("neuron parameters must be finite");
  }
}

std::vector<NeuronParams> uniform_params(std::size_t n, double lambda0) {
  NeuronParams p;
  p.lambda0 = lambda0;
  validate(p);
  return std::vector<NeuronParams>(n, p);
}

std::vector<NeuronParams> make_varied_params(std::size_t n, const NeuronParams& base,
                                             const VariationSpec& spec, std::uint64_t seed) {
  if (spec.slope_log_sigma < 0 || spec.threshold_sigma < 0 || spec.dead_probability < 0 ||
      spec.dead_probability > 1) {
    throw InvalidInput("variation spreads must be non-negative and dead probability in [0, 1]");
  }
  validate(base);
  std::vector<NeuronParams> out(n, base);
  for (std::size_t k = 0; k < n; ++k) {
    Rng rng(derive_seed(seed, {k}));
    const double z_slope = rng.normal();
    const double z_thr = rng.normal();
    const double u_dead = rng.uniform();
    out[k].slope = base.slope * std::exp(spec.slope_log_sigma * z_slope);
    out[k].threshold = base.threshold + spec.threshold_sigma * z_thr;
    out[k].dead = base.dead || u_dead < spec.dead_probability;
  }
  return out;
}

ActivationSweep sweep_bias(const NeuronParams& neuron, int max_code, double field_per_code,
                           std::uint32_t samples_per_code, Rng& rng) {
  if (max_code < 1 || samples_per_code == 0) throw InvalidInput("empty bias sweep");
  ActivationSweep s;
  s.samples_per_code = samples_per_code;
  // A dead neuron sits at whatever it powered up to; draw that once.
  const bool stuck_up = rng.bernoulli(0.5);
  for (int code = -max_code; code <= max_code; ++code) {
    const double x = code * field_per_code;
    std::uint32_t ups = 0;
    if (neuron.dead) {
      ups = stuck_up ? samples_per_code : 0;
    } else {
      const double p = neuron.activation(x);
      for (std::uint32_t k = 0; k < samples_per_code; ++k) ups += rng.bernoulli(p) ? 1U : 0U;
    }
    s.inputs.push_back(x);
    s.ups.push_back(ups);
  }
  return s;
}

SigmoidFit fit_sigmoid(const ActivationSweep& sweep, double min_span) {
  if (sweep.inputs.empty() || sweep.inputs.size() != sweep.ups.size()) {
    throw InvalidInput("malformed activation sweep");
  }
  const double m = sweep.samples_per_code;
  const double lo = sweep.ups.front() / m;
  const double hi = sweep.ups.back() / m;
  if (hi - lo < min_span) return {1.0, 0.0, true};

  // Parameterize as sigma(u + v x): u = -a b, v = a. Newton on the
  // binomial log-likelihood, with step halving.
  double u = 0.0, v = 1.0;
  const auto loglik = [&](double uu, double vv) {
    double ll = 0.0;
    for (std::size_t k = 0; k < sweep.inputs.size(); ++k) {
      const double z = uu + vv * sweep.inputs[k];
      // log sigma(z) = -log1p(exp(-z)), log(1 - sigma(z)) = -log1p(exp(z))
      const double lp = z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
      const double lq = lp - z;
      ll += sweep.ups[k] * lp + (m - sweep.ups[k]) * lq;
    }
    return ll;
  };
  double current = loglik(u, v);
  for (int iter = 0; iter < 200; ++iter) {
    double g0 = 0, g1 = 0, h00 = 0, h01 = 0, h11 = 0;
    for (std::size_t k = 0; k < sweep.inputs.size(); ++k) {
      const double x = sweep.inputs[k];
      const double p = logistic(u + v * x);
      const double r = sweep.ups[k] - m * p;
      const double w = m * p * (1 - p);
      g0 += r;
      g1 += r * x;
      h00 += w;
      h01 += w * x;
      h11 += w * x * x;
    }
    const double det = h00 * h11 - h01 * h01;
    if (!(det > 0)) break;
    double du = (h11 * g0 - h01 * g1) / det;
    double dv = (h00 * g1 - h01 * g0) / det;
    double step = 1.0;
    double next = loglik(u + du, v + dv);
    while (next < current && step > 1e-6) {
      step *= 0.5;
      next = loglik(u + step * du, v + step * dv);
    }
    u += step * du;
    v += step * dv;
    const bool done = std::abs(next - current) < 1e-10 * (1 + std::abs(current));
    current = next;
    if (done) break;
  }
  if (!(v > 0) || !std::isfinite(u) || !std::isfinite(v)) return {1.0, 0.0, true};
  return {v, -u / v, false};
}

void apply_correction(NeuronParams& neuron, const SigmoidFit& fit) {
  if (fit.dead) {
    neuron.dead = true;
    return;
  }
  // slope * (gain x + offset - threshold) ~= x  when gain = 1/slope, offset = threshold
  neuron.gain = 1.0 / fit.slope;
  neuron.offset = fit.threshold;
}

}  // namespace passim
