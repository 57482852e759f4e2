#include "passim/quantize.hpp"

#include <algorithm>
#include <cmath>

#include "passim/error.hpp"

namespace passim {

QuantizedModel quantize(const IsingModel& model, int weight_bits, int accumulator_bits) {
  if (weight_bits < 2 || weight_bits > 31) throw InvalidInput("weight_bits must be in [2, 31]");
  if (accumulator_bits < 2 || accumulator_bits > 31) {
    throw InvalidInput("accumulator_bits must be in [2, 31]");
  }
  double max_abs = 0.0;
  for (const auto& c : model.couplings()) max_abs = std::max(max_abs, std::abs(c.weight));
  for (double b : model.biases()) max_abs = std::max(max_abs, std::abs(b));
  if (!(max_abs > 0.0) || !std::isfinite(max_abs)) {
    throw NumericError("cannot quantize a model whose parameters are all zero or non-finite");
  }

  QuantizedModel q;
  q.weight_bits = weight_bits;
  q.accumulator_bits = accumulator_bits;
  q.domain = model.domain();
  q.sign = model.sign();
  q.n = model.size();
  q.scale = max_abs / q.max_code();
  const auto code_of = [&](double v) {
    // std::lround rounds half away from zero.
    const long c = std::lround(v / q.scale);
    return static_cast<int>(std::clamp<long>(c, -q.max_code(), q.max_code()));
  };
  for (const auto& c : model.couplings()) {
    q.weight_codes.push_back(code_of(c.weight));
    q.pairs.push_back({c.i, c.j, q.weight_codes.back() * q.scale});
  }
  for (double b : model.biases()) q.bias_codes.push_back(code_of(b));
  return q;
}

IsingModel QuantizedModel::dequantize() const {
  std::vector<double> bs(bias_codes.size());
  for (std::size_t k = 0; k < bs.size(); ++k) bs[k] = bias_codes[k] * scale;
  return IsingModel(n, pairs, std::move(bs), domain, sign);
}

int QuantizedModel::accumulate(std::span<const std::uint8_t> up, std::size_t i) const {
  if (up.size() != n || i >= n) throw InvalidInput("accumulate: state/index mismatch");
  long acc = bias_codes[i];
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    if (p.i == i && up[p.j]) acc += weight_codes[k];
    if (p.j == i && up[p.i]) acc += weight_codes[k];
  }
  const long lim = accumulator_limit();
  return static_cast<int>(std::clamp(acc, -lim, lim));
}

}  // namespace passim
