#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "passim/error.hpp"
#include "passim/sampler.hpp"
#include "passim/trace_io.hpp"

namespace passim {

std::vector<std::uint8_t> replay_at(const EventTrace& trace, double t) {
  std::vector<std::uint8_t> up = trace.initial;
  for (const auto& e : trace.events) {
    if (e.time > t) break;
    up[e.neuron] = e.up;
  }
  return up;
}

SnapshotTrace sample_clock(const EventTrace& trace, const ClockOptions& options) {
  if (!(options.rate > 0.0) || !std::isfinite(options.rate)) {
    throw InvalidInput("sampling rate must be positive");
  }
  if (options.rows_per_sample == 0) throw InvalidInput("rows_per_sample must be >= 1");
  const std::size_t n = trace.size();
  const std::size_t width = options.row_width == 0 ? n : options.row_width;
  const std::size_t k = options.rows_per_sample;
  const double duration = options.duration < 0 ? trace.final_time : options.duration;

  SnapshotTrace out;
  out.n = n;
  out.period = static_cast<double>(k) / options.rate;
  out.lambda0 = trace.lambda0;
  out.seed = trace.seed;
  out.tau_circ = trace.tau_circ;
  const auto count =
      static_cast<std::size_t>(std::floor(duration * options.rate / static_cast<double>(k) * (1 + 1e-12))) + 1;
  out.bits.resize(count * n);

  std::vector<std::uint8_t> state = trace.initial;
  std::size_t next_event = 0;
  for (std::size_t m = 0; m < count; ++m) {
    for (std::size_t g = 0; g < k; ++g) {
      const double t = std::min(static_cast<double>(m * k + g) / options.rate, std::max(duration, 0.0));
      while (next_event < trace.events.size() && trace.events[next_event].time <= t) {
        const auto& e = trace.events[next_event++];
        state[e.neuron] = e.up;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if ((i / width) % k == g) out.bits[m * n + i] = state[i];
      }
    }
  }
  return out;
}

double stale_field(const EventTrace& trace, const IsingModel& model, std::size_t i, double t,
                   double tau) {
  if (trace.size() != model.size()) throw InvalidInput("trace and model sizes differ");
  if (i >= model.size()) throw InvalidInput("spin index out of range");
  const auto seen = replay_at(trace, t - tau);
  const auto state = state_from_bits(seen, model.domain());
  return local_field(model, state, i);
}

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string provenance(double lambda0, std::uint64_t seed, double tau, std::size_t n) {
  return "# n: " + std::to_string(n) + "\n# lambda0: " + fmt_double(lambda0) +
         "\n# seed: " + std::to_string(seed) + "\n# tau_circ: " + fmt_double(tau) + "\n";
}

/// Collects "# key: value" header lines; returns the first data line index.
std::map<std::string, std::string> read_header(std::istringstream& in, std::string& first_data) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] != '#') {
      first_data = line;
      break;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    auto key = line.substr(1, colon - 1);
    auto value = line.substr(colon + 1);
    key.erase(0, key.find_first_not_of(' '));
    value.erase(0, value.find_first_not_of(' '));
    kv.emplace(key, value);
  }
  return kv;
}

const std::string& need(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw InvalidInput("trace header missing '" + key + "'");
  return it->second;
}

}  // namespace

std::string pack_bits_hex(std::span<const std::uint8_t> bits) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t base = 0; base < bits.size(); base += 8) {
    unsigned byte = 0;
    for (std::size_t b = 0; b < 8 && base + b < bits.size(); ++b) {
      if (bits[base + b]) byte |= 1U << b;
    }
    out.push_back(digits[byte >> 4]);
    out.push_back(digits[byte & 15U]);
  }
  return out;
}

std::vector<std::uint8_t> unpack_bits_hex(const std::string& hex, std::size_t n) {
  if (hex.size() != 2 * ((n + 7) / 8)) throw InvalidInput("packed state has wrong length");
  const auto nibble = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    throw InvalidInput(std::string("invalid hex digit '") + c + "'");
  };
  std::vector<std::uint8_t> bits(n);
  for (std::size_t k = 0; k < hex.size() / 2; ++k) {
    const unsigned byte = nibble(hex[2 * k]) << 4 | nibble(hex[2 * k + 1]);
    for (std::size_t b = 0; b < 8 && 8 * k + b < n; ++b) bits[8 * k + b] = (byte >> b) & 1U;
  }
  return bits;
}

std::string format_event_trace(const EventTrace& trace, const std::vector<std::string>& header) {
  std::string out = "# passim event trace\n";
  for (const auto& h : header) out += "# " + h + "\n";
  out += provenance(trace.lambda0, trace.seed, trace.tau_circ, trace.size());
  out += "# final_time: " + fmt_double(trace.final_time) + "\n# initial: ";
  for (auto b : trace.initial) out.push_back(b ? '1' : '0');
  out += "\ntime,neuron,value\n";
  for (const auto& e : trace.events) {
    out += fmt_double(e.time) + "," + std::to_string(e.neuron) + "," + (e.up ? "1" : "0") + "\n";
  }
  return out;
}

EventTrace parse_event_trace(const std::string& text) {
  std::istringstream in(text);
  std::string first;
  const auto kv = read_header(in, first);
  EventTrace t;
  const auto n = std::stoul(need(kv, "n"));
  t.lambda0 = std::stod(need(kv, "lambda0"));
  t.seed = std::stoull(need(kv, "seed"));
  t.tau_circ = std::stod(need(kv, "tau_circ"));
  t.final_time = std::stod(need(kv, "final_time"));
  const auto& init = need(kv, "initial");
  if (init.size() != n) throw InvalidInput("initial state length does not match n");
  for (char c : init) t.initial.push_back(c == '1' ? 1 : 0);
  if (first != "time,neuron,value") throw InvalidInput("event trace missing column header");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c)) {
      throw InvalidInput("malformed event row '" + line + "'");
    }
    const auto neuron = std::stoul(b);
    if (neuron >= n) throw InvalidInput("event neuron out of range");
    t.events.push_back({std::stod(a), static_cast<std::uint32_t>(neuron),
                        static_cast<std::uint8_t>(c == "1" ? 1 : 0)});
  }
  return t;
}

std::string format_snapshot_trace(const SnapshotTrace& trace,
                                  const std::vector<std::string>& header) {
  std::string out = "# passim snapshot trace\n";
  for (const auto& h : header) out += "# " + h + "\n";
  out += provenance(trace.lambda0, trace.seed, trace.tau_circ, trace.n);
  out += "# period: " + fmt_double(trace.period) + "\nsample_index,state\n";
  for (std::size_t k = 0; k < trace.count(); ++k) {
    out += std::to_string(k) + "," + pack_bits_hex(trace.snapshot(k)) + "\n";
  }
  return out;
}

SnapshotTrace parse_snapshot_trace(const std::string& text) {
  std::istringstream in(text);
  std::string first;
  const auto kv = read_header(in, first);
  SnapshotTrace t;
  t.n = std::stoul(need(kv, "n"));
  t.lambda0 = std::stod(need(kv, "lambda0"));
  t.seed = std::stoull(need(kv, "seed"));
  t.tau_circ = std::stod(need(kv, "tau_circ"));
  t.period = std::stod(need(kv, "period"));
  if (first != "sample_index,state") throw InvalidInput("snapshot trace missing column header");
  std::string line;
  std::size_t expect = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidInput("malformed snapshot row");
    if (std::stoul(line.substr(0, comma)) != expect++) throw InvalidInput("snapshot rows out of order");
    const auto bits = unpack_bits_hex(line.substr(comma + 1), t.n);
    t.bits.insert(t.bits.end(), bits.begin(), bits.end());
  }
  return t;
}

}  // namespace passim
