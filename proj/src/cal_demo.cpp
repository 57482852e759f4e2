#include "passim/cal_demo.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "passim/error.hpp"
#include "passim/exact.hpp"
#include "passim/sampler.hpp"
#include "passim/trace_io.hpp"

namespace passim {

CalDemoReport run_cal_demo(const BinaryGrid& mask, const CalDemoConfig& config) {
  if (!(config.duration > 0.0) || !(config.sample_rate > 0.0)) {
    throw InvalidInput("cal-demo duration and sample rate must be positive");
  }
  if (config.energy_stride == 0) throw InvalidInput("energy stride must be >= 1");
  const IsingModel model = encode_mask_ground_state(mask, config.magnitude);
  const std::size_t n = model.size();
  const auto params = uniform_params(n, config.lambda0);

  AsyncConfig ac;
  ac.seed = config.seed;
  ac.circuit_delay = config.circuit_delay;
  ac.stop = StopAtTime{config.duration};
  const EventTrace trace = run_async(model, params, ac);
  ClockOptions clock;
  clock.rate = config.sample_rate;
  const SnapshotTrace snaps = sample_clock(trace, clock);

  std::vector<std::uint8_t> complement(mask.cells.size());
  for (std::size_t k = 0; k < n; ++k) complement[k] = mask.cells[k] ? 0 : 1;

  CalDemoReport rep;
  rep.n = n;
  rep.snapshots = snaps.count();
  std::map<std::string, std::size_t> visits;
  std::size_t on_mask = 0, on_comp = 0;
  for (std::size_t k = 0; k < snaps.count(); ++k) {
    const auto s = snaps.snapshot(k);
    const bool is_mask = std::equal(s.begin(), s.end(), mask.cells.begin());
    const bool is_comp = std::equal(s.begin(), s.end(), complement.begin());
    on_mask += is_mask;
    on_comp += is_comp;
    if ((is_mask || is_comp) && !rep.first_hit_time) rep.first_hit_time = k * snaps.period;
    ++visits[pack_bits_hex(s)];
    if (k % config.energy_stride == 0) {
      rep.energy_times.push_back(k * snaps.period);
      rep.energies.push_back(energy(model, state_from_bits(s, model.domain())));
    }
  }
  const double count = static_cast<double>(snaps.count());
  rep.mask_fraction = on_mask / count;
  rep.complement_fraction = on_comp / count;
  rep.hit_fraction = (on_mask + on_comp) / count;
  // Ties go to the lexicographically first packed state.
  auto best = visits.begin();
  for (auto it = visits.begin(); it != visits.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  rep.most_visited = unpack_bits_hex(best->first, n);
  rep.most_visited_fraction = best->second / count;
  rep.most_visited_is_target = rep.most_visited == mask.cells || rep.most_visited == complement;

  if (n <= kMaxExactSpins) {
    const auto dist = exact_distribution(model);
    auto ground = dist.ground_states();
    std::vector<std::uint64_t> expected{state_index(mask.cells), state_index(complement)};
    std::sort(ground.begin(), ground.end());
    std::sort(expected.begin(), expected.end());
    expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
    rep.oracle_confirms_targets = ground == expected;
  }
  return rep;
}

std::string format_cal_report(const CalDemoReport& rep, const std::vector<std::string>& header) {
  std::string out;
  for (const auto& h : header) out += "# " + h + "\n";
  char buf[160];
  const auto line = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
  };
  line("# spins %zu\n", rep.n);
  line("# snapshots %zu\n", rep.snapshots);
  line("# mask_fraction %.9f\n", rep.mask_fraction);
  line("# complement_fraction %.9f\n", rep.complement_fraction);
  line("# hit_fraction %.9f\n", rep.hit_fraction);
  out += "# most_visited " + pack_bits_hex(rep.most_visited) + "\n";
  line("# most_visited_fraction %.9f\n", rep.most_visited_fraction);
  line("# most_visited_is_target %s\n", rep.most_visited_is_target ? "yes" : "no");
  if (rep.first_hit_time) {
    line("# first_hit_time %.17g\n", *rep.first_hit_time);
  } else {
    out += "# first_hit_time none\n";
  }
  if (rep.oracle_confirms_targets) {
    line("# oracle_argmin_is_mask_pair %s\n", *rep.oracle_confirms_targets ? "yes" : "no");
  } else {
    out += "# oracle_argmin_is_mask_pair not_checked\n";
  }
  out += "time,energy\n";
  for (std::size_t k = 0; k < rep.energies.size(); ++k) {
    line("%.17g,%.17g\n", rep.energy_times[k], rep.energies[k]);
  }
  return out;
}

}  // namespace passim
