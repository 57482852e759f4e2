#pragma once

#include <string>
#include <vector>

#include "passim/sampler.hpp"

namespace passim {

/// Event trace CSV:
///   # <header lines>             provenance, one "key: value" per line
///   # initial: 0110...            initial up bits, neuron 0 first
///   time,neuron,value             value = new up bit
/// Times use 17 significant digits.
std::string format_event_trace(const EventTrace& trace, const std::vector<std::string>& header = {});
EventTrace parse_event_trace(const std::string& text);

/// Snapshot trace CSV: "sample_index,state" where state is the packed bit
/// vector in hex, byte k holding neurons 8k..8k+7 (bit b = neuron 8k+b).
std::string format_snapshot_trace(const SnapshotTrace& trace,
                                  const std::vector<std::string>& header = {});
SnapshotTrace parse_snapshot_trace(const std::string& text);

std::string pack_bits_hex(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> unpack_bits_hex(const std::string& hex, std::size_t n);

}  // namespace passim
