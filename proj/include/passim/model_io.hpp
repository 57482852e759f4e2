#pragma once

#include <string>
#include <vector>

#include "passim/model.hpp"

namespace passim {

/// Plain-text model format shared by every CLI subcommand:
///
///   # free-form comment lines
///   domain plus_minus | zero_one
///   sign   ferromagnetic | as_written
///   spins  <n>
///   biases
///   <index> <value>          (omitted indices are 0)
///   couplings
///   <i> <j> <value>          (one line per unordered pair)
///
/// Values are written with 17 significant digits so that a write/read cycle
/// reproduces the model exactly.
IsingModel parse_model(const std::string& text);
IsingModel read_model(const std::string& path);
std::string format_model(const IsingModel& model, const std::vector<std::string>& comments = {});
void write_model(const std::string& path, const IsingModel& model,
                 const std::vector<std::string>& comments = {});

}  // namespace passim
