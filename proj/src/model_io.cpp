#include "passim/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "passim/error.hpp"

namespace passim {
namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw InvalidInput("model file line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

IsingModel parse_model(const std::string& text) {
  std::optional<SpinDomain> domain;
  std::optional<EnergySign> sign;
  std::optional<std::size_t> n;
  enum class Section { Header, Biases, Couplings } section = Section::Header;
  std::vector<std::pair<std::size_t, double>> bias_entries;
  std::vector<Coupling> couplings;
  std::set<std::pair<std::size_t, std::size_t>> seen_pairs;

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;

    if (head == "biases") {
      section = Section::Biases;
      continue;
    }
    if (head == "couplings") {
      section = Section::Couplings;
      continue;
    }
    if (section == Section::Header) {
      std::string value;
      if (!(ls >> value)) fail(line_no, "missing value for '" + head + "'");
      if (head == "domain") {
        domain = parse_spin_domain(value);
      } else if (head == "sign") {
        sign = parse_energy_sign(value);
      } else if (head == "spins") {
        std::size_t v = 0;
        const auto r = std::from_chars(value.data(), value.data() + value.size(), v);
        if (r.ec != std::errc{} || v == 0) fail(line_no, "invalid spin count '" + value + "'");
        n = v;
      } else {
        fail(line_no, "unknown header key '" + head + "'");
      }
      continue;
    }
    if (!n) fail(line_no, "'spins' must precede the data sections");
    std::istringstream row(line);
    if (section == Section::Biases) {
      std::size_t i = 0;
      double v = 0.0;
      if (!(row >> i >> v)) fail(line_no, "expected '<index> <value>'");
      if (i >= *n) fail(line_no, "bias index out of range");
      bias_entries.emplace_back(i, v);
    } else {
      std::size_t i = 0, j = 0;
      double v = 0.0;
      if (!(row >> i >> j >> v)) fail(line_no, "expected '<i> <j> <value>'");
      if (i == j) fail(line_no, "self-loop on spin " + std::to_string(i));
      if (i >= *n || j >= *n) fail(line_no, "coupling index out of range");
      const auto key = std::minmax(i, j);
      if (!seen_pairs.insert({key.first, key.second}).second) {
        fail(line_no, "duplicate pair (" + std::to_string(key.first) + ", " +
                          std::to_string(key.second) + ")");
      }
      couplings.push_back({i, j, v});
    }
  }
  if (!domain || !sign || !n) throw InvalidInput("model file must declare domain, sign and spins");
  std::vector<double> biases(*n, 0.0);
  std::vector<bool> bias_set(*n, false);
  for (auto [i, v] : bias_entries) {
    if (bias_set[i]) throw InvalidInput("duplicate bias entry for spin " + std::to_string(i));
    bias_set[i] = true;
    biases[i] = v;
  }
  return IsingModel(*n, std::move(couplings), std::move(biases), *domain, *sign);
}

IsingModel read_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open model file '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_model(buf.str());
}

std::string format_model(const IsingModel& model, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += "domain " + std::string(to_string(model.domain())) + "\n";
  out += "sign " + std::string(to_string(model.sign())) + "\n";
  out += "spins " + std::to_string(model.size()) + "\n";
  out += "biases\n";
  const auto b = model.biases();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] != 0.0) out += std::to_string(i) + " " + fmt_double(b[i]) + "\n";
  }
  out += "couplings\n";
  for (const auto& c : model.couplings()) {
    out += std::to_string(c.i) + " " + std::to_string(c.j) + " " + fmt_double(c.weight) + "\n";
  }
  return out;
}

void write_model(const std::string& path, const IsingModel& model,
                 const std::vector<std::string>& comments) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write model file '" + path + "'");
  f << format_model(model, comments);
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace passim
