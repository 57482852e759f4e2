#include "passim/topology.hpp"

#include <fstream>
#include <sstream>

#include "passim/error.hpp"

namespace passim {

GridTopology::GridTopology(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) throw InvalidInput("grid dimensions must be positive");
}

std::vector<std::size_t> GridTopology::neighbors(std::size_t index) const {
  const Cell c = cell(index);
  std::vector<std::size_t> out;
  out.reserve(8);
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      const auto r = static_cast<std::ptrdiff_t>(c.row) + dr;
      const auto q = static_cast<std::ptrdiff_t>(c.col) + dc;
      if (r < 0 || q < 0 || r >= static_cast<std::ptrdiff_t>(rows_) ||
          q >= static_cast<std::ptrdiff_t>(cols_)) {
        continue;
      }
      out.push_back(static_cast<std::size_t>(r) * cols_ + static_cast<std::size_t>(q));
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> GridTopology::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j : neighbors(i)) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

IsingModel build_kings_grid(std::size_t rows, std::size_t cols, const WeightFn& weight,
                            const BiasFn& bias, SpinDomain domain, EnergySign sign) {
  const GridTopology grid(rows, cols);
  std::vector<Coupling> cs;
  for (auto [i, j] : grid.edges()) cs.push_back({i, j, weight(grid.cell(i), grid.cell(j))});
  std::vector<double> bs(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) bs[k] = bias(grid.cell(k));
  return IsingModel(grid.size(), std::move(cs), std::move(bs), domain, sign);
}

IsingModel build_fully_connected(std::size_t n,
                                 const std::function<double(std::size_t, std::size_t)>& weight,
                                 std::vector<double> biases, SpinDomain domain, EnergySign sign) {
  std::vector<Coupling> cs;
  cs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) cs.push_back({i, j, weight(i, j)});
  }
  return IsingModel(n, std::move(cs), std::move(biases), domain, sign);
}

BinaryGrid parse_binary_grid(const std::string& text) {
  BinaryGrid g;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (line.size() >= 2 && line[0] == '#' && line[1] == ' ')) continue;
    std::vector<std::uint8_t> row;
    for (char ch : line) {
      if (ch == '1' || ch == '#') {
        row.push_back(1);
      } else if (ch == '0' || ch == '.') {
        row.push_back(0);
      } else if (ch == ' ' || ch == '\t' || ch == ',') {
        continue;
      } else {
        throw InvalidInput(std::string("unexpected character '") + ch + "' in binary grid");
      }
    }
    if (row.empty()) continue;
    if (g.cols == 0) g.cols = row.size();
    if (row.size() != g.cols) throw InvalidInput("binary grid rows have unequal length");
    g.cells.insert(g.cells.end(), row.begin(), row.end());
    ++g.rows;
  }
  if (g.rows == 0) throw InvalidInput("binary grid is empty");
  return g;
}

BinaryGrid read_binary_grid(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open grid file '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_binary_grid(buf.str());
}

std::string format_binary_grid(const BinaryGrid& grid) {
  std::string out;
  for (std::size_t r = 0; r < grid.rows; ++r) {
    for (std::size_t c = 0; c < grid.cols; ++c) out.push_back(grid.at(r, c) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

IsingModel encode_mask_ground_state(const BinaryGrid& mask, double magnitude, EnergySign sign) {
  if (mask.cells.size() != mask.rows * mask.cols) throw InvalidInput("mask dimensions mismatch");
  // Under Ferromagnetic, J > 0 rewards s_i == s_j; AsWritten flips that.
  const double align = sign == EnergySign::Ferromagnetic ? magnitude : -magnitude;
  const auto& cells = mask.cells;
  return build_kings_grid(
      mask.rows, mask.cols,
      [&](Cell a, Cell b) {
        const bool same = cells[a.row * mask.cols + a.col] == cells[b.row * mask.cols + b.col];
        return same ? align : -align;
      },
      [](Cell) { return 0.0; }, SpinDomain::PlusMinus, sign);
}

}  // namespace passim
