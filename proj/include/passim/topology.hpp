#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "passim/model.hpp"

namespace passim {

struct Cell {
  std::size_t row;
  std::size_t col;
};

/// rows x cols grid with king's-move (8-neighbor) adjacency; cell (r, c)
/// maps to spin r * cols + c.
class GridTopology {
 public:
  GridTopology(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_ * cols_; }
  std::size_t index(Cell c) const noexcept { return c.row * cols_ + c.col; }
  Cell cell(std::size_t index) const noexcept { return {index / cols_, index % cols_}; }

  std::vector<std::size_t> neighbors(std::size_t index) const;

  /// Each adjacent pair once, as (lower index, higher index), sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
};

using WeightFn = std::function<double(Cell, Cell)>;
using BiasFn = std::function<double(Cell)>;

IsingModel build_kings_grid(std::size_t rows, std::size_t cols, const WeightFn& weight,
                            const BiasFn& bias, SpinDomain domain = SpinDomain::PlusMinus,
                            EnergySign sign = EnergySign::Ferromagnetic);

/// Complete graph on n spins; weight(i, j) is called once per pair i < j.
IsingModel build_fully_connected(std::size_t n,
                                 const std::function<double(std::size_t, std::size_t)>& weight,
                                 std::vector<double> biases, SpinDomain domain = SpinDomain::PlusMinus,
                                 EnergySign sign = EnergySign::Ferromagnetic);

/// Binary image / mask, row-major.
struct BinaryGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> cells;

  std::uint8_t at(std::size_t r, std::size_t c) const { return cells[r * cols + c]; }
  bool operator==(const BinaryGrid&) const = default;
};

/// Text form: one row per line of '0'/'1' (also '.'/'#'); blank lines and
/// lines starting with '#' followed by a space are ignored.
BinaryGrid parse_binary_grid(const std::string& text);
BinaryGrid read_binary_grid(const std::string& path);
std::string format_binary_grid(const BinaryGrid& grid);

/// King's-move model whose two ground states are the mask and its
/// complement: same-color neighbors are coupled to align, different-color
/// neighbors to anti-align, each with |J| = magnitude; zero biases.
/// The model is in the +-1 domain, spin up = mask cell 1.
IsingModel encode_mask_ground_state(const BinaryGrid& mask, double magnitude,
                                    EnergySign sign = EnergySign::Ferromagnetic);

}  // namespace passim
