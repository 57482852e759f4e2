#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "passim/topology.hpp"

namespace passim {

/// Grayscale images and labels read from an IDX image/label file pair.
struct IdxImages {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // image k at [k*rows*cols, (k+1)*rows*cols)
  std::vector<std::uint8_t> labels;

  std::size_t count() const noexcept { return labels.size(); }
  std::span<const std::uint8_t> image(std::size_t k) const {
    return {pixels.data() + k * rows * cols, rows * cols};
  }
};

/// Parses IDX bytes (magic 0x00000803 for images, 0x00000801 for labels,
/// big-endian dimensions, then raw unsigned bytes).
IdxImages parse_idx(std::span<const std::uint8_t> image_bytes,
                    std::span<const std::uint8_t> label_bytes);
IdxImages load_idx(const std::string& images_path, const std::string& labels_path);

/// Builds IDX file contents, mostly for tests and data conversion.
std::vector<std::uint8_t> encode_idx_images(std::size_t rows, std::size_t cols,
                                            std::span<const std::uint8_t> pixels);
std::vector<std::uint8_t> encode_idx_labels(std::span<const std::uint8_t> labels);

inline constexpr std::size_t kMnistSide = 28;
inline constexpr std::size_t kGridSide = 16;

/// Area-weighted 28x28 -> 16x16 resample followed by a threshold:
/// a cell is 1 when its mean intensity is >= threshold * 255 (ties go up).
BinaryGrid downsample(std::span<const std::uint8_t> image, double threshold = 0.5);

struct BinaryImageDataset {
  std::size_t rows = kGridSide;
  std::size_t cols = kGridSide;
  std::vector<std::vector<std::uint8_t>> images;
  std::vector<std::uint8_t> labels;

  std::size_t size() const noexcept { return images.size(); }
};

BinaryImageDataset binarize(const IdxImages& idx, double threshold = 0.5);
BinaryImageDataset filter_label(const BinaryImageDataset& data, int label);
/// Per-pixel fraction of images with the pixel on.
std::vector<double> mean_image(const BinaryImageDataset& data);

}  // namespace passim
