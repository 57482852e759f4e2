#include "passim/idx.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "passim/error.hpp"

namespace passim {
namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
         (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

IdxImages parse_idx(std::span<const std::uint8_t> img, std::span<const std::uint8_t> lab) {
  if (img.size() < 16 || read_be32(img, 0) != 0x00000803) {
    throw InvalidInput("image file: bad IDX magic (expected 0x00000803)");
  }
  if (lab.size() < 8 || read_be32(lab, 0) != 0x00000801) {
    throw InvalidInput("label file: bad IDX magic (expected 0x00000801)");
  }
  IdxImages out;
  const std::size_t count = read_be32(img, 4);
  out.rows = read_be32(img, 8);
  out.cols = read_be32(img, 12);
  const std::size_t label_count = read_be32(lab, 4);
  if (count != label_count) {
    throw InvalidInput("IDX image count " + std::to_string(count) + " does not match label count " +
                       std::to_string(label_count));
  }
  const std::size_t payload = count * out.rows * out.cols;
  if (img.size() - 16 < payload) throw InvalidInput("image file: truncated payload");
  if (lab.size() - 8 < count) throw InvalidInput("label file: truncated payload");
  out.pixels.assign(img.begin() + 16, img.begin() + 16 + static_cast<std::ptrdiff_t>(payload));
  out.labels.assign(lab.begin() + 8, lab.begin() + 8 + static_cast<std::ptrdiff_t>(count));
  return out;
}

IdxImages load_idx(const std::string& images_path, const std::string& labels_path) {
  const auto img = read_file(images_path);
  const auto lab = read_file(labels_path);
  return parse_idx(img, lab);
}

std::vector<std::uint8_t> encode_idx_images(std::size_t rows, std::size_t cols,
                                            std::span<const std::uint8_t> pixels) {
  if (rows == 0 || cols == 0 || pixels.size() % (rows * cols) != 0) {
    throw InvalidInput("pixel buffer is not a whole number of images");
  }
  std::vector<std::uint8_t> out;
  write_be32(out, 0x00000803);
  write_be32(out, static_cast<std::uint32_t>(pixels.size() / (rows * cols)));
  write_be32(out, static_cast<std::uint32_t>(rows));
  write_be32(out, static_cast<std::uint32_t>(cols));
  out.insert(out.end(), pixels.begin(), pixels.end());
  return out;
}

std::vector<std::uint8_t> encode_idx_labels(std::span<const std::uint8_t> labels) {
  std::vector<std::uint8_t> out;
  write_be32(out, 0x00000801);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

BinaryGrid downsample(std::span<const std::uint8_t> image, double threshold) {
  if (image.size() != kMnistSide * kMnistSide) throw InvalidInput("downsample expects a 28x28 image");
  // Each output cell spans 7/4 source pixels per axis. In quarter-pixel
  // units cell j covers [7j, 7j + 7) and source pixel p covers [4p, 4p + 4).
  constexpr std::size_t kSpan = 7, kPix = 4;
  const auto overlap = [](std::size_t cell, std::size_t pix) -> long {
    const long lo = std::max<long>(static_cast<long>(cell * kSpan), static_cast<long>(pix * kPix));
    const long hi = std::min<long>(static_cast<long>(cell * kSpan + kSpan),
                                   static_cast<long>(pix * kPix + kPix));
    return std::max<long>(0, hi - lo);
  };
  BinaryGrid g;
  g.rows = g.cols = kGridSide;
  g.cells.resize(kGridSide * kGridSide);
  constexpr double kTotal = kSpan * kSpan * 255.0;
  for (std::size_t r = 0; r < kGridSide; ++r) {
    for (std::size_t c = 0; c < kGridSide; ++c) {
      long acc = 0;
      for (std::size_t pr = (r * kSpan) / kPix; pr <= (r * kSpan + kSpan - 1) / kPix; ++pr) {
        const long wr = overlap(r, pr);
        for (std::size_t pc = (c * kSpan) / kPix; pc <= (c * kSpan + kSpan - 1) / kPix; ++pc) {
          acc += wr * overlap(c, pc) * image[pr * kMnistSide + pc];
        }
      }
      g.cells[r * kGridSide + c] = static_cast<double>(acc) / kTotal >= threshold - 1e-12 ? 1 : 0;
    }
  }
  return g;
}

BinaryImageDataset binarize(const IdxImages& idx, double threshold) {
  if (idx.rows != kMnistSide || idx.cols != kMnistSide) {
    throw InvalidInput("expected 28x28 images, got " + std::to_string(idx.rows) + "x" +
                       std::to_string(idx.cols));
  }
  BinaryImageDataset out;
  for (std::size_t k = 0; k < idx.count(); ++k) {
    out.images.push_back(downsample(idx.image(k), threshold).cells);
    out.labels.push_back(idx.labels[k]);
  }
  return out;
}

BinaryImageDataset filter_label(const BinaryImageDataset& data, int label) {
  BinaryImageDataset out;
  out.rows = data.rows;
  out.cols = data.cols;
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (data.labels[k] == label) {
      out.images.push_back(data.images[k]);
      out.labels.push_back(data.labels[k]);
    }
  }
  return out;
}

std::vector<double> mean_image(const BinaryImageDataset& data) {
  if (data.size() == 0) throw InvalidInput("mean of an empty dataset");
  std::vector<double> m(data.rows * data.cols, 0.0);
  for (const auto& img : data.images) {
    for (std::size_t k = 0; k < m.size(); ++k) m[k] += img[k];
  }
  for (auto& v : m) v /= static_cast<double>(data.size());
  return m;
}

}  // namespace passim
