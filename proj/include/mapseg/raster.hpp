#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mapseg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unsupported file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Two rasters that must share a size do not.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An operation precondition was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 2-D raster with the origin at the top-left pixel. x is the
/// column, y the row.
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw PreconditionError("raster dimensions must be positive, got " +
                              std::to_string(width) + "x" + std::to_string(height));
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }
  Raster(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1 ||
        data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw PreconditionError("raster data length does not match " + std::to_string(width) +
                              "x" + std::to_string(height));
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  T& at(int x, int y) { return data_[index(x, y)]; }
  const T& at(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> pixels() { return data_; }
  std::span<const T> pixels() const { return data_; }
  std::span<const T> row(int y) const {
    return std::span<const T>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }

  bool same_size(const auto& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using GrayImage = Raster<std::uint8_t>;
using RgbImage = Raster<Rgb>;
/// Instance labels; 0 is background.
using LabelImage = Raster<std::int32_t>;
/// Per-pixel real values (distance maps, accumulators after normalization).
using RealImage = Raster<double>;

/// Foreground/background raster whose stored values are restricted to
/// {0, 255}; 255 is foreground.
class BinaryMask {
 public:
  static constexpr std::uint8_t kOn = 255;
  static constexpr std::uint8_t kOff = 0;

  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false)
      : pixels_(width, height, fill ? kOn : kOff) {}

  /// Any value >= threshold becomes foreground.
  static BinaryMask from_gray(const GrayImage& img, std::uint8_t threshold = 128);

  int width() const { return pixels_.width(); }
  int height() const { return pixels_.height(); }
  std::size_t size() const { return pixels_.size(); }
  bool contains(int x, int y) const { return pixels_.contains(x, y); }
  std::size_t index(int x, int y) const { return pixels_.index(x, y); }

  bool test(int x, int y) const { return pixels_.at(x, y) != kOff; }
  bool test(std::size_t i) const { return pixels_[i] != kOff; }
  void set(int x, int y, bool on = true) { pixels_.at(x, y) = on ? kOn : kOff; }
  void set(std::size_t i, bool on = true) { pixels_[i] = on ? kOn : kOff; }

  std::size_t count() const;
  bool any() const { return count() > 0; }
  bool same_size(const auto& other) const { return pixels_.same_size(other); }

  /// {0,255} view usable wherever a GrayImage is expected.
  const GrayImage& gray() const { return pixels_; }

  BinaryMask complement() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  GrayImage pixels_;
};

BinaryMask operator&(const BinaryMask& a, const BinaryMask& b);
BinaryMask operator|(const BinaryMask& a, const BinaryMask& b);
/// a AND NOT b.
BinaryMask subtract(const BinaryMask& a, const BinaryMask& b);

struct Point {
  double x = 0.0;  // column
  double y = 0.0;  // row
  friend bool operator==(const Point&, const Point&) = default;
};

using PointList = std::vector<Point>;

/// Throws DimensionMismatch naming both sizes.
void require_same_size(int w1, int h1, int w2, int h2, const char* what);

template <typename A, typename B>
void require_same_size(const A& a, const B& b, const char* what) {
  require_same_size(a.width(), a.height(), b.width(), b.height(), what);
}

/// Rec.601 luminance, rounded half up.
std::uint8_t luminance(Rgb px);
GrayImage to_luminance(const RgbImage& img);
RgbImage gray_to_rgb(const GrayImage& img);

/// Pixels outside the mask become 0; pixels inside are unchanged.
GrayImage crop_to_mask(const GrayImage& img, const BinaryMask& mask);

GrayImage invert(const GrayImage& img);

/// Smallest axis-aligned box holding every foreground pixel. Inclusive
/// bounds; `valid` is false for empty masks.
struct Box {
  int xmin = 0;
  int ymin = 0;
  int xmax = -1;
  int ymax = -1;
  bool valid() const { return xmax >= xmin && ymax >= ymin; }
  int width() const { return xmax - xmin + 1; }
  int height() const { return ymax - ymin + 1; }
  long long area() const { return valid() ? 1LL * width() * height() : 0; }
  bool contains(double x, double y) const {
    return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
  }
};

Box bounding_box(const BinaryMask& mask);

}  // namespace mapseg
