#include "mapseg/raster.hpp"

#include <algorithm>

namespace mapseg {

BinaryMask BinaryMask::from_gray(const GrayImage& img, std::uint8_t threshold) {
  BinaryMask out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out.set(i, img[i] >= threshold);
  return out;
}

std::size_t BinaryMask::count() const {
  auto px = pixels_.pixels();
  return static_cast<std::size_t>(std::count(px.begin(), px.end(), kOn));
}

BinaryMask BinaryMask::complement() const {
  BinaryMask out(width(), height());
  for (std::size_t i = 0; i < size(); ++i) out.set(i, !test(i));
  return out;
}

BinaryMask operator&(const BinaryMask& a, const BinaryMask& b) {
  require_same_size(a, b, "mask intersection");
  BinaryMask out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a.test(i) && b.test(i));
  return out;
}

BinaryMask operator|(const BinaryMask& a, const BinaryMask& b) {
  require_same_size(a, b, "mask union");
  BinaryMask out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a.test(i) || b.test(i));
  return out;
}

BinaryMask subtract(const BinaryMask& a, const BinaryMask& b) {
  require_same_size(a, b, "mask difference");
  BinaryMask out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a.test(i) && !b.test(i));
  return out;
}

void require_same_size(int w1, int h1, int w2, int h2, const char* what) {
  if (w1 != w2 || h1 != h2) {
    throw DimensionMismatch(std::string(what) + ": size mismatch " + std::to_string(w1) + "x" +
                            std::to_string(h1) + " vs " + std::to_string(w2) + "x" +
                            std::to_string(h2));
  }
}

std::uint8_t luminance(Rgb px) {
  // Integer form of round(0.299 R + 0.587 G + 0.114 B) with halves rounding up.
  const int weighted = 299 * px.r + 587 * px.g + 114 * px.b;
  return static_cast<std::uint8_t>(std::min(255, (weighted + 500) / 1000));
}

GrayImage to_luminance(const RgbImage& img) {
  GrayImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = luminance(img[i]);
  return out;
}

RgbImage gray_to_rgb(const GrayImage& img) {
  RgbImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = Rgb{img[i], img[i], img[i]};
  return out;
}

GrayImage crop_to_mask(const GrayImage& img, const BinaryMask& mask) {
  require_same_size(img, mask, "crop_to_mask");
  GrayImage out = img;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (!mask.test(i)) out[i] = 0;
  }
  return out;
}

GrayImage invert(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = static_cast<std::uint8_t>(255 - img[i]);
  return out;
}

Box bounding_box(const BinaryMask& mask) {
  Box box{mask.width(), mask.height(), -1, -1};
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.test(x, y)) continue;
      box.xmin = std::min(box.xmin, x);
      box.ymin = std::min(box.ymin, y);
      box.xmax = std::max(box.xmax, x);
      box.ymax = std::max(box.ymax, y);
    }
  }
  if (!box.valid()) return Box{};
  return box;
}

}  // namespace mapseg
