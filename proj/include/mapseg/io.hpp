#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "mapseg/raster.hpp"

namespace mapseg::io {

using AnyImage = std::variant<RgbImage, GrayImage>;

/// Decodes an 8-bit PNG (gray, gray+alpha, RGB, RGBA, palette) or a binary
/// PGM/PPM. Alpha is dropped. 16-bit samples are rejected.
AnyImage load_image(const std::filesystem::path& path);

/// Loads any supported image and converts it to RGB (gray is replicated).
RgbImage load_rgb(const std::filesystem::path& path);
/// Loads any supported image and converts it to luminance.
GrayImage load_gray(const std::filesystem::path& path);

void save_png(const GrayImage& img, const std::filesystem::path& path);
void save_png(const RgbImage& img, const std::filesystem::path& path);
/// Binary PGM (P5) / PPM (P6).
void save_pnm(const GrayImage& img, const std::filesystem::path& path);
void save_pnm(const RgbImage& img, const std::filesystem::path& path);

void save_mask(const BinaryMask& mask, const std::filesystem::path& path);
/// Single-channel 8-bit input only; values >= 128 become foreground.
BinaryMask load_mask(const std::filesystem::path& path);

/// Label images are stored as RGB PNG with the id packed as
/// r + 256 g + 65536 b. Loading a gray PNG yields the gray values as ids.
void save_labels(const LabelImage& labels, const std::filesystem::path& path);
LabelImage load_labels(const std::filesystem::path& path);

struct PointsWarning {
  int line = 0;
  std::string message;
};

/// Points CSV: one "x,y" record per line, optional "x,y" header, LF or CRLF.
/// Negative coordinates are accepted and reported in `warnings`.
PointList load_points(const std::filesystem::path& path,
                      std::vector<PointsWarning>* warnings = nullptr);
PointList parse_points(const std::string& text, std::vector<PointsWarning>* warnings = nullptr);
/// Writes the "x,y" header followed by values with 3 decimals.
void save_points(const PointList& points, const std::filesystem::path& path);

/// Version string of the PNG codec linked in.
std::string codec_version();

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mapseg::io
