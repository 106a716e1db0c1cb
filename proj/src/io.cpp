#include "mapseg/io.hpp"

#include <png.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace mapseg::io {
namespace {

namespace fs = std::filesystem;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  return f;
}

bool has_png_signature(const std::string& head) {
  static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return head.size() >= 8 && std::memcmp(head.data(), sig, 8) == 0;
}

// libpng reports errors through longjmp; the message is parked here and
// rethrown as FormatError once control is back in C++ frames.
thread_local char png_last_error[256];

[[noreturn]] void png_error_handler(png_structp png, png_const_charp msg) {
  std::snprintf(png_last_error, sizeof png_last_error, "%s", msg);
  png_longjmp(png, 1);
}
void png_warning_handler(png_structp, png_const_charp) {}

struct PngRead {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngRead() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct PngWrite {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWrite() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

struct PngDecoded {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 or 3 after alpha stripping
  std::vector<std::uint8_t> data;
};

PngDecoded decode_png(const fs::path& path) {
  FilePtr f = open_file(path, "rb");
  PngRead rd;
  rd.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                  png_warning_handler);
  if (!rd.png) throw IoError("png: out of memory");
  rd.info = png_create_info_struct(rd.png);
  if (!rd.info) throw IoError("png: out of memory");
  PngDecoded out;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(rd.png))) {
    throw FormatError(std::string("corrupt header: png: ") + png_last_error + " in " +
                      path.string());
  }
  png_init_io(rd.png, f.get());
  png_read_info(rd.png, rd.info);

  const int bit_depth = png_get_bit_depth(rd.png, rd.info);
  const int color = png_get_color_type(rd.png, rd.info);
  if (bit_depth > 8) {
    throw FormatError("unsupported bit depth " + std::to_string(bit_depth) + " in " +
                      path.string());
  }
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(rd.png);
  if (color == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(rd.png);
  if (png_get_valid(rd.png, rd.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(rd.png);
  png_set_strip_alpha(rd.png);
  png_read_update_info(rd.png, rd.info);

  out.width = static_cast<int>(png_get_image_width(rd.png, rd.info));
  out.height = static_cast<int>(png_get_image_height(rd.png, rd.info));
  out.channels = png_get_channels(rd.png, rd.info);
  if (out.channels != 1 && out.channels != 3) {
    throw FormatError("unsupported channel count " + std::to_string(out.channels));
  }
  const std::size_t stride = png_get_rowbytes(rd.png, rd.info);
  out.data.resize(stride * static_cast<std::size_t>(out.height));
  rows.resize(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) rows[y] = out.data.data() + stride * y;
  png_read_image(rd.png, rows.data());
  png_read_end(rd.png, nullptr);
  return out;
}

void encode_png(const fs::path& path, int width, int height, int channels,
                const std::uint8_t* data) {
  FilePtr f = open_file(path, "wb");
  PngWrite wr;
  wr.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                   png_warning_handler);
  if (!wr.png) throw IoError("png: out of memory");
  wr.info = png_create_info_struct(wr.png);
  if (!wr.info) throw IoError("png: out of memory");
  if (setjmp(png_jmpbuf(wr.png))) {
    throw IoError(std::string("png write failed: ") + png_last_error + " for " + path.string());
  }
  png_init_io(wr.png, f.get());
  png_set_IHDR(wr.png, wr.info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(wr.png, wr.info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y) {
    png_write_row(wr.png, const_cast<png_bytep>(data + stride * y));
  }
  png_write_end(wr.png, nullptr);
}

// Reads the next header token of a PNM file, skipping whitespace and comments.
bool next_token(std::istream& in, std::string& tok) {
  tok.clear();
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  return !tok.empty();
}

int parse_header_int(std::istream& in, const fs::path& path) {
  std::string tok;
  if (!next_token(in, tok)) throw FormatError("corrupt header in " + path.string());
  int value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || value < 1) {
    throw FormatError("corrupt header in " + path.string());
  }
  return value;
}

AnyImage decode_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string magic;
  next_token(in, magic);
  if (magic != "P5" && magic != "P6") throw FormatError("corrupt header in " + path.string());
  const int width = parse_header_int(in, path);
  const int height = parse_header_int(in, path);
  const int maxval = parse_header_int(in, path);
  if (maxval > 255) {
    throw FormatError("unsupported bit depth (maxval " + std::to_string(maxval) + ") in " +
                      path.string());
  }
  const int channels = magic == "P5" ? 1 : 3;
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(width) * height * channels);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
    throw FormatError("corrupt header: truncated pixel data in " + path.string());
  }
  if (maxval != 255) {
    for (auto& v : buf) v = static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
  }
  if (channels == 1) return GrayImage(width, height, std::move(buf));
  RgbImage img(width, height);
  for (std::size_t i = 0; i < img.size(); ++i) {
    img[i] = Rgb{buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]};
  }
  return img;
}

std::string read_head(const fs::path& path, std::size_t n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string head(n, '\0');
  in.read(head.data(), static_cast<std::streamsize>(n));
  head.resize(static_cast<std::size_t>(in.gcount()));
  return head;
}

std::string format_coord(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

AnyImage load_image(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("no such file: " + path.string());
  const std::string head = read_head(path, 8);
  if (has_png_signature(head)) {
    PngDecoded png = decode_png(path);
    if (png.channels == 1) return GrayImage(png.width, png.height, std::move(png.data));
    RgbImage img(png.width, png.height);
    for (std::size_t i = 0; i < img.size(); ++i) {
      img[i] = Rgb{png.data[3 * i], png.data[3 * i + 1], png.data[3 * i + 2]};
    }
    return img;
  }
  if (head.size() >= 2 && head[0] == 'P') return decode_pnm(path);
  if (head.size() < 2) throw FormatError("corrupt header: file too short: " + path.string());
  throw FormatError("unsupported image format: " + path.string());
}

RgbImage load_rgb(const fs::path& path) {
  AnyImage img = load_image(path);
  if (auto* rgb = std::get_if<RgbImage>(&img)) return std::move(*rgb);
  return gray_to_rgb(std::get<GrayImage>(img));
}

GrayImage load_gray(const fs::path& path) {
  AnyImage img = load_image(path);
  if (auto* gray = std::get_if<GrayImage>(&img)) return std::move(*gray);
  return to_luminance(std::get<RgbImage>(img));
}

void save_png(const GrayImage& img, const fs::path& path) {
  encode_png(path, img.width(), img.height(), 1, img.pixels().data());
}

void save_png(const RgbImage& img, const fs::path& path) {
  static_assert(sizeof(Rgb) == 3);
  encode_png(path, img.width(), img.height(), 3,
             reinterpret_cast<const std::uint8_t*>(img.pixels().data()));
}

void save_pnm(const GrayImage& img, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels().data()),
            static_cast<std::streamsize>(img.size()));
}

void save_pnm(const RgbImage& img, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels().data()),
            static_cast<std::streamsize>(img.size() * 3));
}

void save_mask(const BinaryMask& mask, const fs::path& path) { save_png(mask.gray(), path); }

BinaryMask load_mask(const fs::path& path) {
  AnyImage img = load_image(path);
  if (std::holds_alternative<RgbImage>(img)) {
    throw FormatError("mask must be single-channel: " + path.string());
  }
  return BinaryMask::from_gray(std::get<GrayImage>(img), 128);
}

void save_labels(const LabelImage& labels, const fs::path& path) {
  RgbImage rgb(labels.width(), labels.height());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto v = static_cast<std::uint32_t>(labels[i]);
    rgb[i] = Rgb{static_cast<std::uint8_t>(v & 0xff), static_cast<std::uint8_t>((v >> 8) & 0xff),
                 static_cast<std::uint8_t>((v >> 16) & 0xff)};
  }
  save_png(rgb, path);
}

LabelImage load_labels(const fs::path& path) {
  AnyImage img = load_image(path);
  if (auto* gray = std::get_if<GrayImage>(&img)) {
    LabelImage out(gray->width(), gray->height());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*gray)[i];
    return out;
  }
  const auto& rgb = std::get<RgbImage>(img);
  LabelImage out(rgb.width(), rgb.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = rgb[i].r | (rgb[i].g << 8) | (rgb[i].b << 16);
  }
  return out;
}

PointList parse_points(const std::string& text, std::vector<PointsWarning>* warnings) {
  PointList points;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto parse_field = [&](std::string_view s, double& v) {
    s = trim(s);
    if (s.empty()) return false;
    const std::string buf(s);
    char* end = nullptr;
    v = std::strtod(buf.c_str(), &end);
    return end == buf.c_str() + buf.size() && std::isfinite(v);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rec = trim(line);
    if (rec.empty()) continue;
    if (lineno == 1 && (rec == "x,y" || rec == "\xEF\xBB\xBFx,y")) continue;
    const auto comma = rec.find(',');
    Point p;
    if (comma == std::string_view::npos || !parse_field(rec.substr(0, comma), p.x) ||
        !parse_field(rec.substr(comma + 1), p.y)) {
      throw FormatError("points: malformed record at line " + std::to_string(lineno) + ": \"" +
                        std::string(rec) + "\"");
    }
    if ((p.x < 0 || p.y < 0) && warnings) {
      warnings->push_back({lineno, "negative coordinate"});
    }
    points.push_back(p);
  }
  return points;
}

PointList load_points(const fs::path& path, std::vector<PointsWarning>* warnings) {
  return parse_points(read_text(path), warnings);
}

void save_points(const PointList& points, const fs::path& path) {
  std::string text = "x,y\n";
  for (const Point& p : points) text += format_coord(p.x) + "," + format_coord(p.y) + "\n";
  write_text(path, text);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string codec_version() { return std::string("libpng ") + png_get_libpng_ver(nullptr); }

}  // namespace mapseg::io
